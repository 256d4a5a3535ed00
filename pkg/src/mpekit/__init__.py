"""Equilibrium certification and robustness analysis for finite Markov games.

The package certifies strategy profiles as approximate Markov perfect
equilibria, quantifies how model perturbations degrade equilibria (under
total-variation or Wasserstein transition error), sizes generative-model
sampling budgets, solves small two-player games, and runs reproducible
plug-in experiments.
"""

from .bounds import (
    RobustnessReport,
    alpha_bound_instance,
    alpha_bound_ipm,
    alpha_bound_tv,
    alpha_bound_w,
    delta_term,
    hoeffding_tail,
    lipschitz_value_bound,
    mdp_alpha_bound,
    robustness_report,
    sample_size_game,
    sample_size_mdp,
)
from .equilibrium import (
    CertificateAlpha,
    certify_profile,
    game_bellman_player,
    is_mpe,
)
from .experiments import (
    EmpiricalModel,
    ExperimentRecord,
    ExperimentSummary,
    estimate_model,
    generative_sample,
    records_csv,
    run_experiments,
    run_trial,
    summarize,
    summary_csv,
)
from .games import (
    GameFormatError,
    GameValidationError,
    MarkovGame,
    MarkovStrategy,
    Mdp,
    StrategyProfile,
    ValueFunction,
    bundled_game,
    default_line_metric,
    effective_metric,
    induced_mdp,
    parse_game,
    parse_profile,
    read_game,
    read_profile,
    serialize_game,
    serialize_profile,
    validate_game,
    validate_mdp,
)
from .mdp import (
    alpha_optimality,
    bellman_optimal,
    bellman_policy,
    evaluate_policy,
    solve_optimal,
)
from .metrics import (
    ApproximationParams,
    TOTAL_VARIATION,
    WASSERSTEIN,
    game_approx_params,
    game_lipschitz_constants,
    lipschitz_constant,
    span,
    tv_distance,
    wasserstein1,
)
from .solver import SolveResult, bimatrix_nash, solve_mpe, stage_game

__version__ = "0.1.0"

__all__ = [
    "ApproximationParams",
    "CertificateAlpha",
    "EmpiricalModel",
    "ExperimentRecord",
    "ExperimentSummary",
    "GameFormatError",
    "GameValidationError",
    "MarkovGame",
    "MarkovStrategy",
    "Mdp",
    "RobustnessReport",
    "SolveResult",
    "StrategyProfile",
    "TOTAL_VARIATION",
    "ValueFunction",
    "WASSERSTEIN",
    "alpha_bound_instance",
    "alpha_bound_ipm",
    "alpha_bound_tv",
    "alpha_bound_w",
    "alpha_optimality",
    "bellman_optimal",
    "bellman_policy",
    "bimatrix_nash",
    "bundled_game",
    "certify_profile",
    "default_line_metric",
    "delta_term",
    "effective_metric",
    "estimate_model",
    "evaluate_policy",
    "game_approx_params",
    "game_bellman_player",
    "game_lipschitz_constants",
    "generative_sample",
    "hoeffding_tail",
    "induced_mdp",
    "is_mpe",
    "lipschitz_constant",
    "lipschitz_value_bound",
    "mdp_alpha_bound",
    "parse_game",
    "parse_profile",
    "read_game",
    "read_profile",
    "records_csv",
    "robustness_report",
    "run_experiments",
    "run_trial",
    "sample_size_game",
    "sample_size_mdp",
    "serialize_game",
    "serialize_profile",
    "solve_mpe",
    "solve_optimal",
    "span",
    "stage_game",
    "summarize",
    "summary_csv",
    "tv_distance",
    "validate_game",
    "validate_mdp",
    "wasserstein1",
]
