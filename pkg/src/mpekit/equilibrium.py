"""Equilibrium certification for Markov games.

A strategy profile is certified by reduction: fixing everyone else turns the
game into one MDP per player, and the profile is an equilibrium exactly when
each player's strategy is optimal for their induced MDP. The certificate
records, per player, the achieved value, the best-response value, and the
gap between them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .games import MarkovGame, StrategyProfile, ValueFunction, induced_mdp
from .mdp import (
    DEFAULT_TOL,
    bellman_optimal,
    bellman_policy,
    evaluate_policy,
    solve_optimal,
)

MODE_FIXED = "fixed"
MODE_BEST_RESPONSE = "best-response"


@dataclass(frozen=True, eq=False)
class CertificateAlpha:
    """Per-player equilibrium gaps for a strategy profile.

    ``per_player_alpha`` holds raw gaps max_s (best-response value minus
    achieved value); they can dip a hair below zero through numerics, never
    below -2 tol. ``alpha_clamped`` zeroes that noise for reporting while
    the raw values stay available.
    """

    per_player_alpha: np.ndarray
    per_player_value: tuple[ValueFunction, ...]
    per_player_best_response_value: tuple[ValueFunction, ...]
    tol: float

    def alpha_clamped(self) -> np.ndarray:
        alpha = self.per_player_alpha
        return np.where((alpha < 0.0) & (alpha >= -2.0 * self.tol), 0.0, alpha)

    @property
    def max_alpha(self) -> float:
        return float(np.max(self.per_player_alpha))


def game_bellman_player(game: MarkovGame, profile: StrategyProfile, player: int,
                        v: ValueFunction, mode: str) -> ValueFunction:
    """One Bellman backup for a player, holding the others to the profile.

    ``mode`` selects the operator: "fixed" backs up the player's own profile
    strategy, "best-response" maximizes over the player's actions. Both are
    the corresponding MDP operators applied to the player's induced MDP.
    """
    mdp = induced_mdp(game, profile, player)
    if mode == MODE_FIXED:
        return bellman_policy(mdp, profile.strategies[player], v)
    if mode == MODE_BEST_RESPONSE:
        return bellman_optimal(mdp, v)
    raise ValueError(f"unknown mode {mode!r}")


def certify_profile(game: MarkovGame, profile: StrategyProfile,
                    tol: float = DEFAULT_TOL) -> CertificateAlpha:
    """Measure each player's incentive to deviate from a profile.

    For player i, the induced MDP is solved twice: policy evaluation of the
    player's own strategy, and the optimal (best-response) value. The gap
    alpha_i = max_s (best - achieved) is nonnegative up to numerics and is
    zero for every player iff the profile is an equilibrium.

    Per-player certifications are independent; results are assembled in
    player order.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    alphas = np.zeros(game.num_players)
    values = []
    best_values = []
    for player in range(game.num_players):
        mdp = induced_mdp(game, profile, player)
        achieved = evaluate_policy(mdp, profile.strategies[player])
        best, _ = solve_optimal(mdp, tol)
        alphas[player] = float(np.max(best.values - achieved.values))
        values.append(achieved)
        best_values.append(best)
    return CertificateAlpha(
        per_player_alpha=alphas,
        per_player_value=tuple(values),
        per_player_best_response_value=tuple(best_values),
        tol=tol,
    )


def is_mpe(game: MarkovGame, profile: StrategyProfile,
           tol: float = DEFAULT_TOL) -> bool:
    """True iff no player can gain more than tol by deviating."""
    certificate = certify_profile(game, profile, tol)
    return bool(np.all(certificate.per_player_alpha <= tol))
