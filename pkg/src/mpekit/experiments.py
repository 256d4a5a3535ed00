"""Generative-model sampling and plug-in equilibrium experiments.

Every random draw is a pure function of the key (master seed, trial, state,
joint action, draw index): each trial derives one counter-based stream per
state-action pair from the master seed, so results are bit-identical no
matter how trials are scheduled or parallelized.

A trial estimates the transition kernel from n samples per pair (rewards
and discount are taken as known), solves the estimated game, and certifies
the solved profile against the TRUE game. The recorded gap pair is the
whole point: it measures how good the plug-in equilibrium really is.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .equilibrium import certify_profile
from .games import MarkovGame
from .solver import solve_mpe


@dataclass(frozen=True, eq=False)
class EmpiricalModel:
    """Next-state sample counts and the transition estimate they induce.

    Every (state, action) slice of ``counts`` sums to exactly
    ``samples_per_pair``, so the estimated rows are stochastic by
    construction (exactly so in rational arithmetic).
    """

    counts: np.ndarray
    samples_per_pair: int

    @property
    def estimated_transitions(self) -> np.ndarray:
        return self.counts / self.samples_per_pair


@dataclass(frozen=True, eq=False)
class ExperimentRecord:
    """Outcome of one trial: certified gap pair against the true game."""

    trial_index: int
    alpha_pair: np.ndarray
    solver_converged: bool
    rng_seed: int


@dataclass(frozen=True, eq=False)
class ExperimentSummary:
    """Order statistics over a batch of experiment records."""

    count: int
    convergence_rate: float | None
    alpha_min: np.ndarray | None
    alpha_median: np.ndarray | None
    alpha_max: np.ndarray | None
    alpha_mean: np.ndarray | None


def generative_sample(game: MarkovGame, state: int,
                      joint_action: tuple[int, ...],
                      rng: np.random.Generator) -> int:
    """Draw one next state from P(.|state, joint_action) by inverse CDF."""
    if not 0 <= state < game.num_states:
        raise ValueError(f"state {state} out of range [0, {game.num_states})")
    j = game.joint_action_index(tuple(joint_action))
    cdf = np.cumsum(game.transitions[state, j])
    draw = int(np.searchsorted(cdf, rng.random(), side="right"))
    return min(draw, game.num_states - 1)


def pair_stream(root: np.random.SeedSequence, state: int,
                pair_index: int, num_pairs: int) -> np.random.Generator:
    """Counter-based generator for one (state, action) pair under a root seed.

    Children are derived statelessly by extending the root's spawn key, so
    the same (root, state, pair) always yields the same stream.
    """
    child = np.random.SeedSequence(
        entropy=root.entropy,
        spawn_key=(*root.spawn_key, state * num_pairs + pair_index),
    )
    return np.random.Generator(np.random.Philox(child))


def estimate_model(game: MarkovGame, n: int,
                   rng: np.random.SeedSequence
                   ) -> tuple[MarkovGame, EmpiricalModel]:
    """Estimate the transition kernel from n generative samples per pair.

    Returns the plug-in game (estimated transitions, original rewards and
    discount) together with the raw counts. Exactly n draws are spent on
    every (state, joint action) pair: n |S| |A| simulator calls in total.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    num_states = game.num_states
    num_pairs = game.num_joint_actions
    counts = np.zeros((num_states, num_pairs, num_states), dtype=np.int64)
    for s in range(num_states):
        for j in range(num_pairs):
            gen = pair_stream(rng, s, j, num_pairs)
            cdf = np.cumsum(game.transitions[s, j])
            draws = np.searchsorted(cdf, gen.random(n), side="right")
            np.minimum(draws, num_states - 1, out=draws)
            counts[s, j] = np.bincount(draws, minlength=num_states)
    model = EmpiricalModel(counts=counts, samples_per_pair=n)
    estimated = MarkovGame(
        states=game.states,
        action_sets=game.action_sets,
        transitions=model.estimated_transitions,
        rewards=game.rewards,
        discount=game.discount,
        metric=game.metric,
    )
    return estimated, model


def trial_seed_sequence(master_seed: int, trial: int) -> np.random.SeedSequence:
    """The root stream of one trial; pure function of (master seed, trial)."""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(trial,))


def run_trial(game: MarkovGame, n: int, trial: int, master_seed: int,
              solver_tol: float = 1e-8) -> ExperimentRecord:
    """One estimate-solve-certify round; independent of every other trial."""
    root = trial_seed_sequence(master_seed, trial)
    derived_seed = int(root.generate_state(1, np.uint64)[0])
    estimated, _ = estimate_model(game, n, root)
    result = solve_mpe(estimated, tol=solver_tol, seed=derived_seed)
    certificate = certify_profile(game, result.profile)
    return ExperimentRecord(
        trial_index=trial,
        alpha_pair=certificate.alpha_clamped(),
        solver_converged=result.converged,
        rng_seed=derived_seed,
    )


def run_experiments(game: MarkovGame, n: int, num_trials: int,
                    master_seed: int,
                    solver_tol: float = 1e-8) -> list[ExperimentRecord]:
    """Run independently seeded trials; the list is ordered by trial index.

    Trials share nothing but the master seed, so they may be distributed
    across processes without changing any record.
    """
    if num_trials < 0:
        raise ValueError("num_trials must be nonnegative")
    return [run_trial(game, n, trial, master_seed, solver_tol)
            for trial in range(num_trials)]


def summarize(records: list[ExperimentRecord]) -> ExperimentSummary:
    """Exact order statistics of the certified gaps, per player."""
    if not records:
        return ExperimentSummary(count=0, convergence_rate=None,
                                 alpha_min=None, alpha_median=None,
                                 alpha_max=None, alpha_mean=None)
    alphas = np.vstack([record.alpha_pair for record in records])
    converged = np.array([record.solver_converged for record in records])
    return ExperimentSummary(
        count=len(records),
        convergence_rate=float(converged.mean()),
        alpha_min=alphas.min(axis=0),
        alpha_median=np.median(alphas, axis=0),
        alpha_max=alphas.max(axis=0),
        alpha_mean=alphas.mean(axis=0),
    )


def _format(x: float) -> str:
    return f"{x:.12g}"


def records_csv(records: list[ExperimentRecord], num_players: int = 2) -> str:
    """Scatter data, one row per trial: trial,alpha1,...,converged,seed."""
    if records:
        num_players = len(records[0].alpha_pair)
    out = io.StringIO()
    alpha_cols = ",".join(f"alpha{i + 1}" for i in range(num_players))
    out.write(f"trial,{alpha_cols},converged,seed\n")
    for record in records:
        alphas = ",".join(_format(a) for a in record.alpha_pair)
        flag = "true" if record.solver_converged else "false"
        out.write(f"{record.trial_index},{alphas},{flag},{record.rng_seed}\n")
    return out.getvalue()


def summary_csv(summary: ExperimentSummary) -> str:
    """Summary statistics as stat,player,value rows."""
    out = io.StringIO()
    out.write("stat,player,value\n")
    out.write(f"count,,{summary.count}\n")
    if summary.count == 0:
        return out.getvalue()
    out.write(f"convergence_rate,,{_format(summary.convergence_rate)}\n")
    stats = [("min", summary.alpha_min), ("median", summary.alpha_median),
             ("max", summary.alpha_max), ("mean", summary.alpha_mean)]
    for name, vector in stats:
        for player, value in enumerate(vector, start=1):
            out.write(f"{name},{player},{_format(value)}\n")
    return out.getvalue()
