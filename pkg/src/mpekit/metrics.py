"""Probability metrics and the functionals that pair with them.

Two integral probability metrics are implemented: total variation (paired
with the span seminorm) and Wasserstein-1 (paired with the Lipschitz
constant). Both are exact: total variation is the half-L1 closed form, and
Wasserstein-1 uses the cumulative-mass formula whenever the metric embeds
isometrically in the line, falling back to an exact transportation LP
otherwise. Instance sizes are tiny, so exactness beats approximation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .games import (
    MarkovGame,
    default_line_metric,
    metric_violations,
)

TOTAL_VARIATION = "total-variation"
WASSERSTEIN = "wasserstein"
IPM_KINDS = (TOTAL_VARIATION, WASSERSTEIN)

_DIST_ATOL = 1e-9


@dataclass(frozen=True)
class ApproximationParams:
    """How far apart two games are: reward gap and transition gap.

    epsilon bounds the pointwise reward difference; delta bounds the chosen
    IPM between matching transition rows.
    """

    epsilon: float
    delta: float
    ipm_kind: str

    def __post_init__(self):
        if self.ipm_kind not in IPM_KINDS:
            raise ValueError(f"unknown IPM kind {self.ipm_kind!r}")
        if self.epsilon < 0 or self.delta < 0:
            raise ValueError("epsilon and delta must be nonnegative")


def _check_distribution(name: str, p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1:
        raise ValueError(f"{name} must be a 1-D probability vector")
    if np.any(p < -_DIST_ATOL) or abs(float(p.sum()) - 1.0) > _DIST_ATOL:
        raise ValueError(f"{name} is not a probability distribution")
    return np.clip(p, 0.0, None)


def _check_metric(metric: np.ndarray, size: int) -> np.ndarray:
    metric = np.asarray(metric, dtype=np.float64)
    if metric.shape != (size, size):
        raise ValueError(f"metric shape {metric.shape} != expected {(size, size)}")
    problems = metric_violations(metric)
    if problems:
        raise ValueError("metric violates axioms: " + problems[0])
    return metric


def tv_distance(mu, nu) -> float:
    """Total variation distance, i.e. half the L1 difference; in [0, 1]."""
    mu = _check_distribution("mu", mu)
    nu = _check_distribution("nu", nu)
    if mu.shape != nu.shape:
        raise ValueError(f"length mismatch: {mu.shape[0]} vs {nu.shape[0]}")
    return float(0.5 * np.abs(mu - nu).sum())


def _line_embedding(metric: np.ndarray) -> np.ndarray | None:
    """Coordinates x with d(i, j) = |x_i - x_j|, or None if none exist."""
    n = metric.shape[0]
    x = np.zeros(n)
    if n > 1:
        x[1] = metric[0, 1]
        for i in range(2, n):
            # candidate on the positive side unless inconsistent with x[1]
            pos = metric[0, i]
            x[i] = pos if abs(abs(pos - x[1]) - metric[1, i]) <= 1e-12 else -pos
    recon = np.abs(x[:, None] - x[None, :])
    if np.max(np.abs(recon - metric)) <= 1e-12:
        return x
    return None


def _w1_line(mu: np.ndarray, nu: np.ndarray, coords: np.ndarray) -> float:
    """Exact 1-D transport cost: integral of |CDF difference|."""
    order = np.argsort(coords, kind="stable")
    gaps = np.diff(coords[order])
    cum = np.cumsum(mu[order] - nu[order])[:-1]
    return float(np.abs(cum) @ gaps)


def _w1_lp(mu: np.ndarray, nu: np.ndarray, metric: np.ndarray) -> float:
    """Exact transportation LP over couplings with marginals mu, nu."""
    n = len(mu)
    cost = metric.reshape(-1)
    a_eq = np.zeros((2 * n, n * n))
    for i in range(n):
        a_eq[i, i * n:(i + 1) * n] = 1.0       # row marginal
        a_eq[n + i, i::n] = 1.0                # column marginal
    result = linprog(cost, A_eq=a_eq, b_eq=np.concatenate([mu, nu]),
                     bounds=(0, None), method="highs")
    if not result.success:
        raise RuntimeError(f"transport LP failed: {result.message}")
    return float(result.fun)


def wasserstein1(mu, nu, metric) -> float:
    """Wasserstein-1 distance between two distributions on a finite metric.

    The minimum transport cost over couplings with the given marginals.
    When the metric embeds in the line (the default index metric always
    does), the cumulative-mass formula gives the exact answer directly;
    otherwise an exact LP is solved.
    """
    mu = _check_distribution("mu", mu)
    nu = _check_distribution("nu", nu)
    if mu.shape != nu.shape:
        raise ValueError(f"length mismatch: {mu.shape[0]} vs {nu.shape[0]}")
    metric = _check_metric(metric, len(mu))
    coords = _line_embedding(metric)
    if coords is not None:
        return _w1_line(mu, nu, coords)
    return _w1_lp(mu, nu, metric)


def span(f) -> float:
    """Span seminorm max(f) - min(f); zero exactly for constants."""
    f = np.asarray(f, dtype=np.float64)
    if f.size == 0:
        raise ValueError("span of an empty vector is undefined")
    return float(f.max() - f.min())


def lipschitz_constant(f, metric) -> float:
    """Largest difference quotient |f(s) - f(s')| / d(s, s') over pairs."""
    f = np.asarray(f, dtype=np.float64)
    if f.size < 2:
        raise ValueError("need at least two points for a Lipschitz constant")
    metric = _check_metric(metric, f.size)
    diff = np.abs(f[:, None] - f[None, :])
    off = ~np.eye(f.size, dtype=bool)
    return float(np.max(diff[off] / metric[off]))


def _shared_shape(g: MarkovGame, g_hat: MarkovGame) -> None:
    if g.states != g_hat.states:
        raise ValueError("games have different state sets")
    if g.action_sets != g_hat.action_sets:
        raise ValueError("games have different action sets")
    if g.discount != g_hat.discount:
        raise ValueError(
            f"games have different discounts: {g.discount} vs {g_hat.discount}"
        )


def comparison_metric(g: MarkovGame, g_hat: MarkovGame) -> np.ndarray:
    """Metric used to compare two games: theirs if present, else index line."""
    if g.metric is not None:
        return g.metric
    if g_hat.metric is not None:
        return g_hat.metric
    return default_line_metric(g.num_states)


def game_approx_params(g: MarkovGame, g_hat: MarkovGame,
                       ipm_kind: str) -> ApproximationParams:
    """Largest reward and transition gaps between two same-shape games.

    epsilon is the max absolute reward difference over players, states, and
    joint actions; delta is the max IPM between matching transition rows.
    """
    if ipm_kind not in IPM_KINDS:
        raise ValueError(f"unknown IPM kind {ipm_kind!r}")
    _shared_shape(g, g_hat)
    epsilon = float(np.max(np.abs(g.rewards - g_hat.rewards)))
    metric = comparison_metric(g, g_hat) if ipm_kind == WASSERSTEIN else None
    delta = 0.0
    for s in range(g.num_states):
        for j in range(g.num_joint_actions):
            if ipm_kind == TOTAL_VARIATION:
                d = tv_distance(g.transitions[s, j], g_hat.transitions[s, j])
            else:
                d = wasserstein1(g.transitions[s, j], g_hat.transitions[s, j],
                                 metric)
            delta = max(delta, d)
    return ApproximationParams(epsilon=epsilon, delta=delta, ipm_kind=ipm_kind)


def game_lipschitz_constants(game: MarkovGame,
                             metric: np.ndarray | None = None
                             ) -> tuple[float, float]:
    """Smallest (L_r, L_P) making the game Lipschitz in the state.

    L_r bounds reward differences across states (same action, any player)
    relative to the metric; L_P bounds the Wasserstein distance between
    transition rows across states. The game must carry a metric unless one
    is passed explicitly.
    """
    if metric is None:
        if game.metric is None:
            raise ValueError("game has no state metric")
        metric = game.metric
    metric = _check_metric(metric, game.num_states)
    l_r = 0.0
    l_p = 0.0
    for s1 in range(game.num_states):
        for s2 in range(s1 + 1, game.num_states):
            d = metric[s1, s2]
            for j in range(game.num_joint_actions):
                gap = float(np.max(np.abs(game.rewards[:, s1, j]
                                          - game.rewards[:, s2, j])))
                l_r = max(l_r, gap / d)
                w = wasserstein1(game.transitions[s1, j],
                                 game.transitions[s2, j], metric)
                l_p = max(l_p, w / d)
    return l_r, l_p
