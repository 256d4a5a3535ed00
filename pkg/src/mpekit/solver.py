"""Two-player equilibrium solver with a-posteriori certification.

Best-response dynamics in general-sum games are not a contraction, so no
iterative scheme is guaranteed to converge. The contract here is therefore
the certificate, not the iteration: the solver runs equilibrium value
iteration (per state, solve the one-shot game whose payoffs fold in the
continuation values), then certifies whatever profile it lands on against
the input game. Non-convergence is reported, with the best certified
iterate still returned so the caller can decide.

Stage games are solved exactly by support enumeration, with deterministic
selection (smallest support first, then lexicographic), which keeps the
iteration and the experiments reproducible bit for bit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .equilibrium import CertificateAlpha, certify_profile
from .games import MarkovGame, MarkovStrategy, StrategyProfile, ValueFunction

_NASH_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SolveResult:
    """A solved profile plus the evidence for it.

    ``certificate`` is always computed against the input game;
    ``converged`` means the certified gap met the requested tolerance.
    """

    profile: StrategyProfile
    values: tuple[ValueFunction, ...]
    certificate: CertificateAlpha
    iterations: int
    converged: bool


def stage_game(game: MarkovGame, values, state: int
               ) -> tuple[np.ndarray, np.ndarray]:
    """One-shot payoff matrices at a state, given continuation values.

    Entry (a1, a2) for player i is the normalized stage reward plus the
    discounted expected continuation value.
    """
    if game.num_players != 2:
        raise ValueError("stage games are built for two-player games only")
    if not 0 <= state < game.num_states:
        raise ValueError(f"state {state} out of range [0, {game.num_states})")
    vals = [np.asarray(getattr(v, "values", v), dtype=np.float64)
            for v in values]
    if len(vals) != 2:
        raise ValueError("need one value vector per player")
    gamma = game.discount
    counts = game.action_counts
    payoff_a = np.zeros(counts)
    payoff_b = np.zeros(counts)
    for j, (a1, a2) in enumerate(game.joint_actions()):
        cont = game.transitions[state, j]
        payoff_a[a1, a2] = ((1.0 - gamma) * game.rewards[0, state, j]
                            + gamma * cont @ vals[0])
        payoff_b[a1, a2] = ((1.0 - gamma) * game.rewards[1, state, j]
                            + gamma * cont @ vals[1])
    return payoff_a, payoff_b


def _support_candidate(payoff_a, payoff_b, rows, cols):
    """Mixed pair supported on (rows, cols), or None if the equalizing
    system has no acceptable solution."""
    k1, k2 = len(rows), len(cols)
    # Column player's mixture equalizes the row player's supported payoffs.
    m1 = np.zeros((k1 + 1, k2 + 1))
    m1[:k1, :k2] = payoff_a[np.ix_(rows, cols)]
    m1[:k1, k2] = -1.0
    m1[k1, :k2] = 1.0
    rhs1 = np.zeros(k1 + 1)
    rhs1[k1] = 1.0
    # Row player's mixture equalizes the column player's supported payoffs.
    m2 = np.zeros((k2 + 1, k1 + 1))
    m2[:k2, :k1] = payoff_b[np.ix_(rows, cols)].T
    m2[:k2, k1] = -1.0
    m2[k2, :k1] = 1.0
    rhs2 = np.zeros(k2 + 1)
    rhs2[k2] = 1.0
    try:
        if k1 == k2:
            sol1 = np.linalg.solve(m1, rhs1)
            sol2 = np.linalg.solve(m2, rhs2)
        else:
            sol1 = np.linalg.lstsq(m1, rhs1, rcond=None)[0]
            sol2 = np.linalg.lstsq(m2, rhs2, rcond=None)[0]
            if np.max(np.abs(m1 @ sol1 - rhs1)) > _NASH_TOL:
                return None
            if np.max(np.abs(m2 @ sol2 - rhs2)) > _NASH_TOL:
                return None
    except np.linalg.LinAlgError:
        return None
    y_support, x_support = sol1[:k2], sol2[:k1]
    if np.any(y_support < -_NASH_TOL) or np.any(x_support < -_NASH_TOL):
        return None
    x = np.zeros(payoff_a.shape[0])
    y = np.zeros(payoff_a.shape[1])
    x[list(rows)] = np.clip(x_support, 0.0, None)
    y[list(cols)] = np.clip(y_support, 0.0, None)
    x /= x.sum()
    y /= y.sum()
    return x, y


def _deviation_gain(payoff_a, payoff_b, x, y) -> float:
    row_payoffs = payoff_a @ y
    col_payoffs = x @ payoff_b
    return max(float(row_payoffs.max() - x @ row_payoffs),
               float(col_payoffs.max() - col_payoffs @ y))


def bimatrix_nash(payoff_a, payoff_b
                  ) -> tuple[np.ndarray, np.ndarray, tuple[float, float]]:
    """A Nash equilibrium of a finite two-player game, by support enumeration.

    Support pairs are scanned in a fixed order (total support size, then row
    support size, then lexicographic supports) and the first pair passing
    the deviation check within 1e-9 is returned, which makes the selection
    deterministic and biased toward pure equilibria. Existence is guaranteed
    for finite games, so the scan cannot come up empty; on numerically
    degenerate input the candidate with the smallest deviation gain is
    returned.

    Returns:
        (x, y, (payoff_x, payoff_y)) with x, y mixed strategies.
    """
    payoff_a = np.asarray(payoff_a, dtype=np.float64)
    payoff_b = np.asarray(payoff_b, dtype=np.float64)
    if payoff_a.shape != payoff_b.shape or payoff_a.ndim != 2:
        raise ValueError("payoff matrices must share a 2-D shape")
    if not (np.all(np.isfinite(payoff_a)) and np.all(np.isfinite(payoff_b))):
        raise ValueError("payoff entries must be finite")
    m, n = payoff_a.shape
    fallback = None
    fallback_gain = np.inf
    for total in range(2, m + n + 1):
        for k1 in range(max(1, total - n), min(m, total - 1) + 1):
            k2 = total - k1
            for rows in itertools.combinations(range(m), k1):
                for cols in itertools.combinations(range(n), k2):
                    candidate = _support_candidate(payoff_a, payoff_b,
                                                   rows, cols)
                    if candidate is None:
                        continue
                    x, y = candidate
                    gain = _deviation_gain(payoff_a, payoff_b, x, y)
                    if gain <= _NASH_TOL:
                        return x, y, (float(x @ payoff_a @ y),
                                      float(x @ payoff_b @ y))
                    if gain < fallback_gain:
                        fallback, fallback_gain = (x, y), gain
    x, y = fallback
    return x, y, (float(x @ payoff_a @ y), float(x @ payoff_b @ y))


def _iterate(game: MarkovGame, v: np.ndarray
             ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One sweep of equilibrium value iteration; returns (v', pi1, pi2)."""
    num_states = game.num_states
    new_v = np.zeros_like(v)
    pi1 = np.zeros((num_states, game.action_counts[0]))
    pi2 = np.zeros((num_states, game.action_counts[1]))
    for s in range(num_states):
        payoff_a, payoff_b = stage_game(game, list(v), s)
        x, y, (pay_x, pay_y) = bimatrix_nash(payoff_a, payoff_b)
        pi1[s], pi2[s] = x, y
        new_v[0, s], new_v[1, s] = pay_x, pay_y
    return new_v, pi1, pi2


def solve_mpe(game: MarkovGame, tol: float = 1e-8, max_iter: int = 10_000,
              seed: int = 0) -> SolveResult:
    """Compute and certify a Markov perfect equilibrium of a two-player game.

    Equilibrium value iteration from zero values, stopping once successive
    sweeps differ by at most tol (1 - gamma) / (2 gamma). The resulting
    profile is certified against the input game; ``converged`` is true iff
    the certified gap is at most tol. If the sweep budget runs out, the
    iteration restarts from seeded random values (up to two restarts) and
    the best certified iterate seen anywhere is returned.
    """
    if game.num_players != 2:
        raise ValueError("two-player solver only")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be positive")
    gamma = game.discount
    threshold = tol * (1.0 - gamma) / (2.0 * gamma) if gamma > 0 else np.inf
    rng = np.random.default_rng(seed)
    rmin, rmax = float(game.rewards.min()), float(game.rewards.max())

    snapshot_every = max(1, max_iter // 10)
    iterations = 0
    best: tuple[float, StrategyProfile, CertificateAlpha] | None = None

    for attempt in range(3):
        if attempt == 0:
            v = np.zeros((2, game.num_states))
        else:
            v = rng.uniform(rmin, rmax, size=(2, game.num_states))
        candidates = []
        for sweep in range(max_iter):
            new_v, pi1, pi2 = _iterate(game, v)
            change = float(np.max(np.abs(new_v - v)))
            v = new_v
            iterations += 1
            if change <= threshold:
                break
            if (sweep + 1) % snapshot_every == 0:
                candidates.append((pi1.copy(), pi2.copy()))
        candidates.append((pi1, pi2))

        seen = set()
        for cand1, cand2 in reversed(candidates):
            key = (cand1.tobytes(), cand2.tobytes())
            if key in seen:
                continue
            seen.add(key)
            profile = StrategyProfile(
                (MarkovStrategy(cand1), MarkovStrategy(cand2))
            )
            certificate = certify_profile(game, profile)
            gap = certificate.max_alpha
            if best is None or gap < best[0]:
                best = (gap, profile, certificate)
            if gap <= tol:
                break
        if best[0] <= tol:
            break
        # Either the sweeps cycled, or they settled on a profile that still
        # fails the certificate; the next attempt restarts from random
        # values inside the reward envelope.

    gap, profile, certificate = best
    return SolveResult(
        profile=profile,
        values=certificate.per_player_value,
        certificate=certificate,
        iterations=iterations,
        converged=gap <= tol,
    )
