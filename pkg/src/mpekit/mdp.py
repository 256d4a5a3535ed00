"""Bellman operators and exact planning for finite discounted MDPs.

Rewards are normalized: every backup scales the stage reward by (1 - gamma),
so value functions stay inside the reward range. Policy evaluation is a
direct linear solve; optimal values come from value iteration with a
certified a-posteriori stopping rule.
"""

from __future__ import annotations

import numpy as np

from .games import MarkovStrategy, Mdp, ValueFunction

#: Default solve tolerance; small relative to every quantity of interest.
DEFAULT_TOL = 1e-10

_MAX_SWEEPS = 5_000_000


def _check_dims(mdp: Mdp, strategy: MarkovStrategy | None = None,
                v: ValueFunction | None = None) -> None:
    if strategy is not None:
        expected = (mdp.num_states, mdp.num_actions)
        if strategy.probabilities.shape != expected:
            raise ValueError(
                f"strategy shape {strategy.probabilities.shape} does not "
                f"match MDP shape {expected}"
            )
    if v is not None and len(v) != mdp.num_states:
        raise ValueError(
            f"value function has {len(v)} entries for {mdp.num_states} states"
        )


def _action_values(mdp: Mdp, values: np.ndarray) -> np.ndarray:
    """q[s, a] = (1 - gamma) r(s, a) + gamma * sum_s' P(s'|s, a) v(s')."""
    gamma = mdp.discount
    return (1.0 - gamma) * mdp.rewards + gamma * mdp.transitions @ values


def bellman_policy(mdp: Mdp, strategy: MarkovStrategy,
                   v: ValueFunction) -> ValueFunction:
    """One application of the fixed-strategy Bellman operator."""
    _check_dims(mdp, strategy, v)
    q = _action_values(mdp, v.values)
    return ValueFunction((strategy.probabilities * q).sum(axis=1))


def bellman_optimal(mdp: Mdp, v: ValueFunction) -> ValueFunction:
    """One application of the optimality Bellman operator (max over actions)."""
    _check_dims(mdp, v=v)
    return ValueFunction(_action_values(mdp, v.values).max(axis=1))


def strategy_transitions(mdp: Mdp, strategy: MarkovStrategy) -> np.ndarray:
    """State transition matrix under a strategy: P_pi[s, s']."""
    _check_dims(mdp, strategy)
    return np.einsum("sa,sat->st", strategy.probabilities, mdp.transitions)


def strategy_rewards(mdp: Mdp, strategy: MarkovStrategy) -> np.ndarray:
    """Expected stage reward under a strategy: r_pi[s]."""
    _check_dims(mdp, strategy)
    return (strategy.probabilities * mdp.rewards).sum(axis=1)


def evaluate_policy(mdp: Mdp, strategy: MarkovStrategy) -> ValueFunction:
    """The unique fixed point of the fixed-strategy operator.

    Solves (I - gamma P_pi) V = (1 - gamma) r_pi directly, so the result is
    exact up to linear-algebra roundoff. The system is nonsingular for any
    discount below one.
    """
    gamma = mdp.discount
    p_pi = strategy_transitions(mdp, strategy)
    r_pi = strategy_rewards(mdp, strategy)
    matrix = np.eye(mdp.num_states) - gamma * p_pi
    return ValueFunction(np.linalg.solve(matrix, (1.0 - gamma) * r_pi))


def solve_optimal(mdp: Mdp, tol: float = DEFAULT_TOL
                  ) -> tuple[ValueFunction, MarkovStrategy]:
    """Optimal value function and a deterministic greedy strategy.

    Value iteration runs until successive sweeps differ by at most
    tol * (1 - gamma) / (2 gamma), which certifies a final value error of at
    most tol. Greedy ties break toward the lowest action index.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    gamma = mdp.discount
    threshold = tol * (1.0 - gamma) / (2.0 * gamma) if gamma > 0 else np.inf
    values = np.zeros(mdp.num_states)
    for _ in range(_MAX_SWEEPS):
        updated = _action_values(mdp, values).max(axis=1)
        change = np.max(np.abs(updated - values))
        values = updated
        if change <= threshold:
            break
    else:
        raise RuntimeError("value iteration failed to converge")
    greedy = np.argmax(_action_values(mdp, values), axis=1)
    probs = np.zeros((mdp.num_states, mdp.num_actions))
    probs[np.arange(mdp.num_states), greedy] = 1.0
    return ValueFunction(values), MarkovStrategy(probs)


def alpha_optimality(mdp: Mdp, strategy: MarkovStrategy,
                     tol: float = DEFAULT_TOL) -> float:
    """Largest per-state shortfall of a strategy against the optimum.

    Zero (up to tol) exactly for optimal strategies.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    optimal, _ = solve_optimal(mdp, tol)
    achieved = evaluate_policy(mdp, strategy)
    return float(np.max(optimal.values - achieved.values))
