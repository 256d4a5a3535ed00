"""Shared generators and independent oracles used across the test suite.

Oracles here deliberately avoid the library's computation paths: policy
values come from exhaustive enumeration or direct linear algebra, transport
costs from scanning every basic coupling, and equilibrium checks from raw
deviation enumeration.
"""

from __future__ import annotations

import itertools

import numpy as np

from mpekit.games import MarkovGame, MarkovStrategy, Mdp, StrategyProfile


def random_mdp(rng, num_states=3, num_actions=2, discount=0.9,
               reward_low=0.0, reward_high=1.0) -> Mdp:
    transitions = rng.dirichlet(np.ones(num_states),
                                size=(num_states, num_actions))
    rewards = rng.uniform(reward_low, reward_high, size=(num_states, num_actions))
    return Mdp(
        states=tuple(str(s) for s in range(num_states)),
        actions=tuple(str(a) for a in range(num_actions)),
        transitions=transitions,
        rewards=rewards,
        discount=discount,
    )


def random_game(rng, num_states=3, action_counts=(2, 2), discount=0.9,
                reward_low=0.0, reward_high=1.0) -> MarkovGame:
    num_players = len(action_counts)
    num_joint = int(np.prod(action_counts))
    transitions = rng.dirichlet(np.ones(num_states),
                                size=(num_states, num_joint))
    rewards = rng.uniform(reward_low, reward_high,
                          size=(num_players, num_states, num_joint))
    return MarkovGame(
        states=tuple(str(s) for s in range(num_states)),
        action_sets=tuple(tuple(str(a) for a in range(c))
                          for c in action_counts),
        transitions=transitions,
        rewards=rewards,
        discount=discount,
    )


def random_strategy(rng, num_states, num_actions) -> MarkovStrategy:
    return MarkovStrategy(rng.dirichlet(np.ones(num_actions), size=num_states))


def random_profile(rng, game: MarkovGame) -> StrategyProfile:
    return StrategyProfile(tuple(
        random_strategy(rng, game.num_states, count)
        for count in game.action_counts
    ))


def perturb_game(rng, game: MarkovGame, reward_noise=0.01,
                 transition_noise=0.05) -> MarkovGame:
    """A nearby game: bounded reward shift, renormalized transition shift."""
    rewards = game.rewards + rng.uniform(-reward_noise, reward_noise,
                                         size=game.rewards.shape)
    mix = rng.dirichlet(np.ones(game.num_states),
                        size=game.transitions.shape[:2])
    transitions = (1.0 - transition_noise) * game.transitions \
        + transition_noise * mix
    return MarkovGame(
        states=game.states,
        action_sets=game.action_sets,
        transitions=transitions,
        rewards=rewards,
        discount=game.discount,
        metric=game.metric,
    )


def deterministic_policies(num_states, num_actions):
    """Every deterministic strategy as a one-hot probability matrix."""
    for assignment in itertools.product(range(num_actions), repeat=num_states):
        probs = np.zeros((num_states, num_actions))
        probs[np.arange(num_states), assignment] = 1.0
        yield MarkovStrategy(probs)


def policy_value_direct(mdp: Mdp, strategy: MarkovStrategy) -> np.ndarray:
    """Policy value by direct matrix inversion, independent of the library."""
    pi = strategy.probabilities
    p_pi = np.einsum("sa,sat->st", pi, mdp.transitions)
    r_pi = (pi * mdp.rewards).sum(axis=1)
    gamma = mdp.discount
    return np.linalg.inv(np.eye(mdp.num_states) - gamma * p_pi) \
        @ ((1.0 - gamma) * r_pi)


def best_deterministic_value(mdp: Mdp) -> np.ndarray:
    """Componentwise best value over every deterministic strategy."""
    best = None
    for strategy in deterministic_policies(mdp.num_states, mdp.num_actions):
        value = policy_value_direct(mdp, strategy)
        best = value if best is None else np.maximum(best, value)
    return best


def transport_cost_tree_oracle(mu, nu, metric) -> float:
    """Minimum transport cost by scanning every basic coupling.

    A basic feasible solution of the transportation polytope is supported
    on a spanning forest of the complete bipartite graph, so scanning all
    edge sets of size n + m - 1 that span the nodes (solving each by leaf
    elimination) visits every vertex. Exponential, fine for <= 4 points.
    """
    mu = np.asarray(mu, dtype=np.float64)
    nu = np.asarray(nu, dtype=np.float64)
    n, m = len(mu), len(nu)
    cells = [(i, j) for i in range(n) for j in range(m)]
    best = np.inf
    for edges in itertools.combinations(cells, n + m - 1):
        degree: dict = {}
        incident: dict = {}
        for (i, j) in edges:
            u, v = ("r", i), ("c", j)
            degree[u] = degree.get(u, 0) + 1
            degree[v] = degree.get(v, 0) + 1
            incident.setdefault(u, []).append(((i, j), v))
            incident.setdefault(v, []).append(((i, j), u))
        if len(degree) != n + m:
            continue
        remaining = {("r", i): mu[i] for i in range(n)}
        remaining.update({("c", j): nu[j] for j in range(m)})
        unused = set(edges)
        flow = {}
        feasible = True
        for _ in range(n + m - 1):
            leaf = next((u for u, d in degree.items() if d == 1), None)
            if leaf is None:  # contains a cycle
                feasible = False
                break
            edge, other = next(
                (e for e in incident[leaf] if e[0] in unused)
            )
            flow[edge] = remaining[leaf]
            remaining[other] -= remaining[leaf]
            remaining[leaf] = 0.0
            unused.discard(edge)
            degree[leaf] -= 1
            degree[other] -= 1
        if not feasible:
            continue
        amounts = np.array(list(flow.values()))
        if np.all(amounts >= -1e-12):
            cost = sum(amount * metric[edge] for edge, amount in flow.items())
            best = min(best, float(cost))
    return best


def nash_deviation_gain(payoff_a, payoff_b, x, y) -> float:
    """Largest unilateral improvement available against (x, y)."""
    row = payoff_a @ y
    col = x @ payoff_b
    return max(float(row.max() - x @ row), float(col.max() - col @ y))
