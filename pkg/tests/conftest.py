import pytest

from mpekit.games import bundled_game
from mpekit.solver import solve_mpe


@pytest.fixture(scope="session")
def original_game():
    return bundled_game("two_player_original")


@pytest.fixture(scope="session")
def perturbed_game():
    return bundled_game("two_player_perturbed")


@pytest.fixture(scope="session")
def perturbed_mpe(perturbed_game):
    """Exact equilibrium of the bundled perturbed game, solved once."""
    result = solve_mpe(perturbed_game, tol=1e-10)
    assert result.converged
    return result
