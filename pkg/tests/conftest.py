import math
from pathlib import Path

import numpy as np
import pytest

from qcoord import angle_family, chsh_game, distribution_from_quantum, singlet_state
from qcoord.strategies import chsh_reference_strategy

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def singlet_table(theta1: float, theta2: float) -> np.ndarray:
    """Closed-form outcome table of the singlet at projective angles."""
    delta = theta2 - theta1
    return 0.5 * np.array([
        [math.sin(delta) ** 2, math.cos(delta) ** 2],
        [math.cos(delta) ** 2, math.sin(delta) ** 2],
    ])


def reference_families(game):
    strategy = chsh_reference_strategy()
    fam_a = angle_family({s: strategy.angles_a[s] for s in game.states_a})
    fam_b = angle_family({s: strategy.angles_b[s] for s in game.states_b})
    return fam_a, fam_b


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def chsh_quantum_dist():
    """Singlet measured at angles equal to the private states, uniform priors."""
    game = chsh_game()
    fam_a, fam_b = reference_families(game)
    return distribution_from_quantum(singlet_state(), fam_a, fam_b,
                                     game.prior_a, game.prior_b)
