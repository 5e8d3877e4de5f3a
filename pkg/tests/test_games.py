import itertools
import math

import numpy as np
import pytest

from qcoord import (
    BehaviorTable,
    ConditionalStrategy,
    EnumerationCapExceeded,
    Game,
    ShapeMismatch,
    ValidationError,
    chsh_game,
    classical_value,
    expected_payoff,
    product_behavior,
)
from qcoord.sampling import random_game, random_local_mixture_behavior
from conftest import singlet_table


def brute_force_pairs(game):
    """Oracle: enumerate every deterministic strategy pair directly."""
    n_a, n_b = len(game.actions_a), len(game.actions_b)
    n_phi, n_psi = len(game.states_a), len(game.states_b)
    best = -math.inf
    best_pair = None
    values = []
    for fa in itertools.product(range(n_a), repeat=n_phi):
        for fb in itertools.product(range(n_b), repeat=n_psi):
            behavior = product_behavior(
                ConditionalStrategy.deterministic(fa, n_a),
                ConditionalStrategy.deterministic(fb, n_b),
            )
            value = expected_payoff(game, behavior)
            values.append(value)
            if value > best:
                best = value
                best_pair = (fa, fb)
    return best, best_pair, values


def test_chsh_payoff_rule():
    game = chsh_game()
    # opposite actions required off the exceptional cell
    assert game.payoff[0, 1, 0, 1] == 1.0
    # equal actions required on the exceptional cell (pi/4, -pi/8)
    assert game.payoff[0, 0, 1, 0] == 1.0
    for a, b, f, w in itertools.product(range(2), repeat=4):
        expected = (a == b) if (f, w) == (1, 0) else (a != b)
        assert game.payoff[a, b, f, w] == (1.0 if expected else 0.0)


def test_chsh_classical_value_is_exactly_three_quarters():
    solution = classical_value(chsh_game())
    assert solution.value == 0.75


def test_chsh_classical_strategies_achieve_the_value():
    game = chsh_game()
    solution = classical_value(game)
    fa = tuple(game.actions_a.index(solution.strategy_a[s]) for s in game.states_a)
    fb = tuple(game.actions_b.index(solution.strategy_b[s]) for s in game.states_b)
    behavior = product_behavior(
        ConditionalStrategy.deterministic(fa, 2), ConditionalStrategy.deterministic(fb, 2)
    )
    assert expected_payoff(game, behavior) == pytest.approx(0.75, abs=1e-15)


def test_always_opposite_strategy_scores_three_quarters():
    game = chsh_game()
    behavior = product_behavior(
        ConditionalStrategy.deterministic((0, 0), 2),
        ConditionalStrategy.deterministic((1, 1), 2),
    )
    assert expected_payoff(game, behavior) == pytest.approx(0.75, abs=1e-15)


def test_quantum_closed_form_behavior_beats_classical():
    game = chsh_game()
    angles_a = {"0": 0.0, "pi/4": math.pi / 4}
    angles_b = {"-pi/8": -math.pi / 8, "pi/8": math.pi / 8}
    q = np.zeros((2, 2, 2, 2))
    for fi, f in enumerate(game.states_a):
        for wi, w in enumerate(game.states_b):
            q[:, :, fi, wi] = singlet_table(angles_a[f], angles_b[w])
    value = expected_payoff(game, BehaviorTable(q))
    assert value == pytest.approx(math.cos(math.pi / 8) ** 2, abs=1e-12)


def test_uniform_behavior_payoff_is_weighted_average():
    rng = np.random.default_rng(61)
    game = random_game(rng, n_states=(3, 2), n_actions=(2, 3))
    uniform = BehaviorTable(np.full(game.shape, 1.0 / 6.0))
    expected = float(
        np.einsum("abfw,f,w->", game.payoff, game.prior_a, game.prior_b) / 6.0
    )
    assert expected_payoff(game, uniform) == pytest.approx(expected, abs=1e-12)


def test_expected_payoff_shape_mismatch():
    game = chsh_game()
    with pytest.raises(ShapeMismatch):
        expected_payoff(game, BehaviorTable(np.full((2, 2, 2, 3), 1.0 / 4.0)))


def test_expected_payoff_linear_in_behavior():
    rng = np.random.default_rng(67)
    game = random_game(rng)
    b1 = random_local_mixture_behavior(game, rng)
    b2 = random_local_mixture_behavior(game, rng)
    for lam in (0.0, 0.25, 0.6, 1.0):
        mixed = BehaviorTable(lam * b1.table + (1 - lam) * b2.table)
        direct = lam * expected_payoff(game, b1) + (1 - lam) * expected_payoff(game, b2)
        assert expected_payoff(game, mixed) == pytest.approx(direct, abs=1e-12)


def test_constant_payoff_game():
    game = Game(("f0",), ("w0", "w1"), (1.0,), (0.5, 0.5), ("a0", "a1"), ("b0", "b1"),
                np.full((2, 2, 1, 2), 0.375))
    solution = classical_value(game)
    assert solution.value == pytest.approx(0.375, abs=1e-15)


def test_match_own_state_game_is_winnable():
    payoff = np.zeros((2, 2, 2, 2))
    for a, b, f, w in itertools.product(range(2), repeat=4):
        payoff[a, b, f, w] = 1.0 if a == f else 0.0
    game = Game(("0", "1"), ("0", "1"), (0.5, 0.5), (0.5, 0.5), ("0", "1"), ("0", "1"), payoff)
    solution = classical_value(game)
    assert solution.value == pytest.approx(1.0, abs=1e-15)
    assert solution.strategy_a == {"0": "0", "1": "1"}


def test_classical_value_matches_pair_enumeration_oracle():
    rng = np.random.default_rng(71)
    for _ in range(25):
        shape = (int(rng.integers(2, 4)), int(rng.integers(2, 4)))
        actions = (int(rng.integers(2, 4)), int(rng.integers(2, 4)))
        game = random_game(rng, n_states=shape, n_actions=actions)
        oracle_value, oracle_pair, values = brute_force_pairs(game)
        solution = classical_value(game)
        assert solution.value == pytest.approx(oracle_value, abs=1e-12)
        ties = sum(1 for v in values if v > oracle_value - 1e-9)
        if ties == 1:
            fa = tuple(game.actions_a.index(solution.strategy_a[s]) for s in game.states_a)
            fb = tuple(game.actions_b.index(solution.strategy_b[s]) for s in game.states_b)
            assert (fa, fb) == oracle_pair


def test_classical_value_ties_break_lexicographically():
    # every strategy pair scores the same, so the all-zeros pair must win
    game = Game(("f0", "f1"), ("w0",), (0.5, 0.5), (1.0,), ("x", "y"), ("u", "v"),
                np.ones((2, 2, 2, 1)))
    solution = classical_value(game)
    assert solution.strategy_a == {"f0": "x", "f1": "x"}
    assert solution.strategy_b == {"w0": "u"}


def test_classical_value_bounds_shared_randomness_behaviors():
    rng = np.random.default_rng(73)
    game = random_game(rng)
    bound = classical_value(game).value
    for _ in range(1000):
        behavior = random_local_mixture_behavior(game, rng, n_components=int(rng.integers(1, 6)))
        assert expected_payoff(game, behavior) <= bound + 1e-12


def test_classical_value_invariant_under_relabeling():
    rng = np.random.default_rng(79)
    game = random_game(rng, n_states=(2, 3), n_actions=(3, 2))
    base = classical_value(game).value
    for _ in range(10):
        perm_a = rng.permutation(3)
        perm_f = rng.permutation(2)
        perm_w = rng.permutation(3)
        shuffled = Game(
            states_a=tuple(game.states_a[i] for i in perm_f),
            states_b=tuple(game.states_b[i] for i in perm_w),
            prior_a=game.prior_a[perm_f],
            prior_b=game.prior_b[perm_w],
            actions_a=tuple(game.actions_a[i] for i in perm_a),
            actions_b=game.actions_b,
            payoff=game.payoff[np.ix_(perm_a, range(2), perm_f, perm_w)],
        )
        assert classical_value(shuffled).value == pytest.approx(base, abs=1e-12)


def test_enumeration_cap():
    payoff = np.zeros((2, 2, 12, 12))
    labels_12 = tuple(str(i) for i in range(12))
    prior = np.full(12, 1.0 / 12.0)
    game = Game(labels_12, labels_12, prior, prior, ("0", "1"), ("0", "1"), payoff)
    with pytest.raises(EnumerationCapExceeded):
        classical_value(game)


def test_prior_validation_names_the_field():
    with pytest.raises(ValidationError, match="prior_a"):
        Game(("0", "1"), ("0",), (0.5, 0.4), (1.0,), ("0", "1"), ("0", "1"),
             np.zeros((2, 2, 2, 1)))
    with pytest.raises(ValidationError, match="prior_b"):
        Game(("0",), ("0", "1"), (1.0,), (-0.2, 1.2), ("0", "1"), ("0", "1"),
             np.zeros((2, 2, 1, 2)))


def test_behavior_validation():
    with pytest.raises(ValidationError):
        BehaviorTable(np.full((2, 2, 1, 1), 0.3))
    with pytest.raises(ValidationError):
        BehaviorTable(np.array([[[[0.6]], [[0.6]]], [[[0.6]], [[-0.8]]]]))
