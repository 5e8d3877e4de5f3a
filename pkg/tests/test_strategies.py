import math

import numpy as np
import pytest

from qcoord import (
    DensityMatrix,
    DimensionMismatch,
    Game,
    IncompatibleLabels,
    InvalidConfig,
    NonBinaryActions,
    angle_family,
    behavior_from_profile,
    chsh_game,
    check_disjoint,
    distribution_from_quantum,
    evaluate_qubit_strategy,
    maximally_mixed,
    optimize_angles,
    pure_state,
    seesaw_optimize,
    singlet_state,
    validate_povm,
)
from qcoord.strategies import (
    OptimizerConfig,
    QuantumStrategyProfile,
    QubitAngleStrategy,
    _SeesawEngine,
    _angle_payoff_fn,
    chsh_reference_strategy,
)
from qcoord.sampling import random_density_matrix
from conftest import reference_families, singlet_table

QUANTUM_TARGET = math.cos(math.pi / 8) ** 2


@pytest.fixture(scope="module")
def game():
    return chsh_game()


@pytest.fixture(scope="module")
def singlet():
    return singlet_state()


def test_behavior_from_profile_reference_cell(game, singlet):
    fam_a, fam_b = reference_families(game)
    profile = QuantumStrategyProfile(singlet, fam_a, fam_b)
    behavior = behavior_from_profile(profile, game)
    cell = behavior.table[:, :, 0, 1]  # state_a "0", state_b "pi/8"
    assert np.allclose(cell, singlet_table(0.0, math.pi / 8), atol=1e-10)


def test_behavior_from_profile_maximally_mixed_is_uniform(game):
    fam_a, fam_b = reference_families(game)
    profile = QuantumStrategyProfile(maximally_mixed(4), fam_a, fam_b)
    behavior = behavior_from_profile(profile, game)
    assert np.allclose(behavior.table, 0.25, atol=1e-12)


def test_behavior_from_profile_product_state_plays_00(game):
    shared = DensityMatrix(np.kron(pure_state([1, 0]).matrix, pure_state([1, 0]).matrix))
    fam = angle_family({s: 0.0 for s in game.states_a})
    fam_b = angle_family({s: 0.0 for s in game.states_b})
    profile = QuantumStrategyProfile(shared, fam, fam_b)
    behavior = behavior_from_profile(profile, game)
    assert np.allclose(behavior.table[0, 0], 1.0, atol=1e-12)


def test_behavior_from_profile_outcome_relabeling(game, singlet):
    fam_a, fam_b = reference_families(game)
    swapped = QuantumStrategyProfile(singlet, fam_a, fam_b,
                                     outcome_to_action_a=(1, 0))
    plain = behavior_from_profile(QuantumStrategyProfile(singlet, fam_a, fam_b), game)
    flipped = behavior_from_profile(swapped, game)
    assert np.allclose(flipped.table, plain.table[::-1, :, :, :], atol=1e-14)


def test_behavior_from_profile_rejects_foreign_labels(game, singlet):
    fam_a = angle_family({"x": 0.0, "y": 0.1})
    _, fam_b = reference_families(game)
    with pytest.raises(IncompatibleLabels):
        behavior_from_profile(QuantumStrategyProfile(singlet, fam_a, fam_b), game)


def test_profile_dimension_check(game):
    fam_a, fam_b = reference_families(game)
    with pytest.raises(DimensionMismatch):
        QuantumStrategyProfile(maximally_mixed(2), fam_a, fam_b)


def test_behaviors_from_profiles_are_disjoint(game):
    # measurement statistics never leak the other player's state
    rng = np.random.default_rng(107)
    for _ in range(25):
        shared = random_density_matrix(4, rng)
        fam_a = angle_family({s: rng.uniform(0, math.pi) for s in game.states_a})
        fam_b = angle_family({s: rng.uniform(0, math.pi) for s in game.states_b})
        dist = distribution_from_quantum(shared, fam_a, fam_b, game.prior_a, game.prior_b)
        assert check_disjoint(dist).max_violation < 1e-10


def test_evaluate_reference_strategy_hits_quantum_value(game, singlet):
    value = evaluate_qubit_strategy(game, chsh_reference_strategy(), singlet)
    assert value == pytest.approx(QUANTUM_TARGET, abs=1e-10)


def test_evaluate_zero_angles_scores_three_quarters(game, singlet):
    strategy = QubitAngleStrategy({s: 0.0 for s in game.states_a},
                                  {s: 0.0 for s in game.states_b})
    assert evaluate_qubit_strategy(game, strategy, singlet) == pytest.approx(0.75, abs=1e-12)


def test_evaluate_on_maximally_mixed_equals_uniform_payoff(game):
    strategy = chsh_reference_strategy()
    value = evaluate_qubit_strategy(game, strategy, maximally_mixed(4))
    uniform = float(game.payoff.mean(axis=(0, 1)).mean())
    assert value == pytest.approx(uniform, abs=1e-12)
    assert value == pytest.approx(0.5, abs=1e-12)


def test_evaluate_angle_shift_symmetry_on_singlet(game, singlet):
    rng = np.random.default_rng(109)
    base = chsh_reference_strategy()
    reference = evaluate_qubit_strategy(game, base, singlet)
    for delta in rng.uniform(-math.pi, math.pi, 8):
        shifted = QubitAngleStrategy(
            {k: v + delta for k, v in base.angles_a.items()},
            {k: v + delta for k, v in base.angles_b.items()},
        )
        assert evaluate_qubit_strategy(game, shifted, singlet) == pytest.approx(
            reference, abs=1e-10
        )


def test_evaluate_requires_binary_actions(singlet):
    game3 = Game(("0",), ("0",), (1.0,), (1.0,), ("0", "1", "2"), ("0", "1"),
                 np.zeros((3, 2, 1, 1)))
    strategy = QubitAngleStrategy({"0": 0.0}, {"0": 0.0})
    with pytest.raises(NonBinaryActions):
        evaluate_qubit_strategy(game3, strategy, singlet)


def test_angle_payoff_fn_agrees_with_public_evaluation(game, singlet):
    fn = _angle_payoff_fn(game, singlet)
    rng = np.random.default_rng(113)
    thetas = rng.uniform(0, math.pi, size=(20, 4))
    fast = fn(thetas)
    for row, batch_value in zip(thetas, fast):
        strategy = QubitAngleStrategy(
            {s: row[i] for i, s in enumerate(game.states_a)},
            {s: row[2 + i] for i, s in enumerate(game.states_b)},
        )
        slow = evaluate_qubit_strategy(game, strategy, singlet)
        assert batch_value == pytest.approx(slow, abs=1e-12)


def test_optimize_angles_reaches_quantum_value(game, singlet):
    strategy, value = optimize_angles(game, singlet)
    assert value >= QUANTUM_TARGET - 1e-6
    assert value <= QUANTUM_TARGET + 1e-9
    # the winning angles reproduce the value through the public path
    assert evaluate_qubit_strategy(game, strategy, singlet) == pytest.approx(value, abs=1e-12)


def test_optimize_angles_value_at_least_grid_best(game, singlet):
    cfg = OptimizerConfig(grid_points=6, refine_iterations=40, restarts=2, seed=5)
    _, value = optimize_angles(game, singlet, cfg)
    fn = _angle_payoff_fn(game, singlet)
    axis = np.linspace(0.0, math.pi, 6, endpoint=False)
    mesh = np.stack(np.meshgrid(*([axis] * 4), indexing="ij"), axis=-1).reshape(-1, 4)
    assert value >= fn(mesh).max() - 1e-12


def test_optimize_angles_deterministic(game, singlet):
    cfg = OptimizerConfig(grid_points=8, refine_iterations=60, restarts=3, seed=42)
    s1, v1 = optimize_angles(game, singlet, cfg)
    s2, v2 = optimize_angles(game, singlet, cfg)
    assert v1 == v2
    assert dict(s1.angles_a) == dict(s2.angles_a)
    assert dict(s1.angles_b) == dict(s2.angles_b)


def test_optimize_angles_threads_do_not_change_results(game, singlet):
    cfg = OptimizerConfig(grid_points=8, refine_iterations=60, restarts=5, seed=17)
    _, serial = optimize_angles(game, singlet, cfg, threads=1)
    _, pooled = optimize_angles(game, singlet, cfg, threads=4)
    assert serial == pooled


def test_optimize_angles_on_maximally_mixed_has_no_advantage(game):
    cfg = OptimizerConfig(grid_points=6, refine_iterations=40, restarts=3, seed=3)
    _, value = optimize_angles(game, maximally_mixed(4), cfg)
    assert value <= 0.75 + 1e-9
    assert value == pytest.approx(0.5, abs=1e-9)


def test_optimize_angles_constant_payoff(singlet):
    constant = Game(("0", "1"), ("0", "1"), (0.5, 0.5), (0.5, 0.5), ("0", "1"), ("0", "1"),
                    np.full((2, 2, 2, 2), 0.625))
    cfg = OptimizerConfig(grid_points=4, refine_iterations=10, restarts=1, seed=0)
    _, value = optimize_angles(constant, singlet, cfg)
    assert value == pytest.approx(0.625, abs=1e-12)


def test_optimizer_config_validation():
    with pytest.raises(InvalidConfig):
        OptimizerConfig(grid_points=0)
    with pytest.raises(InvalidConfig):
        OptimizerConfig(restarts=-1)
    with pytest.raises(InvalidConfig):
        OptimizerConfig(tolerance=0.0)
    with pytest.raises(InvalidConfig):
        OptimizerConfig(seed=1.5)


def test_optimize_angles_grid_cap(game, singlet):
    with pytest.raises(InvalidConfig):
        optimize_angles(game, singlet, OptimizerConfig(grid_points=100))


def test_seesaw_reaches_quantum_value(game, singlet):
    cfg = OptimizerConfig(restarts=6, refine_iterations=60, seed=23)
    profile, value = seesaw_optimize(game, singlet, cfg)
    assert value >= QUANTUM_TARGET - 1e-6
    assert value <= QUANTUM_TARGET + 1e-9
    for fam in (profile.family_a, profile.family_b):
        for label in fam.labels:
            assert validate_povm(fam[label]).passed


def test_seesaw_constant_payoff_converges_in_one_sweep(singlet):
    constant = Game(("0", "1"), ("0", "1"), (0.5, 0.5), (0.5, 0.5), ("0", "1"), ("0", "1"),
                    np.full((2, 2, 2, 2), 0.3))
    engine = _SeesawEngine(constant, singlet, (2, 2))
    rng = np.random.default_rng(0)
    ms = engine.random_binary_families(rng, 4, 2, 2)
    ns = engine.random_binary_families(rng, 4, 2, 2)
    _, _, values, history = engine.sweep(ms, ns, 1, 1e-10)
    assert np.allclose(values, 0.3, atol=1e-12)


def test_seesaw_value_sequence_is_monotone(game, singlet):
    engine = _SeesawEngine(game, singlet, (2, 2))
    rng = np.random.default_rng(31)
    ms = engine.random_binary_families(rng, 16, 2, 2)
    ns = engine.random_binary_families(rng, 16, 2, 2)
    _, _, _, history = engine.sweep(ms, ns, 50, 1e-12)
    assert np.diff(history, axis=0).min() >= -1e-12


def test_seesaw_product_state_cannot_beat_classical(game):
    shared = DensityMatrix(np.kron(pure_state([1, 0]).matrix, pure_state([1, 0]).matrix))
    cfg = OptimizerConfig(restarts=8, refine_iterations=40, seed=7)
    _, value = seesaw_optimize(game, shared, cfg)
    assert value <= 0.75 + 1e-9


def test_seesaw_requires_binary_actions(singlet):
    game3 = Game(("0",), ("0",), (1.0,), (1.0,), ("0", "1", "2"), ("0", "1"),
                 np.zeros((3, 2, 1, 1)))
    with pytest.raises(NonBinaryActions):
        seesaw_optimize(game3, singlet)


def test_seesaw_deterministic_and_thread_stable(game, singlet):
    cfg = OptimizerConfig(restarts=6, refine_iterations=30, seed=19)
    _, v1 = seesaw_optimize(game, singlet, cfg)
    _, v2 = seesaw_optimize(game, singlet, cfg)
    _, v3 = seesaw_optimize(game, singlet, cfg, threads=3)
    assert v1 == v2 == v3
