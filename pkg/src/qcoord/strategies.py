"""Quantum strategies for coordination games and lower-bound optimizers.

A quantum strategy measures a shared entangled state with a per-state
measurement family and plays the observed outcome as the action (an
arbitrary outcome relabeling is supported but never searched over, since for
projective pairs a relabeling is the same as shifting the angle by pi/2).

Two optimizers produce lower bounds on the quantum value of a binary-action
game: ``optimize_angles`` searches the one-parameter projective family per
state (coarse grid, then simplex refinement from multiple starts), and
``seesaw_optimize`` alternates exact best-response updates over general
two-outcome POVMs.  Both are deterministic given the config seed, and both
batch all restarts through vectorized linear algebra so that thousands of
restarts stay cheap.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from . import tolerances as tol
from .errors import (
    DimensionMismatch,
    IncompatibleLabels,
    InvalidConfig,
    NonBinaryActions,
    ValidationError,
)
from .games import BehaviorTable, CHSH_ANGLES_A, CHSH_ANGLES_B, Game, expected_payoff
from .nelder_mead import nelder_mead_batch
from .quantum import (
    DensityMatrix,
    Measurement,
    MeasurementFamily,
    angle_family,
    joint_distribution,
)

_GRID_CAP = 10**7


def _frozen_angles(angles, name: str) -> Mapping[str, float]:
    items = {str(k): float(v) for k, v in dict(angles).items()}
    if not items:
        raise ValidationError(f"{name}: must be non-empty")
    if not all(math.isfinite(v) for v in items.values()):
        raise ValidationError(f"{name}: angles must be finite")
    return MappingProxyType(items)


@dataclass(frozen=True)
class QubitAngleStrategy:
    """One projective-pair angle per private state, for each player."""

    angles_a: Mapping[str, float]
    angles_b: Mapping[str, float]

    def __post_init__(self):
        object.__setattr__(self, "angles_a", _frozen_angles(self.angles_a, "angles_a"))
        object.__setattr__(self, "angles_b", _frozen_angles(self.angles_b, "angles_b"))


def chsh_reference_strategy() -> QubitAngleStrategy:
    """Angles equal to the numeric value of each private state of the CHSH game."""
    return QubitAngleStrategy(CHSH_ANGLES_A, CHSH_ANGLES_B)


@dataclass(frozen=True)
class QuantumStrategyProfile:
    """Shared state, a measurement family per player, and outcome-to-action maps."""

    shared_state: DensityMatrix
    family_a: MeasurementFamily
    family_b: MeasurementFamily
    outcome_to_action_a: tuple = None
    outcome_to_action_b: tuple = None

    def __post_init__(self):
        if self.shared_state.dim != self.family_a.dim * self.family_b.dim:
            raise DimensionMismatch(
                f"shared state dim {self.shared_state.dim} is not "
                f"{self.family_a.dim} * {self.family_b.dim}"
            )
        for attr, fam in (("outcome_to_action_a", self.family_a),
                          ("outcome_to_action_b", self.family_b)):
            mapping = getattr(self, attr)
            if mapping is None:
                mapping = tuple(range(fam.n_outcomes))
            else:
                mapping = tuple(int(x) for x in mapping)
                if len(mapping) != fam.n_outcomes:
                    raise ValidationError(
                        f"{attr}: {len(mapping)} entries for {fam.n_outcomes} outcomes"
                    )
                if any(x < 0 for x in mapping):
                    raise ValidationError(f"{attr}: action indices must be nonnegative")
            object.__setattr__(self, attr, mapping)


@dataclass(frozen=True)
class OptimizerConfig:
    grid_points: int = 24
    refine_iterations: int = 200
    restarts: int = 8
    seed: int = 0
    tolerance: float = 1e-10

    def __post_init__(self):
        for name in ("grid_points", "refine_iterations", "restarts"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise InvalidConfig(f"{name} must be an integer >= 1, got {v!r}")
        if not (isinstance(self.tolerance, (int, float)) and self.tolerance > 0):
            raise InvalidConfig(f"tolerance must be positive, got {self.tolerance!r}")
        if not isinstance(self.seed, (int, np.integer)):
            raise InvalidConfig(f"seed must be an integer, got {self.seed!r}")


def behavior_from_profile(profile: QuantumStrategyProfile, game: Game) -> BehaviorTable:
    """Conditional action distribution induced by measuring and relabeling."""
    fam_a, fam_b = profile.family_a, profile.family_b
    if set(fam_a.labels) != set(game.states_a):
        raise IncompatibleLabels(
            f"family A labels {sorted(fam_a.labels)} vs game states {sorted(game.states_a)}"
        )
    if set(fam_b.labels) != set(game.states_b):
        raise IncompatibleLabels(
            f"family B labels {sorted(fam_b.labels)} vs game states {sorted(game.states_b)}"
        )
    map_a, map_b = profile.outcome_to_action_a, profile.outcome_to_action_b
    n_a, n_b = len(game.actions_a), len(game.actions_b)
    if any(x >= n_a for x in map_a) or any(x >= n_b for x in map_b):
        raise IncompatibleLabels("outcome-to-action map points outside the action set")

    q = np.zeros((n_a, n_b, len(game.states_a), len(game.states_b)))
    for fi, f in enumerate(game.states_a):
        for wi, w in enumerate(game.states_b):
            joint = joint_distribution(profile.shared_state, fam_a[f], fam_b[w])
            for s in range(joint.shape[0]):
                for t in range(joint.shape[1]):
                    q[map_a[s], map_b[t], fi, wi] += joint[s, t]
    return BehaviorTable(q)


def _require_binary(game: Game):
    if len(game.actions_a) != 2 or len(game.actions_b) != 2:
        raise NonBinaryActions(
            f"need two actions per player, got {len(game.actions_a)} and {len(game.actions_b)}"
        )


def evaluate_qubit_strategy(game: Game, strategy: QubitAngleStrategy, shared: DensityMatrix) -> float:
    """Expected payoff of a projective-pair angle strategy on a two-qubit state."""
    _require_binary(game)
    if shared.dim != 4:
        raise DimensionMismatch(f"shared state dim {shared.dim}, expected 4 (qubit pair)")
    if set(strategy.angles_a) != set(game.states_a) or set(strategy.angles_b) != set(game.states_b):
        raise IncompatibleLabels("strategy angle labels do not match the game's states")
    fam_a = angle_family({f: strategy.angles_a[f] for f in game.states_a})
    fam_b = angle_family({w: strategy.angles_b[w] for w in game.states_b})
    profile = QuantumStrategyProfile(shared, fam_a, fam_b)
    return expected_payoff(game, behavior_from_profile(profile, game))


def _projector_stack(angles: np.ndarray) -> np.ndarray:
    """Entries of both projectors of a projective pair, for an array of angles."""
    c = np.cos(angles)
    s = np.sin(angles)
    cc, ss, cs = c * c, s * s, c * s
    out = np.empty(angles.shape + (2, 2, 2))
    out[..., 0, 0, 0] = cc
    out[..., 0, 0, 1] = cs
    out[..., 0, 1, 0] = cs
    out[..., 0, 1, 1] = ss
    out[..., 1, 0, 0] = ss
    out[..., 1, 0, 1] = -cs
    out[..., 1, 1, 0] = -cs
    out[..., 1, 1, 1] = cc
    return out


def _angle_payoff_fn(game: Game, shared: DensityMatrix, chunk: int = 1 << 15):
    """Vectorized map from batches of angle vectors to expected payoffs.

    Angle vectors concatenate player A's angles (game state order) with
    player B's.  Identity outcome-to-action mapping is assumed, matching the
    strategies this optimizer searches over.
    """
    rho4 = shared.matrix.reshape(2, 2, 2, 2)
    m = len(game.states_a)
    weighted = game.payoff * game.prior_a[None, None, :, None] * game.prior_b[None, None, None, :]

    def fn(thetas: np.ndarray) -> np.ndarray:
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        out = np.empty(thetas.shape[0])
        for lo in range(0, thetas.shape[0], chunk):
            block = thetas[lo:lo + chunk]
            pa = _projector_stack(block[:, :m])
            pb = _projector_stack(block[:, m:])
            # tr(rho (M ox N)) = sum rho[(i,k),(j,l)] M[j,i] N[l,k]
            half = np.einsum("ikjl,xfsji->xfskl", rho4, pa)
            q = np.einsum("xfskl,xwtlk->xfwst", half, pb).real
            out[lo:lo + chunk] = np.einsum("abfw,xfwab->x", weighted, q)
        return out

    return fn


def _run_batches(worker, starts: np.ndarray, threads: int):
    """Split a batch of independent starts across a thread pool, preserving order."""
    if threads <= 1 or starts.shape[0] <= 1:
        return [worker(starts)]
    chunks = np.array_split(starts, min(threads, starts.shape[0]))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, chunks))


def optimize_angles(
    game: Game,
    shared: DensityMatrix,
    cfg: OptimizerConfig | None = None,
    *,
    threads: int = 1,
):
    """Grid-then-refine search over projective-pair angles.

    Returns ``(best_strategy, value)`` where the value is recomputed through
    :func:`evaluate_qubit_strategy` on the winning angles.  The coarse grid
    seeds one refinement run and ``cfg.restarts`` further runs start from
    uniformly random angle vectors; the best run wins, ties resolved in
    start order.
    """
    cfg = cfg or OptimizerConfig()
    _require_binary(game)
    if shared.dim != 4:
        raise DimensionMismatch(f"shared state dim {shared.dim}, expected 4 (qubit pair)")
    n_angles = len(game.states_a) + len(game.states_b)
    if cfg.grid_points ** n_angles > _GRID_CAP:
        raise InvalidConfig(
            f"grid of {cfg.grid_points}^{n_angles} points exceeds {_GRID_CAP}; lower grid_points"
        )

    payoff_fn = _angle_payoff_fn(game, shared)

    # projective pairs have period pi, so the grid never needs the endpoint
    axis = np.linspace(0.0, math.pi, cfg.grid_points, endpoint=False)
    mesh = np.stack(np.meshgrid(*([axis] * n_angles), indexing="ij"), axis=-1)
    grid_points = mesh.reshape(-1, n_angles)
    grid_values = payoff_fn(grid_points)
    grid_best = grid_points[int(np.argmax(grid_values))]

    rng = np.random.default_rng(cfg.seed)
    starts = np.vstack([
        grid_best[None, :],
        rng.uniform(0.0, math.pi, size=(cfg.restarts, n_angles)),
    ])

    def worker(block):
        return nelder_mead_batch(
            lambda pts: -payoff_fn(pts),
            block,
            iterations=cfg.refine_iterations,
            tolerance=cfg.tolerance,
        )

    results = _run_batches(worker, starts, threads)
    points = np.vstack([r.points for r in results])
    values = -np.concatenate([r.values for r in results])

    winner = points[int(np.argmax(values))]
    strategy = QubitAngleStrategy(
        angles_a={f: float(winner[i]) for i, f in enumerate(game.states_a)},
        angles_b={w: float(winner[len(game.states_a) + i]) for i, w in enumerate(game.states_b)},
    )
    return strategy, evaluate_qubit_strategy(game, strategy, shared)


def _projector_nonneg(hermitian: np.ndarray) -> np.ndarray:
    """Projector onto the eigenspace with eigenvalue >= -TOL_PSD, batched.

    Eigenvalues inside the +-TOL_PSD band go to outcome 0, which pins down
    the measure-zero ties deterministically.
    """
    sym = (hermitian + np.conj(np.swapaxes(hermitian, -1, -2))) / 2.0
    w, u = np.linalg.eigh(sym)
    keep = (w >= -tol.TOL_PSD).astype(float)
    return np.einsum("...ie,...e,...je->...ij", u, keep, np.conj(u))


def _binary_povm_from(hermitian: np.ndarray) -> np.ndarray:
    """Stack (outcome axis inserted before the matrix axes) of {P, I - P}."""
    p0 = _projector_nonneg(hermitian)
    eye = np.eye(p0.shape[-1], dtype=complex)
    return np.stack([p0, eye - p0], axis=-3)


class _SeesawEngine:
    """Batched alternating best responses for binary-outcome measurements."""

    def __init__(self, game: Game, shared: DensityMatrix, dims: tuple):
        self.dim_a, self.dim_b = dims
        self.rho4 = shared.matrix.reshape(self.dim_a, self.dim_b, self.dim_a, self.dim_b)
        self.prior_a = game.prior_a
        self.prior_b = game.prior_b
        self.payoff = game.payoff

    def respond_a(self, ns: np.ndarray) -> np.ndarray:
        # ns: (batch, n_psi, 2, dim_b, dim_b)
        reduced = np.einsum("ikjl,xwblk->xwbij", self.rho4, ns)
        gain = np.einsum("w,abfw,xwbij->xfaij", self.prior_b, self.payoff, reduced,
                         optimize=True)
        return _binary_povm_from(gain[:, :, 0] - gain[:, :, 1])

    def respond_b(self, ms: np.ndarray) -> np.ndarray:
        reduced = np.einsum("ikjl,xfaji->xfakl", self.rho4, ms)
        gain = np.einsum("f,abfw,xfakl->xwbkl", self.prior_a, self.payoff, reduced,
                         optimize=True)
        return _binary_povm_from(gain[:, :, 0] - gain[:, :, 1])

    def values(self, ms: np.ndarray, ns: np.ndarray) -> np.ndarray:
        joint = np.einsum("ikjl,xfaji,xwblk->xfwab", self.rho4, ms, ns, optimize=True).real
        return np.einsum("f,w,abfw,xfwab->x", self.prior_a, self.prior_b, self.payoff, joint,
                         optimize=True)

    def random_binary_families(self, rng, count: int, n_states: int, dim: int) -> np.ndarray:
        g = rng.standard_normal((count, n_states, dim, dim)) \
            + 1j * rng.standard_normal((count, n_states, dim, dim))
        return _binary_povm_from(g)

    def sweep(self, ms: np.ndarray, ns: np.ndarray, max_sweeps: int, tolerance: float):
        """Run alternating best responses; returns final families and value history."""
        values = self.values(ms, ns)
        history = [values.copy()]
        active = np.ones(values.shape[0], dtype=bool)
        for _ in range(max_sweeps):
            rows = np.nonzero(active)[0]
            if rows.size == 0:
                break
            ms[rows] = self.respond_a(ns[rows])
            ns[rows] = self.respond_b(ms[rows])
            new_values = self.values(ms[rows], ns[rows])
            active[rows] = (new_values - values[rows]) > tolerance
            values[rows] = new_values
            history.append(values.copy())
        return ms, ns, values, np.array(history)


def _seesaw_dims(shared: DensityMatrix, dims) -> tuple:
    if dims is not None:
        da, db = int(dims[0]), int(dims[1])
    elif shared.dim == 4:
        da, db = 2, 2
    else:
        raise DimensionMismatch(
            f"cannot infer the bipartite split of a dim-{shared.dim} state; pass dims=(da, db)"
        )
    if da * db != shared.dim:
        raise DimensionMismatch(f"dims {da} * {db} do not match state dim {shared.dim}")
    return da, db


def seesaw_optimize(
    game: Game,
    shared: DensityMatrix,
    cfg: OptimizerConfig | None = None,
    *,
    dims: tuple | None = None,
    threads: int = 1,
):
    """Alternating exact best responses over general two-outcome POVMs.

    Starting from ``cfg.restarts`` random binary measurement families, each
    sweep replaces one player's family with its exact best response (the
    projector onto the nonnegative eigenspace of the payoff-gain operator)
    while the other is held fixed, so the value sequence never decreases.
    Returns ``(profile, value)`` for the best restart, value recomputed
    through the public behavior path.
    """
    cfg = cfg or OptimizerConfig()
    _require_binary(game)
    da, db = _seesaw_dims(shared, dims)
    engine = _SeesawEngine(game, shared, (da, db))

    rng = np.random.default_rng(cfg.seed)
    ms0 = engine.random_binary_families(rng, cfg.restarts, len(game.states_a), da)
    ns0 = engine.random_binary_families(rng, cfg.restarts, len(game.states_b), db)

    def worker(block_indices):
        ms = ms0[block_indices].copy()
        ns = ns0[block_indices].copy()
        ms, ns, values, _ = engine.sweep(ms, ns, cfg.refine_iterations, cfg.tolerance)
        return ms, ns, values

    index_blocks = ([np.arange(cfg.restarts)] if threads <= 1 or cfg.restarts <= 1
                    else np.array_split(np.arange(cfg.restarts), min(threads, cfg.restarts)))
    if len(index_blocks) == 1:
        outputs = [worker(index_blocks[0])]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outputs = list(pool.map(worker, index_blocks))

    ms = np.concatenate([o[0] for o in outputs])
    ns = np.concatenate([o[1] for o in outputs])
    values = np.concatenate([o[2] for o in outputs])

    best = int(np.argmax(values))
    fam_a = MeasurementFamily({
        label: Measurement(tuple(ms[best, i])) for i, label in enumerate(game.states_a)
    })
    fam_b = MeasurementFamily({
        label: Measurement(tuple(ns[best, i])) for i, label in enumerate(game.states_b)
    })
    profile = QuantumStrategyProfile(shared, fam_a, fam_b)
    return profile, expected_payoff(game, behavior_from_profile(profile, game))
