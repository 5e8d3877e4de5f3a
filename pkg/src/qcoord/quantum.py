"""Dense complex linear algebra for quantum states and finite measurements.

States are density matrices (Hermitian, unit trace, positive semidefinite),
measurements are finite POVMs (nonnegative operators summing to identity),
and outcome probabilities follow the trace rule p_i = tr(M_i rho).  Storage
is dense complex128 and dimensions are capped at 64, which is far beyond the
two-qubit systems this package actually analyzes.

Convention note: the second basis matrix ``PAULI_2`` is fixed here as
``[[0, i], [-i, 0]]``, the mirror image of the textbook sigma_y.  The choice
only reflects the Bloch ball through a2 -> -a2 and changes no probability;
it is kept because every formula in this package is written against it.

All functions are pure and all returned objects are immutable, so values may
be shared freely across threads.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from . import tolerances as tol
from .errors import (
    BlochNormExceeded,
    DimensionCapExceeded,
    DimensionMismatch,
    ValidationError,
    ZeroVector,
)

PAULI_1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_2 = np.array([[0.0, 1.0j], [-1.0j, 0.0]], dtype=complex)
PAULI_3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

for _p in (PAULI_1, PAULI_2, PAULI_3):
    _p.setflags(write=False)
del _p


def as_complex_matrix(values, *, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-d complex array; reject NaN and Inf entries."""
    try:
        arr = np.asarray(values, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name}: not coercible to a complex matrix: {exc}") from None
    if arr.ndim != 2:
        raise ValidationError(f"{name}: expected 2 dimensions, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValidationError(f"{name}: contains non-finite entries")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


def hermitian_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of (m + m^dagger)/2.

    Forcing the Hermitian average first strips the asymmetric part of any
    floating noise, so the solver sees an exactly Hermitian input.  The 2x2
    case uses the closed form, which the hot validation paths lean on.
    """
    h = (m + m.conj().T) / 2.0
    if h.shape == (2, 2):
        a = h[0, 0].real
        d = h[1, 1].real
        b = h[0, 1]
        gap = math.sqrt(max((a - d) ** 2 + 4.0 * (b.real ** 2 + b.imag ** 2), 0.0))
        return np.array([(a + d - gap) / 2.0, (a + d + gap) / 2.0])
    return np.linalg.eigvalsh(h)


def hermiticity_deviation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


@dataclass(frozen=True)
class DensityMatrix:
    """A validated quantum state.

    Construction fails unless the matrix is square, Hermitian within
    ``TOL_HERM``, unit trace within ``TOL_TRACE`` and has smallest
    eigenvalue >= -``TOL_PSD``.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix, name="density matrix")
        n, k = m.shape
        if n != k:
            raise ValidationError(f"density matrix must be square, got {n}x{k}")
        if n > tol.DIM_CAP:
            raise DimensionCapExceeded(f"dimension {n} exceeds the dense cap {tol.DIM_CAP}")
        dev = hermiticity_deviation(m)
        if dev > tol.TOL_HERM:
            raise ValidationError(f"density matrix not Hermitian (deviation {dev:.3e})")
        tr_dev = abs(complex(np.trace(m)) - 1.0)
        if tr_dev > tol.TOL_TRACE:
            raise ValidationError(f"density matrix trace differs from 1 by {tr_dev:.3e}")
        lowest = float(hermitian_eigenvalues(m)[0])
        if lowest < -tol.TOL_PSD:
            raise ValidationError(f"density matrix has eigenvalue {lowest:.3e} below -{tol.TOL_PSD}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return hermitian_eigenvalues(self.matrix)


@dataclass(frozen=True)
class BlochVector:
    """Real coefficients of a qubit state in the basis (I, PAULI_1..3)/2."""

    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        coords = (self.a1, self.a2, self.a3)
        if not all(math.isfinite(float(a)) for a in coords):
            raise ValidationError("Bloch coefficients must be finite")
        if self.norm_squared > 1.0 + tol.TOL_PSD:
            raise BlochNormExceeded(
                f"Bloch norm^2 = {self.norm_squared:.6f} exceeds 1 (state would not be positive)"
            )

    @property
    def norm_squared(self) -> float:
        return float(self.a1) ** 2 + float(self.a2) ** 2 + float(self.a3) ** 2


@dataclass(frozen=True)
class PovmReport:
    """Validation report for a candidate measurement."""

    hermiticity_deviation: float
    min_eigenvalue: float
    completeness_deviation: float
    passed: bool


def validate_povm(operators) -> PovmReport:
    """Check a collection of operators against the POVM requirements.

    Accepts a ``Measurement`` or any iterable of square matrices of one
    common dimension.  Never raises for a well-shaped but invalid
    collection; failures are carried in the report.
    """
    if isinstance(operators, Measurement):
        ops = list(operators.operators)
    else:
        ops = [as_complex_matrix(op, name=f"operator {i}") for i, op in enumerate(operators)]
    if not ops:
        raise ValidationError("a measurement needs at least one outcome operator")
    dim = ops[0].shape[0]
    for i, op in enumerate(ops):
        if op.shape != (dim, dim):
            raise ValidationError(f"operator {i} has shape {op.shape}, expected ({dim}, {dim})")

    herm_dev = max(hermiticity_deviation(op) for op in ops)
    min_eig = min(float(hermitian_eigenvalues(op)[0]) for op in ops)
    total = sum(ops) - np.eye(dim)
    comp_dev = float(np.max(np.abs(total)))
    passed = (
        herm_dev <= tol.TOL_HERM
        and min_eig >= -tol.TOL_PSD
        and comp_dev <= tol.TOL_POVM
    )
    return PovmReport(herm_dev, min_eig, comp_dev, passed)


@dataclass(frozen=True)
class Measurement:
    """A finite POVM: one nonnegative operator per outcome, summing to identity."""

    operators: tuple

    def __post_init__(self):
        ops = tuple(_frozen(as_complex_matrix(op, name=f"operator {i}"))
                    for i, op in enumerate(self.operators))
        if not ops:
            raise ValidationError("a measurement needs at least one outcome operator")
        dim = ops[0].shape[0]
        if dim > tol.DIM_CAP:
            raise DimensionCapExceeded(f"dimension {dim} exceeds the dense cap {tol.DIM_CAP}")
        report = validate_povm(ops)
        if not report.passed:
            raise ValidationError(
                "invalid POVM: "
                f"hermiticity deviation {report.hermiticity_deviation:.3e}, "
                f"min eigenvalue {report.min_eigenvalue:.3e}, "
                f"completeness deviation {report.completeness_deviation:.3e}"
            )
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.operators)


@dataclass(frozen=True)
class MeasurementFamily:
    """One measurement per private state of nature; a player's measurement plan.

    The insertion order of ``measurements`` fixes the state ordering used by
    every tensor built from the family.
    """

    measurements: Mapping[str, Measurement]

    def __post_init__(self):
        items = dict(self.measurements)
        if not items:
            raise ValidationError("a measurement family needs at least one entry")
        dims = {m.dim for m in items.values()}
        outs = {m.n_outcomes for m in items.values()}
        if len(dims) != 1:
            raise ValidationError(f"family mixes dimensions {sorted(dims)}")
        if len(outs) != 1:
            raise ValidationError(f"family mixes outcome counts {sorted(outs)}")
        object.__setattr__(self, "measurements", MappingProxyType(items))

    @property
    def labels(self) -> tuple:
        return tuple(self.measurements.keys())

    @property
    def dim(self) -> int:
        return next(iter(self.measurements.values())).dim

    @property
    def n_outcomes(self) -> int:
        return next(iter(self.measurements.values())).n_outcomes

    def __getitem__(self, label) -> Measurement:
        return self.measurements[label]


def qubit_from_bloch(bloch) -> DensityMatrix:
    """Qubit state (I + a1*PAULI_1 + a2*PAULI_2 + a3*PAULI_3) / 2."""
    b = bloch if isinstance(bloch, BlochVector) else BlochVector(*bloch)
    m = 0.5 * (np.eye(2, dtype=complex) + b.a1 * PAULI_1 + b.a2 * PAULI_2 + b.a3 * PAULI_3)
    return DensityMatrix(m)


def pure_state(vector) -> DensityMatrix:
    """Projector onto the given vector, normalized first."""
    v = np.asarray(vector, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
        raise ValidationError("state vector contains non-finite entries")
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ZeroVector("cannot normalize the zero vector")
    v = v / norm
    return DensityMatrix(np.outer(v, v.conj()))


SINGLET_VECTOR = np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / math.sqrt(2.0)
SINGLET_VECTOR.setflags(write=False)


def singlet_state() -> DensityMatrix:
    """Projector onto (|01> - |10>) / sqrt(2)."""
    return pure_state(SINGLET_VECTOR)


def maximally_mixed(dim: int = 2) -> DensityMatrix:
    return DensityMatrix(np.eye(dim, dtype=complex) / dim)


def measurement_vectors(theta: float) -> tuple:
    """The orthonormal pair (cos t, sin t) and (-sin t, cos t)."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([c, s], dtype=complex), np.array([-s, c], dtype=complex)


@functools.lru_cache(maxsize=4096)
def projective_pair(theta: float) -> Measurement:
    """Two-outcome qubit measurement projecting onto the rotated basis at angle theta.

    Measurements are immutable, so repeated angles share one cached instance.
    """
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValidationError("measurement angle must be finite")
    m0, m1 = measurement_vectors(theta)
    return Measurement((np.outer(m0, m0.conj()), np.outer(m1, m1.conj())))


def angle_family(angles: Mapping[str, float]) -> MeasurementFamily:
    """Measurement family of projective pairs, one angle per state label."""
    return MeasurementFamily({label: projective_pair(theta) for label, theta in angles.items()})


def tensor(a, b) -> np.ndarray:
    """Kronecker product; (A ox B)[i*p+k, j*q+l] = A[i,j] * B[k,l] for B of shape (p, q)."""
    return np.kron(as_complex_matrix(a, name="left factor"),
                   as_complex_matrix(b, name="right factor"))


def _clean_probabilities(raw: np.ndarray, *, name: str) -> np.ndarray:
    """Clamp benign negative noise to zero and renormalize.

    Negativity beyond TOL_PSD or total mass off by more than TOL_PROB means
    the inputs were not a valid state/measurement pair and is an error.
    """
    low = float(raw.min())
    if low < -tol.TOL_PSD:
        raise ValidationError(f"{name}: probability {low:.3e} below -{tol.TOL_PSD}")
    cleaned = np.clip(raw, 0.0, None)
    total = float(cleaned.sum())
    if abs(total - 1.0) > tol.TOL_PROB:
        raise ValidationError(f"{name}: probabilities sum to {total!r}, not 1")
    return np.clip(cleaned / total, 0.0, 1.0)


def outcome_distribution(rho: DensityMatrix, m: Measurement) -> np.ndarray:
    """Outcome probabilities tr(M_i rho)."""
    if rho.dim != m.dim:
        raise DimensionMismatch(f"state dim {rho.dim} vs measurement dim {m.dim}")
    probs = np.array([float(np.trace(op @ rho.matrix).real) for op in m.operators])
    return _clean_probabilities(probs, name="outcome distribution")


def joint_distribution(rho: DensityMatrix, m: Measurement, n: Measurement) -> np.ndarray:
    """Joint outcome probabilities p[i, j] = tr(rho (M_i ox N_j))."""
    if rho.dim != m.dim * n.dim:
        raise DimensionMismatch(
            f"state dim {rho.dim} is not the product of measurement dims {m.dim} and {n.dim}"
        )
    # tr(rho (M_i ox N_j)) = sum rho[(a,c),(b,d)] M_i[b,a] N_j[d,c]
    blocks = rho.matrix.reshape(m.dim, n.dim, m.dim, n.dim)
    probs = np.einsum(
        "acbd,iba,jdc->ij", blocks, np.stack(m.operators), np.stack(n.operators)
    ).real
    flat = _clean_probabilities(probs.reshape(-1), name="joint distribution")
    return flat.reshape(probs.shape)


def partial_trace(rho: DensityMatrix, dim_first: int, dim_second: int, keep: str = "first") -> DensityMatrix:
    """Trace out one subsystem of a bipartite state."""
    if rho.dim != dim_first * dim_second:
        raise DimensionMismatch(
            f"state dim {rho.dim} is not {dim_first} * {dim_second}"
        )
    if keep not in ("first", "second"):
        raise ValidationError(f"keep must be 'first' or 'second', got {keep!r}")
    blocks = rho.matrix.reshape(dim_first, dim_second, dim_first, dim_second)
    if keep == "first":
        reduced = np.einsum("ikjk->ij", blocks)
    else:
        reduced = np.einsum("ikil->kl", blocks)
    return DensityMatrix(reduced)


@dataclass(frozen=True)
class NoSignallingReport:
    """Largest gap between the second party's marginal and its partial-trace value."""

    max_deviation: float
    tolerance: float
    passed: bool
    marginal: tuple

    @property
    def n_choices(self) -> int:
        return len(self.marginal)


def no_signalling_check(
    rho: DensityMatrix,
    first_choices: Sequence[Measurement],
    second: Measurement,
    *,
    tolerance: float = tol.TOL_NOSIG,
) -> NoSignallingReport:
    """Compare the second party's marginal across every first-party choice.

    For each outcome j of the fixed measurement and each choice M the gap
    |sum_i tr(rho M_i ox N_j) - tr(rho_2 N_j)| is computed; the report holds
    the maximum.  For valid inputs this is zero up to rounding regardless of
    the state shared, which is exactly why the shared state cannot carry a
    message.
    """
    choices = list(first_choices)
    if not choices:
        raise ValidationError("need at least one first-party measurement choice")
    dim_first = choices[0].dim
    for m in choices:
        if m.dim != dim_first:
            raise DimensionMismatch("first-party choices have mixed dimensions")
    if rho.dim != dim_first * second.dim:
        raise DimensionMismatch(
            f"state dim {rho.dim} is not {dim_first} * {second.dim}"
        )
    rho_second = partial_trace(rho, dim_first, second.dim, keep="second").matrix
    marginal = np.array([float(np.trace(rho_second @ nj).real) for nj in second.operators])

    worst = 0.0
    for m in choices:
        for j, nj in enumerate(second.operators):
            summed = sum(
                float(np.trace(rho.matrix @ np.kron(mi, nj)).real) for mi in m.operators
            )
            worst = max(worst, abs(summed - marginal[j]))
    return NoSignallingReport(
        max_deviation=worst,
        tolerance=tolerance,
        passed=worst <= tolerance,
        marginal=tuple(float(x) for x in marginal),
    )
