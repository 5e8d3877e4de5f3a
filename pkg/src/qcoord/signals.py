"""Joint signal distributions and their classification.

A joint signal distribution holds the full mass function p(s, t, phi, psi)
for the two players' measurement outcomes (s, t) together with their private
states (phi, psi).  Three checks apply:

* disjointness: s tells player A nothing extra about psi and t tells
  player B nothing extra about phi;
* state consistency: the (phi, psi) marginal equals the product of the
  state priors;
* classical generation: the conditionals p(s, t | phi, psi) lie in the
  convex hull of deterministic local response pairs, decided by an exact
  L1-residual linear program over the hull vertices.

A hidden variable of arbitrary cardinality adds nothing beyond that hull for
finite alphabets: conditioned on any x, each player's response is a local
stochastic map, every local stochastic map is a mixture of deterministic
ones, and the hull is convex.  So the vertex LP decides exactly the
x-quantified definition.

A distribution is Signalling when disjointness fails, ClassicallyGenerated
when disjoint and inside the hull, and Entangled when disjoint but outside.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import tolerances as tol
from .errors import (
    AlphabetCapExceeded,
    DimensionMismatch,
    NotDisjoint,
    NotStateConsistent,
    PayoffDependsOnPsi,
    ShapeMismatch,
    ValidationError,
)
from .games import Game, _validate_labels, _validate_prior
from .quantum import DensityMatrix, MeasurementFamily, joint_distribution
from .simplex import OPTIMAL, solve_lp


@dataclass(frozen=True)
class JointSignalDistribution:
    """Full joint mass p[s, t, phi, psi] with labeled axes."""

    s_labels: tuple
    t_labels: tuple
    phi_labels: tuple
    psi_labels: tuple
    table: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "s_labels", _validate_labels(self.s_labels, "s_labels"))
        object.__setattr__(self, "t_labels", _validate_labels(self.t_labels, "t_labels"))
        object.__setattr__(self, "phi_labels", _validate_labels(self.phi_labels, "phi_labels"))
        object.__setattr__(self, "psi_labels", _validate_labels(self.psi_labels, "psi_labels"))
        p = np.asarray(self.table, dtype=float)
        expected = (len(self.s_labels), len(self.t_labels),
                    len(self.phi_labels), len(self.psi_labels))
        if p.shape != expected:
            raise ValidationError(f"table: expected shape {expected}, got {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValidationError("table: contains non-finite entries")
        low = float(p.min())
        if low < -tol.TOL_PSD:
            raise ValidationError(f"table: probability {low:.3e} below -{tol.TOL_PSD}")
        p = np.clip(p, 0.0, None)
        total = float(p.sum())
        if abs(total - 1.0) > tol.TOL_PROB:
            raise ValidationError(f"table: total mass {total!r}, expected 1")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "table", p)

    @property
    def shape(self) -> tuple:
        return self.table.shape

    def state_marginal(self) -> np.ndarray:
        """p(phi, psi)"""
        return self.table.sum(axis=(0, 1))


class Verdict(str, Enum):
    SIGNALLING = "Signalling"
    CLASSICALLY_GENERATED = "ClassicallyGenerated"
    ENTANGLED = "Entangled"


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    max_violation: float


@dataclass(frozen=True)
class LocalityResult:
    """Outcome of the hull-membership program.

    ``weights`` carries the mixture over deterministic response pairs when
    feasible (each entry is (response_a, response_b, weight) with responses
    given as outcome labels in state order); ``residual`` is the minimized
    L1 reconstruction error, which exceeds the tolerance exactly when the
    conditionals lie outside the hull.
    """

    feasible: bool
    residual: float
    tolerance: float
    weights: tuple | None


@dataclass(frozen=True)
class ClassificationResult:
    disjoint: CheckResult
    state_consistent: CheckResult
    locality: LocalityResult | None
    verdict: Verdict


def distribution_from_quantum(
    rho: DensityMatrix,
    family_a: MeasurementFamily,
    family_b: MeasurementFamily,
    prior_a,
    prior_b,
) -> JointSignalDistribution:
    """Joint signal distribution of measuring a shared state per private state.

    p(s, t, phi, psi) = prior_a(phi) * prior_b(psi) * tr(rho M_{s|phi} ox N_{t|psi}).
    State consistency holds by construction.
    """
    if rho.dim != family_a.dim * family_b.dim:
        raise DimensionMismatch(
            f"state dim {rho.dim} is not {family_a.dim} * {family_b.dim}"
        )
    pa = _validate_prior(prior_a, len(family_a.labels), "prior_a")
    pb = _validate_prior(prior_b, len(family_b.labels), "prior_b")
    n_s, n_t = family_a.n_outcomes, family_b.n_outcomes
    table = np.zeros((n_s, n_t, len(family_a.labels), len(family_b.labels)))
    for fi, f in enumerate(family_a.labels):
        for wi, w in enumerate(family_b.labels):
            table[:, :, fi, wi] = pa[fi] * pb[wi] * joint_distribution(rho, family_a[f], family_b[w])
    return JointSignalDistribution(
        s_labels=tuple(str(i) for i in range(n_s)),
        t_labels=tuple(str(i) for i in range(n_t)),
        phi_labels=family_a.labels,
        psi_labels=family_b.labels,
        table=table,
    )


def check_disjoint(
    p: JointSignalDistribution,
    *,
    tolerance: float = tol.DISJOINT_TOL,
    mass_floor: float = tol.MASS_FLOOR,
) -> CheckResult:
    """Do the signals leak information about the other player's state?

    Compares Pr{psi | phi, s} with Pr{psi | phi} and Pr{phi | psi, t} with
    Pr{phi | psi} on every conditioning event heavier than ``mass_floor``.
    """
    table = p.table
    worst = 0.0

    phi_mass = table.sum(axis=(0, 1, 3))            # p(phi)
    phi_s = table.sum(axis=(1, 3))                  # p(s, phi)
    phi_psi = table.sum(axis=(0, 1))                # p(phi, psi)
    phi_s_psi = table.sum(axis=1)                   # p(s, phi, psi)
    for fi in range(len(p.phi_labels)):
        if phi_mass[fi] <= mass_floor:
            continue
        base = phi_psi[fi] / phi_mass[fi]
        for si in range(len(p.s_labels)):
            if phi_s[si, fi] <= mass_floor:
                continue
            conditioned = phi_s_psi[si, fi] / phi_s[si, fi]
            worst = max(worst, float(np.max(np.abs(conditioned - base))))

    psi_mass = table.sum(axis=(0, 1, 2))            # p(psi)
    psi_t = table.sum(axis=(0, 2))                  # p(t, psi)
    psi_phi = phi_psi.T                             # p(psi, phi)
    psi_t_phi = table.sum(axis=0).transpose(0, 2, 1)  # [t, psi, phi]
    for wi in range(len(p.psi_labels)):
        if psi_mass[wi] <= mass_floor:
            continue
        base = psi_phi[wi] / psi_mass[wi]
        for ti in range(len(p.t_labels)):
            if psi_t[ti, wi] <= mass_floor:
                continue
            conditioned = psi_t_phi[ti, wi] / psi_t[ti, wi]
            worst = max(worst, float(np.max(np.abs(conditioned - base))))

    return CheckResult(passed=worst <= tolerance, max_violation=worst)


def check_state_consistent(
    p: JointSignalDistribution,
    prior_a,
    prior_b,
    *,
    tolerance: float = tol.TOL_PROB,
) -> CheckResult:
    """Does the (phi, psi) marginal equal the product of the priors?"""
    pa = _validate_prior(prior_a, len(p.phi_labels), "prior_a")
    pb = _validate_prior(prior_b, len(p.psi_labels), "prior_b")
    deviation = float(np.max(np.abs(p.state_marginal() - np.outer(pa, pb))))
    return CheckResult(passed=deviation <= tolerance, max_violation=deviation)


def _product_marginal_deviation(p: JointSignalDistribution) -> float:
    marg = p.state_marginal()
    return float(np.max(np.abs(marg - np.outer(marg.sum(axis=1), marg.sum(axis=0)))))


def _conditionals(p: JointSignalDistribution, mass_floor: float):
    """q(s, t | phi, psi) plus the mask of (phi, psi) cells heavy enough to constrain."""
    marg = p.state_marginal()
    valid = marg > mass_floor
    q = np.zeros_like(p.table)
    q[:, :, valid] = p.table[:, :, valid] / marg[valid]
    return q, valid


def _response_table(n_outcomes: int, n_states: int) -> np.ndarray:
    """All deterministic responses state -> outcome, lexicographic, as an index array."""
    return np.array(list(itertools.product(range(n_outcomes), repeat=n_states)), dtype=int)


def _hull_membership(p: JointSignalDistribution, lp_tolerance: float,
                     mass_floor: float) -> LocalityResult:
    n_s, n_t, n_phi, n_psi = p.shape
    n_vertices = (n_s ** n_phi) * (n_t ** n_psi)
    if n_vertices > tol.VERTEX_CAP:
        raise AlphabetCapExceeded(
            f"{n_vertices} hull vertices exceed the dense-tableau cap {tol.VERTEX_CAP}"
        )

    q, valid = _conditionals(p, mass_floor)
    responses_a = _response_table(n_s, n_phi)
    responses_b = _response_table(n_t, n_psi)
    onehot_a = np.zeros((len(responses_a), n_phi, n_s))
    onehot_a[np.arange(len(responses_a))[:, None], np.arange(n_phi)[None, :], responses_a] = 1.0
    onehot_b = np.zeros((len(responses_b), n_psi, n_t))
    onehot_b[np.arange(len(responses_b))[:, None], np.arange(n_psi)[None, :], responses_b] = 1.0

    # vertices[v, s, t, phi, psi] = [response_a(phi) == s] * [response_b(psi) == t]
    vertices = np.einsum("afs,bwt->abstfw", onehot_a, onehot_b)
    vertices = vertices.reshape(n_vertices, n_s, n_t, n_phi, n_psi)

    cell_mask = np.broadcast_to(valid, (n_s, n_t, n_phi, n_psi))
    target = q[cell_mask]
    columns = vertices[:, cell_mask].T        # (n_cells, n_vertices)
    n_cells = target.size

    a_eq = np.hstack([columns, np.eye(n_cells), -np.eye(n_cells)])
    a_eq = np.vstack([a_eq, np.concatenate([np.ones(n_vertices), np.zeros(2 * n_cells)])])
    b_eq = np.concatenate([target, [1.0]])
    costs = np.concatenate([np.zeros(n_vertices), np.ones(2 * n_cells)])

    result = solve_lp(costs, a_eq, b_eq)
    if result.status != OPTIMAL:  # pragma: no cover - slack variables keep this feasible
        raise ValidationError(f"hull membership program ended with status {result.status}")
    residual = max(float(result.objective), 0.0)
    feasible = residual <= lp_tolerance

    weights = None
    if feasible:
        raw = result.x[:n_vertices]
        picked = []
        for v in np.nonzero(raw > 1e-12)[0]:
            ia, ib = divmod(int(v), len(responses_b))
            picked.append((
                tuple(p.s_labels[s] for s in responses_a[ia]),
                tuple(p.t_labels[t] for t in responses_b[ib]),
                float(raw[v]),
            ))
        weights = tuple(picked)
    return LocalityResult(feasible=feasible, residual=residual,
                          tolerance=lp_tolerance, weights=weights)


def check_classically_generated(
    p: JointSignalDistribution,
    *,
    lp_tolerance: float = tol.LP_TOL,
    mass_floor: float = tol.MASS_FLOOR,
) -> LocalityResult:
    """Can the signals be produced from own state plus shared randomness?

    Requires the distribution's own (phi, psi) marginal to factorize, so
    that the per-cell conditionals share one generating structure; raises
    ``NotStateConsistent`` otherwise.
    """
    deviation = _product_marginal_deviation(p)
    if deviation > tol.TOL_PROB:
        raise NotStateConsistent(
            f"(phi, psi) marginal deviates from a product by {deviation:.3e}"
        )
    return _hull_membership(p, lp_tolerance, mass_floor)


def classify(
    p: JointSignalDistribution,
    prior_a,
    prior_b,
    *,
    profile: tol.ToleranceProfile = tol.DEFAULT_PROFILE,
) -> ClassificationResult:
    """Compose the three checks into a single verdict.

    Signalling when disjointness fails; otherwise ClassicallyGenerated or
    Entangled according to hull membership of the conditionals.
    """
    disjoint = check_disjoint(p, tolerance=profile.disjoint)
    consistent = check_state_consistent(p, prior_a, prior_b, tolerance=profile.prob)
    if not disjoint.passed:
        return ClassificationResult(disjoint, consistent, None, Verdict.SIGNALLING)
    locality = _hull_membership(p, profile.lp, tol.MASS_FLOOR)
    verdict = Verdict.CLASSICALLY_GENERATED if locality.feasible else Verdict.ENTANGLED
    return ClassificationResult(disjoint, consistent, locality, verdict)


def theorem2_transform(p: JointSignalDistribution) -> JointSignalDistribution:
    """Replace the joint by the product of its (s, t, phi) marginal with the psi marginal.

    The (s, t, phi) marginal is preserved exactly, so any payoff that ignores
    psi takes the same expected value on the output as on the input.
    """
    stf = p.table.sum(axis=3)
    psi = p.table.sum(axis=(0, 1, 2))
    return JointSignalDistribution(
        s_labels=p.s_labels,
        t_labels=p.t_labels,
        phi_labels=p.phi_labels,
        psi_labels=p.psi_labels,
        table=np.einsum("stf,w->stfw", stf, psi),
    )


def expected_signal_payoff(p: JointSignalDistribution, payoff: np.ndarray) -> float:
    """Expected payoff sum payoff[s, t, phi, psi] * p[s, t, phi, psi].

    The mass function already carries the state priors, so no extra
    weighting is applied.  Signals are identified with actions.
    """
    payoff = np.asarray(payoff, dtype=float)
    if payoff.shape != p.shape:
        raise ShapeMismatch(f"payoff shape {payoff.shape} vs distribution shape {p.shape}")
    return float(np.einsum("stfw,stfw->", payoff, p.table))


@dataclass(frozen=True)
class Theorem2Report:
    """Payoff comparison between a distribution and its product-form transform."""

    payoff_original: float
    payoff_transformed: float
    difference: float
    tolerance: float
    transformed_classification: ClassificationResult

    @property
    def passed(self) -> bool:
        return (
            self.difference <= self.tolerance
            and self.transformed_classification.verdict is Verdict.CLASSICALLY_GENERATED
        )


def verify_theorem2(game: Game, p: JointSignalDistribution) -> Theorem2Report:
    """Check that dropping the psi correlations costs nothing when payoffs ignore psi.

    The payoff must be exactly constant along the psi axis, and the
    distribution must be disjoint and state-consistent with the game's
    priors.  The report compares the expected payoff under the distribution
    with the payoff under its product-form transform and classifies the
    transform, which always lands inside the classical hull.
    """
    if game.shape != p.shape:
        raise ShapeMismatch(f"game shape {game.shape} vs distribution shape {p.shape}")
    if float(np.ptp(game.payoff, axis=3).max()) > 0.0:
        raise PayoffDependsOnPsi("payoff varies along the psi axis")
    disjoint = check_disjoint(p)
    if not disjoint.passed:
        raise NotDisjoint(f"signals leak state information (deviation {disjoint.max_violation:.3e})")
    consistent = check_state_consistent(p, game.prior_a, game.prior_b)
    if not consistent.passed:
        raise NotStateConsistent(
            f"(phi, psi) marginal deviates from the priors by {consistent.max_violation:.3e}"
        )

    transformed = theorem2_transform(p)
    value_original = expected_signal_payoff(p, game.payoff)
    value_transformed = expected_signal_payoff(transformed, game.payoff)
    classification = classify(transformed, game.prior_a, game.prior_b)
    return Theorem2Report(
        payoff_original=value_original,
        payoff_transformed=value_transformed,
        difference=abs(value_original - value_transformed),
        tolerance=tol.THEOREM2_TOL,
        transformed_classification=classification,
    )
