"""Numerical tolerances and size caps used throughout the package.

Double precision on matrices of dimension at most 64 keeps rounding error
orders of magnitude below these thresholds, so a violation indicates a
genuinely invalid input rather than floating noise.
"""

from __future__ import annotations

from dataclasses import dataclass

TOL_HERM = 1e-9
TOL_TRACE = 1e-9
TOL_POVM = 1e-9
TOL_PSD = 1e-9
TOL_PROB = 1e-9
TOL_NOSIG = 1e-10
DISJOINT_TOL = 1e-9
LP_TOL = 1e-8
MASS_FLOOR = 1e-12
THEOREM2_TOL = 1e-10

DIM_CAP = 64
ENUMERATION_CAP = 10**7
VERTEX_CAP = 10**5


@dataclass(frozen=True)
class ToleranceProfile:
    """Pass/fail thresholds used when reporting check results."""

    name: str
    nosig: float = TOL_NOSIG
    disjoint: float = DISJOINT_TOL
    lp: float = LP_TOL
    prob: float = TOL_PROB


DEFAULT_PROFILE = ToleranceProfile("default")

# "strict" tightens every reported pass/fail threshold tenfold; the
# underlying arithmetic is unchanged.
STRICT_PROFILE = ToleranceProfile(
    "strict",
    nosig=TOL_NOSIG / 10,
    disjoint=DISJOINT_TOL / 10,
    lp=LP_TOL / 10,
    prob=TOL_PROB / 10,
)

PROFILES = {p.name: p for p in (DEFAULT_PROFILE, STRICT_PROFILE)}
