"""Two-player coordination games with private states of nature.

Both players receive independent private states, pick actions without
communicating, and share the single payoff ``payoff[a, b, state_a, state_b]``.
The classical value is the exact maximum of the expected payoff over all
deterministic strategy pairs, which also bounds every shared-randomness
strategy because the objective is linear in each player's behavior.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import tolerances as tol
from .errors import EnumerationCapExceeded, ShapeMismatch, ValidationError


def _validate_prior(values, size: int, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.shape[0] != size:
        raise ValidationError(f"{name}: expected {size} entries, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name}: contains non-finite entries")
    if arr.min() < 0.0:
        raise ValidationError(f"{name}: negative probability {arr.min()!r}")
    total = float(arr.sum())
    if abs(total - 1.0) > tol.TOL_PROB:
        raise ValidationError(f"{name}: sums to {total!r}, not 1")
    arr = arr / total
    arr.setflags(write=False)
    return arr


def _validate_labels(values, name: str) -> tuple:
    labels = tuple(str(v) for v in values)
    if not labels:
        raise ValidationError(f"{name}: must be non-empty")
    if len(set(labels)) != len(labels):
        raise ValidationError(f"{name}: labels must be unique")
    return labels


@dataclass(frozen=True)
class Game:
    """States of nature, independent priors, action sets and the joint payoff."""

    states_a: tuple
    states_b: tuple
    prior_a: np.ndarray
    prior_b: np.ndarray
    actions_a: tuple
    actions_b: tuple
    payoff: np.ndarray  # indexed [action_a, action_b, state_a, state_b]

    def __post_init__(self):
        object.__setattr__(self, "states_a", _validate_labels(self.states_a, "states_a"))
        object.__setattr__(self, "states_b", _validate_labels(self.states_b, "states_b"))
        object.__setattr__(self, "actions_a", _validate_labels(self.actions_a, "actions_a"))
        object.__setattr__(self, "actions_b", _validate_labels(self.actions_b, "actions_b"))
        object.__setattr__(self, "prior_a", _validate_prior(self.prior_a, len(self.states_a), "prior_a"))
        object.__setattr__(self, "prior_b", _validate_prior(self.prior_b, len(self.states_b), "prior_b"))
        pay = np.asarray(self.payoff, dtype=float)
        expected = (len(self.actions_a), len(self.actions_b), len(self.states_a), len(self.states_b))
        if pay.shape != expected:
            raise ValidationError(f"payoff: expected shape {expected}, got {pay.shape}")
        if not np.all(np.isfinite(pay)):
            raise ValidationError("payoff: contains non-finite entries")
        pay = pay.copy()
        pay.setflags(write=False)
        object.__setattr__(self, "payoff", pay)

    @property
    def shape(self) -> tuple:
        return self.payoff.shape


@dataclass(frozen=True)
class BehaviorTable:
    """Conditional action distribution q(a, b | state_a, state_b)."""

    table: np.ndarray  # indexed [action_a, action_b, state_a, state_b]

    def __post_init__(self):
        q = np.asarray(self.table, dtype=float)
        if q.ndim != 4:
            raise ValidationError(f"behavior: expected 4 axes, got shape {q.shape}")
        if not np.all(np.isfinite(q)):
            raise ValidationError("behavior: contains non-finite entries")
        low = float(q.min())
        if low < -tol.TOL_PSD:
            raise ValidationError(f"behavior: probability {low:.3e} below -{tol.TOL_PSD}")
        q = np.clip(q, 0.0, None)
        sums = q.sum(axis=(0, 1))
        if np.max(np.abs(sums - 1.0)) > tol.TOL_PROB:
            raise ValidationError("behavior: a conditional slice does not sum to 1")
        q = q / sums[None, None, :, :]
        q.setflags(write=False)
        object.__setattr__(self, "table", q)

    @property
    def shape(self) -> tuple:
        return self.table.shape


@dataclass(frozen=True)
class ConditionalStrategy:
    """Per-state mixed action: row ``probs[state]`` is a distribution over actions."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 2:
            raise ValidationError(f"strategy: expected 2 axes, got shape {p.shape}")
        if not np.all(np.isfinite(p)) or p.min() < -tol.TOL_PSD:
            raise ValidationError("strategy: rows must be finite and nonnegative")
        p = np.clip(p, 0.0, None)
        sums = p.sum(axis=1)
        if np.max(np.abs(sums - 1.0)) > tol.TOL_PROB:
            raise ValidationError("strategy: a row does not sum to 1")
        p = p / sums[:, None]
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @classmethod
    def deterministic(cls, choices, n_actions: int) -> "ConditionalStrategy":
        """Pure strategy playing action ``choices[state]`` with certainty."""
        rows = np.zeros((len(choices), n_actions))
        for i, a in enumerate(choices):
            rows[i, a] = 1.0
        return cls(rows)


def product_behavior(strategy_a: ConditionalStrategy, strategy_b: ConditionalStrategy) -> BehaviorTable:
    """Behavior of two players acting independently on their own states."""
    q = np.einsum("fa,wb->abfw", strategy_a.probs, strategy_b.probs)
    return BehaviorTable(q)


def expected_payoff(game: Game, behavior: BehaviorTable) -> float:
    """Prior-weighted expected payoff of a behavior."""
    if behavior.shape != game.shape:
        raise ShapeMismatch(f"behavior shape {behavior.shape} vs game shape {game.shape}")
    return float(
        np.einsum("abfw,abfw,f,w->", game.payoff, behavior.table, game.prior_a, game.prior_b)
    )


@dataclass(frozen=True)
class ClassicalSolution:
    """Exact optimum over deterministic strategy pairs."""

    value: float
    strategy_a: dict  # state label -> action label
    strategy_b: dict


def classical_value(game: Game, *, cap: int = tol.ENUMERATION_CAP) -> ClassicalSolution:
    """Enumerate deterministic strategy pairs and return the exact maximum.

    Because the objective is linear in each player's strategy the maximum
    over all shared-randomness behaviors is attained at a deterministic
    pair, so this enumeration is the exact classical value.  Ties are broken
    toward the lexicographically smallest encoding (player A's action
    indices in state order, then player B's).
    """
    n_a, n_b = len(game.actions_a), len(game.actions_b)
    n_phi, n_psi = len(game.states_a), len(game.states_b)
    pairs = (n_a ** n_phi) * (n_b ** n_psi)
    if pairs > cap:
        raise EnumerationCapExceeded(f"{pairs} strategy pairs exceed the cap {cap}")

    # weighted[a, b, phi, psi] folds both priors into the payoff
    weighted = game.payoff * game.prior_a[None, None, :, None] * game.prior_b[None, None, None, :]

    best_value = -math.inf
    best_fa = None
    best_fb = None
    for fa in itertools.product(range(n_a), repeat=n_phi):
        # With A fixed, B's optimum separates per state: score[b, psi] is the
        # total payoff contribution of playing b in state psi.
        score = np.zeros((n_b, n_psi))
        for phi, a in enumerate(fa):
            score += weighted[a, :, phi, :]
        fb = tuple(int(np.argmax(score[:, psi])) for psi in range(n_psi))
        value = float(sum(score[fb[psi], psi] for psi in range(n_psi)))
        if value > best_value:
            best_value = value
            best_fa = fa
            best_fb = fb

    return ClassicalSolution(
        value=best_value,
        strategy_a={game.states_a[i]: game.actions_a[a] for i, a in enumerate(best_fa)},
        strategy_b={game.states_b[i]: game.actions_b[b] for i, b in enumerate(best_fb)},
    )


CHSH_STATES_A = ("0", "pi/4")
CHSH_STATES_B = ("-pi/8", "pi/8")
CHSH_ANGLES_A = {"0": 0.0, "pi/4": math.pi / 4}
CHSH_ANGLES_B = {"-pi/8": -math.pi / 8, "pi/8": math.pi / 8}


def chsh_game() -> Game:
    """The binary coordination game with angle-valued states.

    Players win (payoff 1) by playing opposite actions, except in the single
    cell (state_a = pi/4, state_b = -pi/8) where they must play the same
    action.  States are uniform and independent.
    """
    payoff = np.zeros((2, 2, 2, 2))
    for a, b, f, w in itertools.product(range(2), repeat=4):
        same_required = (f, w) == (1, 0)
        won = (a == b) if same_required else (a != b)
        payoff[a, b, f, w] = 1.0 if won else 0.0
    return Game(
        states_a=CHSH_STATES_A,
        states_b=CHSH_STATES_B,
        prior_a=(0.5, 0.5),
        prior_b=(0.5, 0.5),
        actions_a=("0", "1"),
        actions_b=("0", "1"),
        payoff=payoff,
    )
