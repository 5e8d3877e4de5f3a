"""Reflection-based simplex minimization, batched over many independent starts.

The classic Nelder-Mead step (reflect, expand, contract, shrink) is applied
to a whole batch of simplexes at once; every branch decision is a boolean
mask, so each batch row follows exactly the trajectory it would follow if
run alone.  Rows whose value spread falls below the tolerance are frozen and
never touched again, which makes results independent of how a batch is
chunked across workers.

No randomness is used anywhere; the initial simplex is a fixed axis step
away from the start point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NelderMeadResult:
    points: np.ndarray   # (batch, n) best vertex per row
    values: np.ndarray   # (batch,) value at that vertex
    history: np.ndarray | None  # (iterations+1, batch) best value per iteration


def nelder_mead_batch(
    fn,
    starts: np.ndarray,
    *,
    iterations: int = 200,
    tolerance: float = 1e-10,
    step: float = 0.25,
    record_history: bool = False,
) -> NelderMeadResult:
    """Minimize ``fn`` from every row of ``starts`` simultaneously.

    ``fn`` maps an (k, n) array of points to a (k,) array of values and must
    be row-independent (the value of one row may not depend on the others).
    """
    alpha, gamma, beta, sigma = 1.0, 2.0, 0.5, 0.5
    starts = np.asarray(starts, dtype=float)
    batch, n = starts.shape

    simplex = np.repeat(starts[:, None, :], n + 1, axis=1)
    for i in range(n):
        simplex[:, i + 1, i] += step
    values = np.asarray(fn(simplex.reshape(-1, n)), dtype=float).reshape(batch, n + 1)

    active = np.ones(batch, dtype=bool)
    history = [] if record_history else None

    for _ in range(iterations):
        order = np.argsort(values, axis=1, kind="stable")
        simplex = np.take_along_axis(simplex, order[:, :, None], axis=1)
        values = np.take_along_axis(values, order, axis=1)
        if record_history:
            history.append(values[:, 0].copy())

        active &= (values[:, -1] - values[:, 0]) > tolerance
        rows = np.nonzero(active)[0]
        if rows.size == 0:
            break

        sub = simplex[rows]
        fsub = values[rows]
        centroid = sub[:, :-1, :].mean(axis=1)
        worst = sub[:, -1, :]
        reflected = centroid + alpha * (centroid - worst)
        f_reflected = np.asarray(fn(reflected), dtype=float)

        f_best = fsub[:, 0]
        f_second = fsub[:, -2]
        f_worst = fsub[:, -1]

        expand = f_reflected < f_best
        accept_reflect = ~expand & (f_reflected < f_second)
        contract = ~(expand | accept_reflect)
        outside = contract & (f_reflected < f_worst)
        inside = contract & ~outside

        # one extra evaluation covers expansion and both contraction kinds
        candidate = np.where(
            expand[:, None],
            centroid + gamma * (reflected - centroid),
            np.where(
                outside[:, None],
                centroid + beta * (reflected - centroid),
                centroid + beta * (worst - centroid),
            ),
        )
        f_candidate = np.asarray(fn(candidate), dtype=float)

        new_point = reflected.copy()
        new_value = f_reflected.copy()
        take = (expand & (f_candidate < f_reflected)) \
            | (outside & (f_candidate <= f_reflected)) \
            | (inside & (f_candidate < f_worst))
        new_point[take] = candidate[take]
        new_value[take] = f_candidate[take]

        accepted = expand | accept_reflect | (outside & (f_candidate <= f_reflected)) \
            | (inside & (f_candidate < f_worst))
        sub[accepted, -1, :] = new_point[accepted]
        fsub[accepted, -1] = new_value[accepted]

        shrink_rows = np.nonzero(~accepted)[0]
        if shrink_rows.size:
            block = sub[shrink_rows]
            base = block[:, :1, :]
            shrunk = base + sigma * (block[:, 1:, :] - base)
            f_shrunk = np.asarray(fn(shrunk.reshape(-1, n)), dtype=float)
            sub[shrink_rows, 1:, :] = shrunk
            fsub[shrink_rows, 1:] = f_shrunk.reshape(shrink_rows.size, n)

        simplex[rows] = sub
        values[rows] = fsub

    order = np.argsort(values, axis=1, kind="stable")
    simplex = np.take_along_axis(simplex, order[:, :, None], axis=1)
    values = np.take_along_axis(values, order, axis=1)
    if record_history:
        history.append(values[:, 0].copy())

    return NelderMeadResult(
        points=simplex[:, 0, :].copy(),
        values=values[:, 0].copy(),
        history=np.array(history) if record_history else None,
    )
