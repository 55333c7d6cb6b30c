"""Discrete evaluation of the generalized energy norms.

The per-time norms follow the standard vector-field definitions: the energy
norm combines the L2 norms of a field and its four first derivatives in
quadrature, and the order-N norms sum that quantity over all generator
words of order at most N.  Space-time norms replace the supremum over all
time by a supremum over the recorded horizon, which every report states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import WindowDepthError
from .fields import Field, FieldWindow, partial_values
from .gamma.discrete import apply_generator

DEFAULT_WEIGHT_EPS = 0.25  # exponent offset in the (1+t)^(1+eps) source weight


@dataclass
class NormReport:
    """Per-time norms of one window."""

    t: float
    order: int
    energy: float  # quadrature-type norm over u and its first derivatives
    sup: float  # max-type norm over u and its first derivatives
    gamma_sobolev: dict = field(default_factory=dict)  # order -> value
    gamma_sup: dict = field(default_factory=dict)


@dataclass
class SpacetimeNormReport:
    """Supremum-over-horizon norms of a recorded run."""

    horizon: float
    order: int
    weight: float
    sobolev_sup: float  # sup_t of the order-N quadrature norm
    weighted_sup: float  # sup_t (1+t)^weight of the order-N max norm
    source_weighted: float  # sup_t (1+t)^weight of the source's order-N norm
    delta: float  # the order-N quadrature norm at t=0


def _first_derivatives(window: FieldWindow):
    if window.radius < 1:
        raise WindowDepthError("norms need window radius >= 1")
    grid = window.grid
    u = window.level(0)
    ut = (window.level(1) - window.level(-1)) / (2.0 * grid.dt)
    spat = [partial_values(u, i, grid.h) for i in (1, 2, 3)]
    return u, ut, spat


def energy_norm(window: FieldWindow) -> float:
    """Quadrature combination of u and all four first derivatives in L2."""
    u, ut, spat = _first_derivatives(window)
    h3 = window.grid.h ** 3
    total = np.sum(u * u) + np.sum(ut * ut)
    for s in spat:
        total += np.sum(s * s)
    return float(np.sqrt(h3 * total))


def sup_norm(window: FieldWindow) -> float:
    """Sum of max norms of u and all four first derivatives."""
    u, ut, spat = _first_derivatives(window)
    total = np.max(np.abs(u)) + np.max(np.abs(ut))
    for s in spat:
        total += np.max(np.abs(s))
    return float(total)


def _word_windows(window: FieldWindow, max_order: int, ordering):
    """Depth-first traversal applying one generator per step.

    Yields the window of every word with order <= max_order, sharing
    intermediate applications between words with a common tail.
    """
    order = ordering if ordering is not None else tuple(range(10))

    def rec(win, depth, max_pos):
        yield win
        if depth == max_order:
            return
        # extend on the left by any generator at or before max_pos in the
        # ordering, so each multi-index is produced exactly once
        for pos in range(max_pos + 1):
            child = apply_generator(win, order[pos])
            yield from rec(child, depth + 1, pos)

    yield window
    if max_order >= 1:
        for pos in range(len(order)):
            child = apply_generator(window, order[pos])
            yield from rec(child, 1, pos)


def _gamma_norm(window: FieldWindow, n: int, kind, ordering=None) -> float:
    if window.radius < n + 1:
        raise WindowDepthError(
            f"order-{n} norm needs window radius >= {n + 1}, have {window.radius}"
        )
    total = 0.0
    for win in _word_windows(window, n, ordering):
        total += kind(win)
    return total


def gamma_sobolev_norm(window: FieldWindow, n: int, ordering=None) -> float:
    """Sum of energy norms over all words of order <= n."""
    return _gamma_norm(window, n, energy_norm, ordering)


def gamma_sup_norm(window: FieldWindow, n: int, ordering=None) -> float:
    """Sum of max-type norms over all words of order <= n."""
    return _gamma_norm(window, n, sup_norm, ordering)


def norm_report(window: FieldWindow, orders=(0,), ordering=None) -> NormReport:
    """Evaluate the per-time norms at every requested order at once."""
    max_order = max(orders)
    if window.radius < max_order + 1:
        raise WindowDepthError(
            f"order-{max_order} norms need window radius >= {max_order + 1}"
        )
    sob = {n: 0.0 for n in orders}
    sup = {n: 0.0 for n in orders}
    order = ordering if ordering is not None else tuple(range(10))

    def visit(win, depth):
        e, s = energy_norm(win), sup_norm(win)
        for n in orders:
            if depth <= n:
                sob[n] += e
                sup[n] += s

    def rec(win, depth, max_pos):
        visit(win, depth)
        if depth == max_order:
            return
        for pos in range(max_pos + 1):
            rec(apply_generator(win, order[pos]), depth + 1, pos)

    visit(window, 0)
    if max_order >= 1:
        for pos in range(len(order)):
            rec(apply_generator(window, order[pos]), 1, pos)

    return NormReport(
        t=window.center_time,
        order=max_order,
        energy=energy_norm(window),
        sup=sup_norm(window),
        gamma_sobolev=sob,
        gamma_sup=sup,
    )


def delta_n(u0: Field, u1: Field, n: int, context) -> float:
    """Order-n quadrature norm of the data, via a synthetic window at t=0.

    The window is built by marching the governing equation (the context)
    forward and backward, so the value agrees with the t=0 report of a
    solver run started from the same data.
    """
    window = context.build_window(u0.values, u1.values, 0.0, n + 1)
    return gamma_sobolev_norm(window, n)


def spacetime_norms(series, k: float, n: int, source=None) -> SpacetimeNormReport:
    """Supremum-over-horizon norms of a recorded series.

    ``series`` must carry order-n per-time norms; ``source`` (optional)
    contributes the weighted source norm via analytic windows at the
    recorded times.
    """
    if len(series.times) == 0:
        raise ValueError("series is empty")
    if n not in series.gamma_sobolev:
        raise KeyError(f"series lacks order-{n} norms")
    times = np.asarray(series.times)
    sob = np.asarray(series.gamma_sobolev[n])
    sup = np.asarray(series.gamma_sup[n])
    weight = (1.0 + times) ** k
    source_weighted = 0.0
    if source is not None:
        grid = series.grid
        radius = n + 1
        vals = []
        for t in series.times:
            gw = FieldWindow.from_function(grid, source, t, radius)
            vals.append(gamma_sobolev_norm(gw, n))
        source_weighted = float(np.max(weight * np.asarray(vals)))
    return SpacetimeNormReport(
        horizon=float(times[-1]),
        order=n,
        weight=k,
        sobolev_sup=float(np.max(sob)),
        weighted_sup=float(np.max(weight * sup)),
        source_weighted=source_weighted,
        delta=float(sob[0]),
    )
