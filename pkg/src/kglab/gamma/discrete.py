"""Discrete application of generator words to field windows.

A generator applied to a window of radius k yields a window of radius k-1:
time derivatives consume one level on each side, and the coefficient of a
mixed-rotation generator is evaluated at each output level's own time so
that subsequent time differencing stays consistent.
"""

from __future__ import annotations

import numpy as np

from ..errors import WindowDepthError
from ..fields import Field, FieldWindow, partial_values
from .algebra import GammaOp
from .words import MultiIndex10


def apply_generator(window: FieldWindow, index: int) -> FieldWindow:
    """Apply one generator (published ordering index) to every level."""
    if window.radius < 1:
        raise WindowDepthError("generator application needs window radius >= 1")
    grid = window.grid
    h, dt = grid.h, grid.dt
    out = []
    for m in range(-(window.radius - 1), window.radius):
        lev = window.level(m)
        if index == 0:  # d/dt
            vals = (window.level(m + 1) - window.level(m - 1)) / (2.0 * dt)
        elif index in (1, 2, 3):
            vals = partial_values(lev, index, h)
        elif index in (4, 5, 6):  # O12, O23, O31
            i, j = {4: (1, 2), 5: (2, 3), 6: (3, 1)}[index]
            vals = grid.coord(i) * partial_values(lev, j, h) - grid.coord(j) * partial_values(
                lev, i, h
            )
        elif index in (7, 8, 9):  # O0i = t d_i + x_i d_t
            i = index - 6
            tau = window.level_time(m)
            ut = (window.level(m + 1) - window.level(m - 1)) / (2.0 * dt)
            vals = tau * partial_values(lev, i, h) + grid.coord(i) * ut
        else:
            raise ValueError(f"generator index out of range: {index}")
        out.append(vals)
    return FieldWindow(grid, window.center_time, out)


def apply_word_window(
    window: FieldWindow, alpha: MultiIndex10, ordering=None, keep_radius: int = 0
) -> FieldWindow:
    """Apply the word selected by alpha, innermost generator first.

    The result keeps radius window.radius - |alpha|, which must be at least
    ``keep_radius``.
    """
    seq = alpha.factor_sequence(ordering)
    if window.radius - len(seq) < keep_radius:
        raise WindowDepthError(
            f"word of order {len(seq)} on window radius {window.radius} leaves "
            f"less than radius {keep_radius}"
        )
    for index in reversed(seq):
        window = apply_generator(window, index)
    return window


def apply_word(window: FieldWindow, alpha: MultiIndex10, ordering=None) -> Field:
    """Center-level field after applying the word selected by alpha."""
    return apply_word_window(window, alpha, ordering).center()


def apply_operator(window: FieldWindow, op: GammaOp) -> Field:
    """Apply a canonical-form operator by repeated first-order stencils.

    Derivative words act right to left one partial at a time; polynomial
    coefficients multiply at the center time afterwards.  Window radius
    must cover the operator's total derivative order.
    """
    grid = window.grid
    need = op.order()
    if window.radius < need:
        raise WindowDepthError(
            f"operator of order {need} needs window radius >= {need}, have {window.radius}"
        )
    total = np.zeros_like(window.level(0))
    t0 = window.center_time
    for (poly, deriv), coeff in op.terms.items():
        work = window
        for axis in (0, 1, 2, 3):
            for _ in range(deriv[axis]):
                work = apply_generator(work, axis)
        vals = work.level(0)
        coeff_arr = float(coeff) * (t0 ** poly[0] if poly[0] else 1.0)
        term = vals * coeff_arr
        for i in (1, 2, 3):
            if poly[i]:
                term = term * grid.coord(i) ** poly[i]
        total += term
    return Field(grid, total)


def leibniz_residual(f, g, index: int) -> float:
    """Max-norm residual of the product rule for one generator.

    Accepts fields (lifted to static windows) or windows sharing a grid;
    the residual is gen(f*g) - gen(f)*g - f*gen(g) at the center level.
    """
    if isinstance(f, Field):
        f = FieldWindow.static(f)
    if isinstance(g, Field):
        g = FieldWindow.static(g, radius=f.radius, center_time=f.center_time)
    if f.radius != g.radius:
        raise ValueError("windows must share a radius")
    prod = FieldWindow(
        f.grid, f.center_time, [a * b for a, b in zip(f.levels, g.levels)]
    )
    lhs = apply_generator(prod, index).level(0)
    gf = apply_generator(f, index).level(0)
    gg = apply_generator(g, index).level(0)
    rhs = gf * g.level(0) + f.level(0) * gg
    return float(np.max(np.abs(lhs - rhs)))
