"""Scalar fields on a uniform cube and their finite-difference calculus.

The grid covers [-L, L]^3 with n nodes per axis.  All stencils are
second-order centered in the interior with second-order one-sided fallbacks
at the faces; compactly supported data never reaches the faces in a healthy
run, so the one-sided branches are a safety net rather than a feature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SupportError, WindowDepthError


@dataclass(frozen=True)
class Grid3:
    """Uniform Cartesian grid over [-L, L]^3 plus the time step."""

    half_width: float
    points_per_axis: int
    dt: float

    def __post_init__(self):
        if self.points_per_axis < 8:
            raise ValueError(f"need at least 8 points per axis, got {self.points_per_axis}")
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        # leapfrog stability margin for the 7-point Laplacian plus unit mass
        if self.dt > self.h / 2 * (1 + 1e-12):
            raise ValueError(f"CFL violated: dt={self.dt} exceeds h/2={self.h / 2}")

    @property
    def n(self) -> int:
        return self.points_per_axis

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / (self.points_per_axis - 1)

    def axis(self) -> np.ndarray:
        """Node coordinates along one axis."""
        return np.linspace(-self.half_width, self.half_width, self.points_per_axis)

    def coord(self, i: int) -> np.ndarray:
        """Coordinate array for axis i in {1,2,3}, shaped for broadcasting."""
        ax = self.axis()
        shape = [1, 1, 1]
        shape[i - 1] = self.points_per_axis
        return ax.reshape(shape)

    def radius_sq(self) -> np.ndarray:
        """|x|^2 at every node (broadcast to full shape)."""
        return self.coord(1) ** 2 + self.coord(2) ** 2 + self.coord(3) ** 2

    def zeros(self) -> np.ndarray:
        n = self.points_per_axis
        return np.zeros((n, n, n))

    def sample(self, func, t: float = 0.0) -> np.ndarray:
        """Evaluate func(t, x1, x2, x3) on the full grid."""
        return np.broadcast_to(
            np.asarray(func(t, self.coord(1), self.coord(2), self.coord(3)), dtype=float),
            (self.n, self.n, self.n),
        ).copy()


class Field:
    """A scalar sample per grid node.  Values are immutable once built."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid3, values: np.ndarray):
        values = np.ascontiguousarray(values, dtype=float)
        n = grid.points_per_axis
        if values.shape != (n, n, n):
            raise ValueError(f"values shape {values.shape} does not match grid {n}^3")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("Field is immutable")

    @classmethod
    def zero(cls, grid: Grid3) -> "Field":
        return cls(grid, grid.zeros())

    @classmethod
    def from_function(cls, grid: Grid3, func, t: float = 0.0) -> "Field":
        return cls(grid, grid.sample(func, t))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def l2_norm(self) -> float:
        """Riemann-sum L2 norm with weight h^3."""
        h = self.grid.h
        return float(np.sqrt(h**3 * np.sum(self.values**2)))


class FieldWindow:
    """A rolling window of 2k+1 consecutive time levels of one field.

    Level m (|m| <= k) lives at time center_time + m*dt, so centered time
    derivatives up to order 2k are available at the center with O(dt^2)
    accuracy.
    """

    __slots__ = ("grid", "center_time", "radius", "levels")

    def __init__(self, grid: Grid3, center_time: float, levels):
        levels = list(levels)
        if len(levels) % 2 != 1:
            raise ValueError("window needs an odd number of levels")
        for lv in levels:
            if lv.shape != levels[0].shape:
                raise ValueError("all levels must share one grid shape")
        radius = (len(levels) - 1) // 2
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "center_time", float(center_time))
        object.__setattr__(self, "radius", radius)
        object.__setattr__(self, "levels", [np.asarray(lv, dtype=float) for lv in levels])

    def __setattr__(self, name, value):
        raise AttributeError("FieldWindow is immutable")

    @classmethod
    def static(cls, f: Field, radius: int = 1, center_time: float = 0.0) -> "FieldWindow":
        """Window whose levels all equal f (time-independent field)."""
        return cls(f.grid, center_time, [f.values] * (2 * radius + 1))

    @classmethod
    def from_function(cls, grid: Grid3, func, center_time: float, radius: int) -> "FieldWindow":
        levels = [
            grid.sample(func, center_time + m * grid.dt) for m in range(-radius, radius + 1)
        ]
        return cls(grid, center_time, levels)

    def level(self, m: int) -> np.ndarray:
        """Raw values at offset m from the center, |m| <= radius."""
        if abs(m) > self.radius:
            raise WindowDepthError(f"level {m} outside window of radius {self.radius}")
        return self.levels[m + self.radius]

    def level_time(self, m: int) -> float:
        return self.center_time + m * self.grid.dt

    def center(self) -> Field:
        return Field(self.grid, self.level(0))

    def shrink(self, by: int = 1) -> "FieldWindow":
        if by > self.radius:
            raise WindowDepthError("cannot shrink below radius 0")
        if by == 0:
            return self
        return FieldWindow(self.grid, self.center_time, self.levels[by:-by])

    def time_derivative(self) -> "FieldWindow":
        """Centered d/dt, returning a window one level shallower."""
        if self.radius < 1:
            raise WindowDepthError("time derivative needs window radius >= 1")
        dt = self.grid.dt
        new = [
            (self.levels[i + 2] - self.levels[i]) / (2.0 * dt)
            for i in range(len(self.levels) - 2)
        ]
        return FieldWindow(self.grid, self.center_time, new)

    def __sub__(self, other: "FieldWindow") -> "FieldWindow":
        if self.radius != other.radius:
            raise ValueError("window radii differ")
        return FieldWindow(
            self.grid,
            self.center_time,
            [a - b for a, b in zip(self.levels, other.levels)],
        )


def _axis_partial(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Second-order first derivative along a spatial array axis."""
    out = np.empty_like(values)
    sl = [slice(None)] * 3

    def sub(*idx):
        s = list(sl)
        s[axis] = idx[0] if len(idx) == 1 else slice(*idx)
        return tuple(s)

    out[sub(1, -1)] = (values[sub(2, None)] - values[sub(0, -2)]) / (2.0 * h)
    out[sub(0)] = (-3.0 * values[sub(0)] + 4.0 * values[sub(1)] - values[sub(2)]) / (2.0 * h)
    out[sub(-1)] = (3.0 * values[sub(-1)] - 4.0 * values[sub(-2)] + values[sub(-3)]) / (2.0 * h)
    return out


def _axis_second(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Second-order second derivative along a spatial array axis."""
    out = np.empty_like(values)
    sl = [slice(None)] * 3

    def sub(*idx):
        s = list(sl)
        s[axis] = idx[0] if len(idx) == 1 else slice(*idx)
        return tuple(s)

    h2 = h * h
    out[sub(1, -1)] = (values[sub(2, None)] - 2.0 * values[sub(1, -1)] + values[sub(0, -2)]) / h2
    out[sub(0)] = (
        2.0 * values[sub(0)] - 5.0 * values[sub(1)] + 4.0 * values[sub(2)] - values[sub(3)]
    ) / h2
    out[sub(-1)] = (
        2.0 * values[sub(-1)] - 5.0 * values[sub(-2)] + 4.0 * values[sub(-3)] - values[sub(-4)]
    ) / h2
    return out


def partial_values(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Spatial partial along axis in {1,2,3} on a raw array."""
    return _axis_partial(values, axis - 1, h)


def second_partial_values(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Pure second spatial derivative along axis in {1,2,3} on a raw array."""
    return _axis_second(values, axis - 1, h)


def laplacian_values(values: np.ndarray, h: float) -> np.ndarray:
    return (
        _axis_second(values, 0, h)
        + _axis_second(values, 1, h)
        + _axis_second(values, 2, h)
    )


def partial(f, axis: int) -> Field:
    """First partial derivative.  Axis 0 is time and requires a FieldWindow."""
    if axis == 0:
        if not isinstance(f, FieldWindow):
            raise WindowDepthError("time derivative requires a FieldWindow")
        if f.radius < 1:
            raise WindowDepthError("time derivative needs window radius >= 1")
        dt = f.grid.dt
        return Field(f.grid, (f.level(1) - f.level(-1)) / (2.0 * dt))
    if axis not in (1, 2, 3):
        raise ValueError(f"axis must be 0..3, got {axis}")
    if isinstance(f, FieldWindow):
        f = f.center()
    return Field(f.grid, partial_values(f.values, axis, f.grid.h))


def laplacian(f: Field) -> Field:
    """7-point second-order Laplacian."""
    if isinstance(f, FieldWindow):
        f = f.center()
    return Field(f.grid, laplacian_values(f.values, f.grid.h))


def support_radius(f, tol: float) -> float:
    """Largest |x| over nodes where |f| exceeds tol; 0 when none do."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if isinstance(f, FieldWindow):
        f = f.center()
    mask = np.abs(f.values) > tol
    if not mask.any():
        return 0.0
    r2 = np.broadcast_to(f.grid.radius_sq(), f.values.shape)
    return float(np.sqrt(np.max(r2[mask])))


def inject_initial(f: Field, g: Field, eps: float, context) -> FieldWindow:
    """Initial window at t=0 carrying u = eps*f and du/dt = eps*g.

    The ghost past/future levels come from one Taylor step whose second
    time derivative is supplied by the governing equation (the context's
    ``utt`` hook), so the window is consistent with the dynamics to O(dt^2).
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    grid = f.grid
    sup = max(f.sup_norm(), g.sup_norm())
    if sup > 0:
        tol = 1e-10 * sup
        r0 = max(support_radius(f, tol), support_radius(g, tol))
        if r0 > grid.half_width - 1.0:
            raise SupportError(
                f"initial support radius {r0:.3f} exceeds L-1 = {grid.half_width - 1.0:.3f}"
            )
    u0 = eps * f.values
    u1 = eps * g.values
    utt = context.utt(u0, u1, 0.0)
    dt = grid.dt
    minus = u0 - dt * u1 + 0.5 * dt * dt * utt
    plus = u0 + dt * u1 + 0.5 * dt * dt * utt
    return FieldWindow(grid, 0.0, [minus, u0, plus])


# --- snapshot file format -------------------------------------------------
#
# One ASCII header line "n=<int> L=<float> t=<float>\n" followed by n^3
# little-endian float64 values in x-major order: node (i,j,k) at offset
# (i*n + j)*n + k, with i indexing x1.


def write_snapshot(path, f: Field, t: float) -> None:
    with open(path, "wb") as fh:
        header = f"n={f.grid.points_per_axis} L={f.grid.half_width!r} t={t!r}\n"
        fh.write(header.encode("ascii"))
        fh.write(f.values.astype("<f8").tobytes(order="C"))


def read_snapshot(path, dt: float = None):
    """Read a snapshot file, returning (field, t).

    dt is not stored in the file; pass one to rebuild the grid (defaults to
    the CFL bound h/2).
    """
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").strip()
        parts = dict(kv.split("=", 1) for kv in header.split())
        n = int(parts["n"])
        half_width = float(parts["L"])
        t = float(parts["t"])
        raw = fh.read(n * n * n * 8)
    if len(raw) != n * n * n * 8:
        raise ValueError("snapshot payload truncated")
    values = np.frombuffer(raw, dtype="<f8").reshape(n, n, n).copy()
    h = 2.0 * half_width / (n - 1)
    grid = Grid3(half_width, n, dt if dt is not None else h / 2)
    return Field(grid, values), t
