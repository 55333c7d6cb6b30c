"""Named initial-data families, manufactured profiles and selector registries.

Reproducible experiments need canonical closed-form instances of the
"arbitrary smooth compactly supported data" the theory allows.  Three
families are shipped:

  gaussian  exp(-r^2/sigma^2) with a smooth cutoff that kills it outside
            radius R (identically 1 inside 0.6 R)
  bump      the classic profile exp(-1/(1 - (r/R)^2)), identically zero
            outside radius R, scaled to peak value 1
  ring      a radial shell exp(-(r - r0)^2/sigma^2) with the same cutoff

All profiles peak at amplitude 1 so an eps prefactor is the data size.
"""

from __future__ import annotations

import numpy as np

from .fields import Field, Grid3
from .solver import NonlinearSpec, PerturbationSpec, SourceSpec, manufactured_source


# --- smooth building blocks -------------------------------------------------


def _phi(x):
    """exp(-1/x) extended by zero through x <= 0; the standard mollifier leg."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 1e-12
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    a = _phi(x)
    b = _phi(1.0 - x)
    return a / (a + b + 1e-300)


def smooth_cutoff(r, inner, outer):
    """1 inside radius ``inner``, 0 outside ``outer``, smooth between."""
    return 1.0 - smooth_step((np.asarray(r, dtype=float) - inner) / (outer - inner))


def bump_profile(s):
    """exp(1 - 1/(1-s^2)) for |s| < 1, zero outside; peak value 1 at s=0."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0 - 1e-12
    si = s[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - si * si))
    return out


def bump_profile_d1(s):
    """First derivative of the unit bump profile."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0 - 1e-12
    si = s[inside]
    q = 1.0 - si * si
    out[inside] = np.exp(1.0 - 1.0 / q) * (-2.0 * si / (q * q))
    return out


def bump_profile_d2(s):
    """Second derivative of the unit bump profile."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0 - 1e-12
    si = s[inside]
    q = 1.0 - si * si
    d1_factor = -2.0 * si / (q * q)
    out[inside] = np.exp(1.0 - 1.0 / q) * (
        d1_factor * d1_factor - 2.0 * (1.0 + 3.0 * si * si) / (q * q * q)
    )
    return out


def _radius(x1, x2, x3):
    return np.sqrt(np.asarray(x1) ** 2 + np.asarray(x2) ** 2 + np.asarray(x3) ** 2)


# --- data families ----------------------------------------------------------


def gaussian_data(radius=1.0, sigma=None):
    """Truncated Gaussian, supported in |x| <= radius."""
    sigma = sigma if sigma is not None else 0.35 * radius

    def f(t, x1, x2, x3):
        r = _radius(x1, x2, x3)
        return np.exp(-(r / sigma) ** 2) * smooth_cutoff(r, 0.6 * radius, radius)

    return f


def bump_data(radius=1.0):
    """The classic smooth bump supported in |x| <= radius."""

    def f(t, x1, x2, x3):
        return bump_profile(_radius(x1, x2, x3) / radius)

    return f


def bump_laplacian(radius=1.0):
    """Closed-form Laplacian of ``bump_data``; limits handled at r = 0."""

    def lap(t, x1, x2, x3):
        r = _radius(x1, x2, x3)
        s = r / radius
        d2 = bump_profile_d2(s)
        d1 = bump_profile_d1(s)
        near0 = np.asarray(s) < 1e-10
        ratio = np.where(near0, d2, np.divide(d1, np.where(near0, 1.0, s)))
        return (d2 + 2.0 * ratio) / radius**2

    return lap


def ring_data(radius=1.0, r0=None, sigma=None):
    """Radial shell supported in |x| <= radius."""
    r0 = r0 if r0 is not None else 0.5 * radius
    sigma = sigma if sigma is not None else 0.15 * radius

    def f(t, x1, x2, x3):
        r = _radius(x1, x2, x3)
        return np.exp(-(((r - r0) / sigma) ** 2)) * smooth_cutoff(r, 0.8 * radius, radius)

    return f


DATA_FAMILIES = {
    "gaussian": gaussian_data,
    "bump": bump_data,
    "ring": ring_data,
}


def make_data(name: str, grid: Grid3, radius: float = 1.0, **kw) -> Field:
    if name == "zero":
        return Field.zero(grid)
    if name not in DATA_FAMILIES:
        raise KeyError(f"unknown data family '{name}'")
    return Field.from_function(grid, DATA_FAMILIES[name](radius=radius, **kw))


# --- manufactured solutions -------------------------------------------------


class ManufacturedSolution:
    """Closed-form space-time profile eta(t) * B(x) with exact source.

    ``eta`` kinds: "cos" (cos(omega t)), "exp" (exp(-rate t)),
    "rational" (1/(1+t)^2).
    """

    def __init__(self, kind="cos", radius=2.0, omega=1.3, rate=0.5):
        self.kind = kind
        self.radius = radius
        self.omega = omega
        self.rate = rate
        self._b = bump_data(radius)
        self._lap_b = bump_laplacian(radius)

    def eta(self, t):
        if self.kind == "cos":
            return np.cos(self.omega * t)
        if self.kind == "exp":
            return np.exp(-self.rate * t)
        if self.kind == "rational":
            return 1.0 / (1.0 + t) ** 2
        raise KeyError(f"unknown profile kind '{self.kind}'")

    def eta_t(self, t):
        if self.kind == "cos":
            return -self.omega * np.sin(self.omega * t)
        if self.kind == "exp":
            return -self.rate * np.exp(-self.rate * t)
        return -2.0 / (1.0 + t) ** 3

    def eta_tt(self, t):
        if self.kind == "cos":
            return -self.omega**2 * np.cos(self.omega * t)
        if self.kind == "exp":
            return self.rate**2 * np.exp(-self.rate * t)
        return 6.0 / (1.0 + t) ** 4

    def u(self, t, x1, x2, x3):
        return self.eta(t) * self._b(t, x1, x2, x3)

    def ut(self, t, x1, x2, x3):
        return self.eta_t(t) * self._b(t, x1, x2, x3)

    def utt(self, t, x1, x2, x3):
        return self.eta_tt(t) * self._b(t, x1, x2, x3)

    def lap(self, t, x1, x2, x3):
        return self.eta(t) * self._lap_b(t, x1, x2, x3)

    def source(self) -> SourceSpec:
        return manufactured_source(
            self.u, self.utt, self.lap, name=f"manufactured-{self.kind}"
        )

    def initial_data(self, grid: Grid3):
        u0 = Field.from_function(grid, self.u, 0.0)
        u1 = Field.from_function(grid, self.ut, 0.0)
        return u0, u1


# --- named sources, perturbations, nonlinearities -------------------------


def make_source(name: str, **kw) -> SourceSpec | None:
    if name in ("none", ""):
        return None
    if name.startswith("manufactured-"):
        kind = name.split("-", 1)[1]
        return ManufacturedSolution(kind=kind, **kw).source()
    raise KeyError(f"unknown source '{name}'")


def make_perturbation(name: str, amplitude: float = 0.1, radius: float = 3.0) -> PerturbationSpec:
    """Named coefficient families, all certified admissible by construction."""
    if name in ("none", ""):
        return PerturbationSpec(name="none")
    if name == "gamma11-bump":
        prof = gaussian_data(radius=radius)

        def g11(t, x1, x2, x3):
            return amplitude * np.exp(-0.25 * t) * prof(t, x1, x2, x3)

        return PerturbationSpec(
            gammas={(1, 1): g11}, sup_bound=abs(amplitude), name=name
        )
    if name == "gamma00-bump":
        prof = gaussian_data(radius=radius)

        def g00(t, x1, x2, x3):
            return amplitude * np.exp(-0.25 * t) * prof(t, x1, x2, x3)

        return PerturbationSpec(
            gammas={(0, 0): g00}, sup_bound=abs(amplitude), name=name
        )
    if name == "gamma01-bump":
        prof = gaussian_data(radius=radius)

        def g01(t, x1, x2, x3):
            return amplitude * np.exp(-0.25 * t) * prof(t, x1, x2, x3)

        return PerturbationSpec(
            gammas={(0, 1): g01}, sup_bound=abs(amplitude), name=name
        )
    raise KeyError(f"unknown perturbation '{name}'")


def make_nonlinearity(name: str, strength: float = 10.0, n_max: int = 4) -> NonlinearSpec:
    """Named nonlinearities, quadratic at the origin."""
    if name in ("none", ""):
        return NonlinearSpec(n_max=n_max, name="none")
    if name == "u-dtu":
        # F = strength * u * (signed time derivative), a first-order quadratic
        # coupling; enters through the first-order coefficient slot
        return NonlinearSpec(
            f_first={0: lambda u, du: strength * u},
            n_max=n_max,
            name=name,
        )
    if name == "u-ddu":
        # second-order coupling strength*u*d1d1 v, amplitude-limited so the
        # certified coefficient bound holds on the unit ball
        return NonlinearSpec(
            f_second={(1, 1): lambda u, du: 0.4 * u},
            n_max=n_max,
            name=name,
        )
    if name == "grad-sq":
        # mixed first-order coupling strength*(d1 u)*(d1 v)
        return NonlinearSpec(
            f_first={1: lambda u, du: strength * du[1]},
            n_max=n_max,
            name=name,
        )
    raise KeyError(f"unknown nonlinearity '{name}'")
