"""Leapfrog time integration for the linear, perturbed and frozen-coefficient
nonlinear Klein-Gordon problems.

One core stepper serves all three problem kinds so that the zero-coefficient
reductions are bit-identical, not merely close.  The update solves

    (1 + g00) * (u[m+1] - 2 u[m] + u[m-1]) / dt^2 =
        lap(u[m]) - u[m] + source - (second-order coefficient terms)
        + (first-order coefficient terms)

nodewise for u[m+1].  Mixed time-space and first-order time terms reference
u[m+1] through centered differences; a short fixed-point sweep per step
resolves that implicit coupling while keeping second-order accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AdmissibilityError,
    InstabilityError,
    IterationDivergenceError,
    SupportError,
)
from .fields import (
    Field,
    FieldWindow,
    Grid3,
    laplacian_values,
    partial_values,
    second_partial_values,
)
from .norms import gamma_sobolev_norm, norm_report

SUP_BLOWUP_FACTOR = 1e6
SUPPORT_TOL_REL = 1e-10
# The boundary abort guards against energetically meaningful contact with
# the faces; it deliberately ignores the scheme's sub-discretization-error
# evanescent skirt, which crosses 1e-10 several cells outside the cone.
ABORT_TOL_REL = 1e-4
DEFAULT_BOUNDARY_MARGIN_CELLS = 4
MIXED_SWEEPS = 2  # fixed-point passes when implicit couplings are active


@dataclass
class SourceSpec:
    """Closed-form or tabulated source g(t, x) for the linear problem."""

    func: object = None  # callable (t, x1, x2, x3) -> array, or None for zero
    cone_supported: bool = True
    name: str = "custom"

    def evaluate(self, grid: Grid3, t: float) -> np.ndarray | None:
        if self.func is None:
            return None
        return grid.sample(self.func, t)

    def __call__(self, t, x1, x2, x3):
        if self.func is None:
            return np.zeros(np.broadcast_shapes(np.shape(x1), np.shape(x2), np.shape(x3)))
        return self.func(t, x1, x2, x3)


@dataclass
class PerturbationSpec:
    """Variable coefficients of the second-order perturbation terms.

    ``gammas`` maps index pairs (j, k) with j, k in 0..3 to coefficient
    callables (t, x1, x2, x3) -> array.  Index 0 carries the covariant sign
    convention, so the (0,0) entry multiplies the second time derivative
    and mixed (0,i) entries enter with a sign flip on the time factor.
    """

    gammas: dict = field(default_factory=dict)
    forcing: SourceSpec | None = None
    sup_bound: float = 0.0  # certified bound on sum of sup|gamma^{jk}|
    name: str = "custom"

    def hormander_admissible(self) -> bool:
        return self.sup_bound <= 0.5

    def require_admissible(self):
        if not self.hormander_admissible():
            raise AdmissibilityError(
                f"coefficient sup bound {self.sup_bound} exceeds 1/2"
            )


@dataclass
class NonlinearSpec:
    """Coefficients of a nonlinearity affine in second derivatives.

    ``f_second`` maps (a, i) pairs to callables f(u, du) and ``f_first``
    maps single indices a to callables, both vanishing at (0, 0); ``du`` is
    the tuple (dt u, d1 u, d2 u, d3 u).  Index 0 uses the covariant sign
    convention of the continuum problem.
    """

    f_second: dict = field(default_factory=dict)
    f_first: dict = field(default_factory=dict)
    n_max: int = 4
    name: str = "custom"

    def check_smallness(self, samples: int = 200, seed: int = 0) -> float:
        """Sampled sup of sum |f_second| over |u| + |du| <= 1."""
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(samples):
            raw = rng.uniform(-1.0, 1.0, size=5)
            scale = np.sum(np.abs(raw))
            if scale > 1.0:
                raw = raw / scale
            u, du = raw[0], tuple(raw[1:])
            total = sum(abs(float(f(u, du))) for f in self.f_second.values())
            worst = max(worst, total)
        return worst


@dataclass
class RunSeries:
    """Per-sample record of a solver run."""

    grid: Grid3
    times: list = field(default_factory=list)
    energy: list = field(default_factory=list)  # quadrature norm, order 0
    sup: list = field(default_factory=list)  # max-type norm, order 0
    sup_u: list = field(default_factory=list)  # plain max |u|
    gamma_sobolev: dict = field(default_factory=dict)  # order -> list
    gamma_sup: dict = field(default_factory=dict)
    support: list = field(default_factory=list)
    energy_plus: list = None  # modified energy of perturbed runs
    snapshots: list = None  # FieldWindow per sample when enabled
    meta: dict = field(default_factory=dict)

    def window(self, idx: int) -> FieldWindow:
        if not self.snapshots:
            raise ValueError("run was recorded without snapshots")
        return self.snapshots[idx]

    def initial_radius(self) -> float:
        return self.meta.get("support_radius_0", 0.0)


class _Stepper:
    """Shared leapfrog core; subclasses provide the coefficient hooks."""

    def __init__(self, grid: Grid3, source: SourceSpec | None = None):
        self.grid = grid
        self.source = source or SourceSpec(None)

    # coefficient hooks; None means the term is absent and costs nothing
    def gamma00(self, t):
        return None

    def gamma_mixed(self, t):  # list of (i, coefficient array), sign folded in
        return None

    def gamma_spatial(self, t):  # list of ((i, j), coefficient array)
        return None

    def first_order(self, t):  # (b_t, [(i, b_i)]) arrays or None
        return None

    def has_implicit(self) -> bool:
        return False

    def source_at(self, t):
        return self.source.evaluate(self.grid, t)

    def rhs_explicit(self, u, t):
        """Coefficient-free part of the right side at one level."""
        g = self.grid
        out = laplacian_values(u, g.h) - u
        src = self.source_at(t)
        if src is not None:
            out = out + src
        spatial = self.gamma_spatial(t)
        if spatial:
            for (i, j), coeff in spatial:
                if i == j:
                    dij = second_partial_values(u, i, g.h)
                else:
                    dij = partial_values(partial_values(u, i, g.h), j, g.h)
                out = out - coeff * dij
        return out

    def utt(self, u, ut, t):
        """Second time derivative from the equation, for window seeding."""
        g = self.grid
        rhs = self.rhs_explicit(u, t)
        mixed = self.gamma_mixed(t)
        if mixed:
            for i, coeff in mixed:
                rhs = rhs + coeff * partial_values(ut, i, g.h)
        first = self.first_order(t)
        if first is not None:
            bt, spat = first
            if bt is not None:
                rhs = rhs + bt * ut
            for i, bi in spat:
                rhs = rhs + bi * partial_values(u, i, g.h)
        g00 = self.gamma00(t)
        if g00 is not None:
            denom = 1.0 + g00
            if np.min(np.abs(denom)) < 0.5:
                raise AdmissibilityError("1 + gamma00 dropped below 1/2 somewhere")
            rhs = rhs / denom
        return rhs

    def step(self, u_prev, u_cur, t_cur, direction=+1):
        """One leapfrog step; direction -1 marches backward in time."""
        g = self.grid
        dt = g.dt
        dt2 = dt * dt
        rhs = self.rhs_explicit(u_cur, t_cur)
        g00 = self.gamma00(t_cur)
        mixed = self.gamma_mixed(t_cur)
        first = self.first_order(t_cur)

        def assemble(u_next):
            total = rhs
            if mixed or first is not None:
                ut = direction * (u_next - u_prev) / (2.0 * dt)
                if mixed:
                    for i, coeff in mixed:
                        total = total + coeff * partial_values(ut, i, g.h)
                if first is not None:
                    bt, spat = first
                    if bt is not None:
                        total = total + bt * ut
                    for i, bi in spat:
                        total = total + bi * partial_values(u_cur, i, g.h)
            return total

        if not (mixed or first is not None):
            total = rhs
            if g00 is None:
                return 2.0 * u_cur - u_prev + dt2 * total
            denom = 1.0 + g00
            if np.min(np.abs(denom)) < 0.5:
                raise AdmissibilityError("1 + gamma00 dropped below 1/2 somewhere")
            return 2.0 * u_cur - u_prev + dt2 * total / denom

        denom = None
        if g00 is not None:
            denom = 1.0 + g00
            if np.min(np.abs(denom)) < 0.5:
                raise AdmissibilityError("1 + gamma00 dropped below 1/2 somewhere")
        u_next = 2.0 * u_cur - u_prev  # extrapolation seed
        for _ in range(MIXED_SWEEPS + 1):
            total = assemble(u_next)
            if denom is None:
                u_next = 2.0 * u_cur - u_prev + dt2 * total
            else:
                u_next = 2.0 * u_cur - u_prev + dt2 * total / denom
        return u_next

    def build_window(self, u0, u1, t0, radius) -> FieldWindow:
        """Window of the requested radius around t0, marched from the data."""
        dt = self.grid.dt
        utt = self.utt(u0, u1, t0)
        fwd = [u0, u0 + dt * u1 + 0.5 * dt * dt * utt]
        while len(fwd) < radius + 1:
            m = len(fwd) - 1
            fwd.append(self.step(fwd[m - 1], fwd[m], t0 + m * dt))
        bwd = [u0, u0 - dt * u1 + 0.5 * dt * dt * utt]
        while len(bwd) < radius + 1:
            m = len(bwd) - 1
            bwd.append(self.step(bwd[m - 1], bwd[m], t0 - m * dt, direction=-1))
        levels = list(reversed(bwd[1 : radius + 1])) + fwd[: radius + 1]
        return FieldWindow(self.grid, t0, levels)


class LinearStepper(_Stepper):
    pass


class PerturbedStepper(_Stepper):
    def __init__(self, grid: Grid3, pert: PerturbationSpec):
        super().__init__(grid, pert.forcing)
        pert.require_admissible()
        self.pert = pert
        self._has00 = (0, 0) in pert.gammas
        self._mixed_idx = sorted(
            {k[1] for k in pert.gammas if k[0] == 0 and k[1] != 0}
            | {k[0] for k in pert.gammas if k[1] == 0 and k[0] != 0}
        )
        self._spatial_idx = sorted(
            k for k in pert.gammas if k[0] != 0 and k[1] != 0
        )

    def _eval(self, jk, t):
        return self.grid.sample(self.pert.gammas[jk], t)

    def gamma00(self, t):
        return self._eval((0, 0), t) if self._has00 else None

    def gamma_mixed(self, t):
        if not self._mixed_idx:
            return None
        out = []
        for i in self._mixed_idx:
            coeff = 0.0
            if (0, i) in self.pert.gammas:
                coeff = coeff + self._eval((0, i), t)
            if (i, 0) in self.pert.gammas:
                coeff = coeff + self._eval((i, 0), t)
            # gamma^{0i} d0 di u = -gamma^{0i} dt di u moves to the right side
            # with a plus sign; the covariant sign is folded here.
            out.append((i, coeff))
        return out

    def gamma_spatial(self, t):
        if not self._spatial_idx:
            return None
        return [((j, k), self._eval((j, k), t)) for (j, k) in self._spatial_idx]

    def has_implicit(self):
        return bool(self._mixed_idx)

    def energy_plus_correction(self, window: FieldWindow) -> float:
        """Quadratic coefficient correction of the squared energy."""
        grid = self.grid
        t = window.center_time
        u = window.level(0)
        ut = (window.level(1) - window.level(-1)) / (2.0 * grid.dt)
        corr = np.zeros_like(u)
        if self._has00:
            corr = corr + self._eval((0, 0), t) * ut * ut
        spat = {}
        for (j, k) in self._spatial_idx:
            dj = spat.setdefault(j, partial_values(u, j, grid.h))
            dk = spat.setdefault(k, partial_values(u, k, grid.h))
            corr = corr - self._eval((j, k), t) * dj * dk
        return float(grid.h**3 * np.sum(corr))


class FrozenCoefficientStepper(_Stepper):
    """Perturbed-type stepper whose coefficients come from a previous iterate.

    The previous iterate's snapshots provide u and its first derivatives by
    linear interpolation in time; the nonlinearity's coefficient functions
    are evaluated once per step on those frozen profiles.
    """

    def __init__(self, grid: Grid3, spec: NonlinearSpec, frozen: "_FrozenIterate"):
        super().__init__(grid, None)
        self.spec = spec
        self.frozen = frozen
        self._t_cache = None
        self._cache = None

    def _profiles(self, t):
        if self._t_cache != t:
            self._cache = self.frozen.at(t)
            self._t_cache = t
        return self._cache

    def _coeff(self, f, t):
        u, du = self._profiles(t)
        return f(u, du)

    def gamma00(self, t):
        f = self.spec.f_second.get((0, 0))
        if f is None:
            return None
        # moving f^{00} d0 d0 v = f^{00} dt^2 v to the left flips its sign
        return -self._coeff(f, t)

    def gamma_mixed(self, t):
        # f^{0i} d0 di v contributes -f^{0i} dt di v on the right side
        out = {}
        for (a, i), f in self.spec.f_second.items():
            if a == 0 and i != 0:
                out[i] = out.get(i, 0.0) - self._coeff(f, t)
            elif i == 0 and a != 0:
                out[a] = out.get(a, 0.0) - self._coeff(f, t)
        if not out:
            return None
        return sorted(out.items())

    def gamma_spatial(self, t):
        out = []
        for (a, i), f in sorted(self.spec.f_second.items()):
            if a != 0 and i != 0:
                out.append(((a, i), -self._coeff(f, t)))
        return out or None

    def first_order(self, t):
        if not self.spec.f_first:
            return None
        bt = None
        spat = []
        for a, f in sorted(self.spec.f_first.items()):
            c = self._coeff(f, t)
            if a == 0:
                bt = -c if bt is None else bt - c  # d0 = -dt
            else:
                spat.append((a, c))
        return bt, spat

    def has_implicit(self):
        return bool(self.spec.f_first) or any(
            (a == 0) != (i == 0) for (a, i) in self.spec.f_second
        )


class _FrozenIterate:
    """Time-interpolated view of a recorded run's field and derivatives."""

    def __init__(self, series: RunSeries):
        if not series.snapshots:
            raise ValueError("frozen-coefficient runs need snapshots")
        self.times = np.asarray(series.times)
        grid = series.grid
        self.profiles = []
        for win in series.snapshots:
            u = win.level(0)
            ut = (win.level(1) - win.level(-1)) / (2.0 * grid.dt)
            du = (
                ut,
                partial_values(u, 1, grid.h),
                partial_values(u, 2, grid.h),
                partial_values(u, 3, grid.h),
            )
            self.profiles.append((u, du))

    def at(self, t):
        times = self.times
        if t <= times[0]:
            return self.profiles[0]
        if t >= times[-1]:
            return self.profiles[-1]
        hi = int(np.searchsorted(times, t))
        lo = hi - 1
        w = (t - times[lo]) / (times[hi] - times[lo])
        u0, du0 = self.profiles[lo]
        u1, du1 = self.profiles[hi]
        u = (1 - w) * u0 + w * u1
        du = tuple((1 - w) * a + w * b for a, b in zip(du0, du1))
        return u, du


def _march(
    stepper: _Stepper,
    u0: Field,
    u1: Field,
    t_final: float,
    *,
    stride: int = 10,
    norm_orders=(0,),
    snapshots: bool = False,
    snapshot_radius: int | None = None,
    boundary_margin_cells: int = DEFAULT_BOUNDARY_MARGIN_CELLS,
    energy_plus: bool = False,
    ordering=None,
) -> RunSeries:
    grid = stepper.grid
    dt = grid.dt
    n_steps = max(int(round(t_final / dt)), 1)
    if abs(n_steps * dt - t_final) > 1e-9 * max(1.0, t_final):
        raise ValueError(
            f"t_final={t_final} is not an integer number of steps of dt={dt}"
        )
    if stride < 1:
        raise ValueError("stride must be >= 1")

    radius = max(1, max(norm_orders) + 1)
    if snapshots:
        radius = max(radius, snapshot_radius or 3)

    series = RunSeries(grid=grid)
    for n in norm_orders:
        series.gamma_sobolev[n] = []
        series.gamma_sup[n] = []
    if snapshots:
        series.snapshots = []
    if energy_plus:
        series.energy_plus = []

    sup0 = max(u0.sup_norm(), u1.sup_norm())
    support_tol = SUPPORT_TOL_REL * sup0 if sup0 > 0 else SUPPORT_TOL_REL
    abort_tol = ABORT_TOL_REL * sup0 if sup0 > 0 else ABORT_TOL_REL
    r2 = grid.radius_sq()
    abort_radius = grid.half_width - boundary_margin_cells * grid.h

    def measured_support(vals, tol=None):
        mask = np.abs(vals) > (tol if tol is not None else support_tol)
        if not mask.any():
            return 0.0
        return float(np.sqrt(np.max(np.broadcast_to(r2, vals.shape)[mask])))

    series.meta["support_radius_0"] = measured_support(u0.values)
    series.meta["dt"] = dt
    series.meta["stride"] = stride
    series.meta["norm_orders"] = tuple(norm_orders)
    series.meta["initial_sup"] = sup0

    # rolling buffer of levels m-radius .. m+radius around the newest sample
    levels = list(stepper.build_window(u0.values, u1.values, 0.0, radius).levels)
    # levels[i] holds step index i - radius
    newest = radius  # step index of levels[-1]

    def emit(center):
        # the buffer holds steps (newest - 2*radius) .. newest
        oldest = newest - 2 * radius
        pos = center - oldest
        win = FieldWindow(
            grid, center * dt, [levels[pos + m] for m in range(-radius, radius + 1)]
        )
        rep = norm_report(win, orders=norm_orders, ordering=ordering)
        series.times.append(center * dt)
        series.energy.append(rep.energy)
        series.sup.append(rep.sup)
        series.sup_u.append(float(np.max(np.abs(win.level(0)))))
        for n in norm_orders:
            series.gamma_sobolev[n].append(rep.gamma_sobolev[n])
            series.gamma_sup[n].append(rep.gamma_sup[n])
        sup_r = measured_support(win.level(0))
        series.support.append(sup_r)
        if snapshots:
            series.snapshots.append(win)
        if energy_plus:
            corr = stepper.energy_plus_correction(win)
            series.energy_plus.append(float(np.sqrt(max(rep.energy**2 + corr, 0.0))))
        if measured_support(win.level(0), abort_tol) >= abort_radius:
            raise SupportError(
                f"support (at the abort amplitude) within {boundary_margin_cells} "
                f"cells of the boundary at t={center * dt:.3f}"
            )

    emit(0)
    ref_sup = sup0  # picks up the scale of source-driven runs below
    # march to n_steps + radius so the final sample owns a full window
    while newest < n_steps + radius:
        t_cur = newest * dt
        u_next = stepper.step(levels[-2], levels[-1], t_cur)
        newest += 1
        levels.append(u_next)
        if len(levels) > 2 * radius + 1:
            levels.pop(0)
        sup = float(np.max(np.abs(u_next)))
        if not np.isfinite(sup) or (ref_sup > 0 and sup > SUP_BLOWUP_FACTOR * ref_sup):
            raise InstabilityError(
                f"sup norm {sup:.3e} exceeded {SUP_BLOWUP_FACTOR:.0e} x initial at "
                f"step {newest}",
                step=newest,
                time=newest * dt,
            )
        if ref_sup == 0.0:
            ref_sup = sup
        center = newest - radius
        if 0 < center <= n_steps and (center % stride == 0 or center == n_steps):
            emit(center)

    return series


def solve_linear(u0: Field, u1: Field, g: SourceSpec | None, t_final: float, grid: Grid3, **kw) -> RunSeries:
    """March the linear inhomogeneous problem and record its norms."""
    stepper = LinearStepper(grid, g)
    series = _march(stepper, u0, u1, t_final, **kw)
    series.meta["kind"] = "linear"
    series.meta["source"] = (g.name if g is not None else "none")
    return series


def solve_perturbed(
    u0: Field, u1: Field, pert: PerturbationSpec, t_final: float, grid: Grid3, **kw
) -> RunSeries:
    """March the variable-coefficient problem, recording the modified energy."""
    stepper = PerturbedStepper(grid, pert)
    kw.setdefault("energy_plus", True)
    series = _march(stepper, u0, u1, t_final, **kw)
    series.meta["kind"] = "perturbed"
    series.meta["perturbation"] = pert.name
    return series


def check_divergence(diffs) -> int | None:
    """Index of the first confirmed divergence, or None.

    Divergence means two consecutive difference ratios above one.
    """
    bad = 0
    for i in range(1, len(diffs)):
        if diffs[i - 1] > 0 and diffs[i] / diffs[i - 1] > 1.0:
            bad += 1
            if bad >= 2:
                return i
        else:
            bad = 0
    return None


def iterate_nonlinear(
    u0: Field,
    u1: Field,
    spec: NonlinearSpec,
    t_final: float,
    grid: Grid3,
    *,
    stride: int = 5,
    norm_orders=(0, 1, 2),
    snapshot_radius: int = 3,
    diff_order: int = 2,
    boundary_margin_cells: int = DEFAULT_BOUNDARY_MARGIN_CELLS,
):
    """Frozen-coefficient iteration for the nonlinear problem.

    The seed iterate solves the free linear problem from the same data;
    every next iterate solves the linear equation whose coefficients are
    evaluated on the previous one.  Returns (list of RunSeries, list of
    successive-difference norms at ``diff_order``).
    """
    kw = dict(
        stride=stride,
        norm_orders=tuple(sorted(set(norm_orders) | {diff_order})),
        snapshots=True,
        snapshot_radius=max(snapshot_radius, diff_order + 1),
        boundary_margin_cells=boundary_margin_cells,
    )
    iterates = [solve_linear(u0, u1, None, t_final, grid, **kw)]
    iterates[0].meta["iterate"] = 0
    diffs = []
    for n in range(spec.n_max):
        frozen = _FrozenIterate(iterates[-1])
        # monitored smallness: the frozen profiles must stay inside the
        # unit ball where the coefficient bound is certified
        worst = max(
            float(np.max(np.abs(u) + sum(np.abs(d) for d in du)))
            for u, du in frozen.profiles
        )
        stepper = FrozenCoefficientStepper(grid, spec, frozen)
        series = _march(stepper, u0, u1, t_final, **kw)
        series.meta["kind"] = "nonlinear-iterate"
        series.meta["iterate"] = n + 1
        series.meta["frozen_sup_u_plus_du"] = worst
        if worst > 1.0:
            series.meta["smallness_violated"] = True
        iterates.append(series)
        d = 0.0
        for wa, wb in zip(iterates[-2].snapshots, iterates[-1].snapshots):
            d = max(d, gamma_sobolev_norm(wb - wa, diff_order))
        diffs.append(d)
        bad = check_divergence(diffs)
        if bad is not None:
            raise IterationDivergenceError(
                f"difference ratios exceeded 1 at iterates {bad}..{bad + 1}",
                iterate=bad + 1,
            )
    return iterates, diffs


def manufactured_source(u=None, utt=None, lap=None, name="manufactured") -> SourceSpec:
    """Source that makes a closed-form profile solve the linear problem.

    Pass callables for the profile, its second time derivative and its
    Laplacian, each with signature (t, x1, x2, x3).
    """
    if u is None:
        return SourceSpec(None, name=name)

    def g(t, x1, x2, x3):
        return utt(t, x1, x2, x3) - lap(t, x1, x2, x3) + u(t, x1, x2, x3)

    return SourceSpec(g, name=name)
