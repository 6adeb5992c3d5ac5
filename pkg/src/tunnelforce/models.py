"""Physical scenarios built on the flux kernels: bulk pressure, contact,
semi-infinite metals, thin films, surface energy and sweeps."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import optimize

from .errors import ConvergenceError, DomainError, FlatProfileError, TunnelForceError
from .geometry import ForcePoint
from .params import MaterialParams, make_material
from .quadrature import QuadratureSpec, integrate_adaptive
from .scattering import ConstantReflection, film_amplitude, step_amplitude
from .stress import FluxResult, _common_fermi_level, gap_force, momentum_flux_3d_zeroT


# ---------------------------------------------------------------- bulk


@dataclass(frozen=True)
class PressureResult:
    closed_form: float
    numeric: float
    error_estimate: float

    @property
    def rel_diff(self) -> float:
        return abs(self.numeric - self.closed_form) / abs(self.closed_form)


def fermi_pressure(mat: MaterialParams, spec: QuadratureSpec | None = None) -> PressureResult:
    """Degenerate-gas pressure ``2 n E_F / 5`` and its flux-integral evaluation.

    The numeric route puts a non-reflecting left side (``r1 = 0``) against
    the metal surface, so the kernel is identically one.
    """
    spec = spec or QuadratureSpec()
    closed = 0.4 * mat.density * mat.fermi_energy
    res = momentum_flux_3d_zeroT(
        ConstantReflection(0.0), step_amplitude(mat), 1.0, mat.fermi_energy, spec
    )
    return PressureResult(closed, res.value, res.error_estimate)


# ---------------------------------------------------------------- semi-infinite metals


def contact_force(mat: MaterialParams) -> float:
    """Closed-form force per area at zero separation of two identical metals."""
    return -(mat.k_fermi**3 / math.pi**2) * (mat.fermi_energy / 5.0 + mat.work_function / 3.0)


def _checked(res: FluxResult, L: float, spec: QuadratureSpec) -> ForcePoint:
    # the error estimate already includes both eta evaluations; a few tolerances of slack
    allowed = 10.0 * max(spec.abs_tol, spec.rel_tol * abs(res.value))
    if res.error_estimate > allowed:
        raise ConvergenceError(
            f"error estimate {res.error_estimate:.3g} exceeds tolerance {allowed:.3g}",
            value=res.value, error=res.error_estimate,
            diagnostics={"L": L, "eta_used": res.eta_used},
        )
    diag = dict(res.diagnostics)
    diag["resonances_detected"] = res.resonances_detected
    diag["eta_correction"] = res.eta_correction
    return ForcePoint(L, res.value, res.error_estimate, res.eta_used, "ok", diag)


def force_semiinfinite(mat1: MaterialParams, mat2: MaterialParams, L: float,
                       spec: QuadratureSpec | None = None) -> ForcePoint:
    """Force per area between two half spaces across a vacuum gap ``L``.

    ``L = 0`` takes the closed contact form for identical metals and the
    unbroadened contact integral otherwise.
    """
    spec = spec or QuadratureSpec()
    if not (math.isfinite(L) and L >= 0):
        raise DomainError(f"gap width must be non-negative, got {L}")
    if L == 0 and mat1 == mat2:
        return ForcePoint(0.0, contact_force(mat1), 0.0, 0.0, "ok", {"route": "closed form"})
    kappa_f = _common_fermi_level(mat1, mat2)
    eta = spec.eta_for(min(mat1.fermi_energy, mat2.fermi_energy))
    res = gap_force(step_amplitude(mat1), step_amplitude(mat2), L, kappa_f,
                    max(mat1.kappa_zero, mat2.kappa_zero), eta, spec)
    return _checked(res, L, spec)


def contact_limit(mat1: MaterialParams, mat2: MaterialParams | None = None,
                  spec: QuadratureSpec | None = None, step: float | None = None) -> ForcePoint:
    """Zero-separation force extrapolated from ``L = h, 2h, 4h`` (default ``h = 1e-4 / k_F``).

    Quadratic extrapolation cancels the linear and quadratic terms in ``L``.
    """
    mat2 = mat1 if mat2 is None else mat2
    h = 1e-4 / mat1.k_fermi if step is None else step
    pts = [force_semiinfinite(mat1, mat2, h * 2**j, spec) for j in range(3)]
    f = [p.value for p in pts]
    value = (8.0 * f[0] - 6.0 * f[1] + f[2]) / 3.0
    lin = 2.0 * f[0] - f[1]
    err = abs(value - lin) + sum(p.error_estimate for p in pts)
    return ForcePoint(0.0, value, err, pts[0].eta_used, "ok", {"step": h, "samples": f})


# ---------------------------------------------------------------- films


def force_thin_films(mat: MaterialParams, d1: float, d2: float, L: float,
                     spec: QuadratureSpec | None = None) -> ForcePoint:
    """Force per area between two free-standing films at fixed chemical potential.

    Bonding and antibonding levels of the coupled films are poles of the
    round trip; their count is reported in ``diagnostics``.
    """
    spec = spec or QuadratureSpec()
    for name, v in (("d1", d1), ("d2", d2)):
        if not (math.isfinite(v) and v > 0):
            raise DomainError(f"{name} must be positive, got {v}")
    if not (math.isfinite(L) and L >= 0):
        raise DomainError(f"gap width must be non-negative, got {L}")
    eta = spec.eta_for(mat.fermi_energy)
    res = gap_force(film_amplitude(mat, d1), film_amplitude(mat, d2), L,
                    mat.kappa_fermi, mat.kappa_zero, eta, spec)
    return _checked(res, L, spec)


def critical_film_width(mat: MaterialParams) -> float:
    """Smallest film width whose lowest level lies below the chemical potential.

    Root of ``k_F tan(k_F d / 2) = kappa_F``, i.e. ``d_c = (2/k_F) atan(kappa_F/k_F)``.
    """
    return 2.0 * math.atan2(mat.kappa_fermi, mat.k_fermi) / mat.k_fermi


def critical_film_width_numeric(mat: MaterialParams) -> float:
    """Bracketed root of the even-state threshold condition, for cross-checking."""
    kf, kap = mat.k_fermi, mat.kappa_fermi
    if kap == 0.0:
        return 0.0
    hi = math.pi / kf * (1.0 - 1e-12)
    return optimize.brentq(lambda d: kf * math.tan(0.5 * kf * d) - kap, 0.0, hi, xtol=1e-15)


# ---------------------------------------------------------------- surface energy


@dataclass(frozen=True)
class SurfaceEnergy:
    """Per-surface energy ``sigma`` and the work of separation ``2 sigma``."""

    sigma: float
    error_estimate: float
    l_max: float
    analytic: float

    @property
    def work_of_separation(self) -> float:
        return 2.0 * self.sigma


def surface_energy_analytic(mat: MaterialParams, spec: QuadratureSpec | None = None) -> float:
    """Separation integral done in closed form before the decay-constant integral.

    ``int_0^inf F dL`` turns the round-trip term into ``arg(1 - r^2)``.
    """
    spec = spec or QuadratureSpec()
    amp = step_amplitude(mat)
    kt, kf2 = mat.kappa_zero, mat.kappa_fermi**2
    theta_f = math.acos(mat.kappa_fermi / kt)

    def f(theta):
        kappa = kt * np.cos(theta)
        r = amp.from_kappa(kappa)
        return kappa * (kappa * kappa - kf2) * np.angle(1.0 - r * r) * kt * np.sin(theta)

    value, _ = integrate_adaptive(f, 0.0, theta_f, spec)
    return -value / (2.0 * math.pi**2)


def surface_energy(mat: MaterialParams, spec: QuadratureSpec | None = None) -> SurfaceEnergy:
    """``sigma = -(1/2) int_0^inf F dL`` with the cutoff doubled until the tail is below ``abs_tol``."""
    spec = spec or QuadratureSpec()
    if mat.work_function == 0.0:
        raise DomainError("surface energy needs W > 0 for a decaying force")

    def force(ls):
        return np.array([force_semiinfinite(mat, mat, float(x), spec).value for x in np.ravel(ls)])

    outer = spec.with_(rel_tol=max(spec.rel_tol, 1e-9))
    l_max = 2.0 / mat.kappa_fermi
    total, err = integrate_adaptive(force, 0.0, l_max, outer)
    for _ in range(60):
        tail, terr = integrate_adaptive(force, l_max, 2.0 * l_max, outer)
        total += tail
        err += terr
        l_max *= 2.0
        if abs(tail) < spec.abs_tol:
            break
    else:
        raise ConvergenceError("surface-energy tail did not decay", value=-0.5 * total, error=err)
    return SurfaceEnergy(-0.5 * total, 0.5 * err, l_max, surface_energy_analytic(mat, spec))


# ---------------------------------------------------------------- work-function extremum


class Extremum(NamedTuple):
    w_star: float
    force: float


def scan_force_in_W(L: float, E_F: float, w_values, spec: QuadratureSpec | None = None) -> np.ndarray:
    """Force per area of identical metals at fixed ``L`` for each work function."""
    return np.array([force_semiinfinite(m, m, L, spec).value
                     for m in (make_material(E_F, float(w)) for w in w_values)])


def force_extremum_in_W(L: float, E_F: float, spec: QuadratureSpec | None = None,
                        w_max: float | None = None, n_scan: int = 40) -> Extremum:
    """Work function maximising ``|F|`` at fixed separation, on ``(0, w_max]``.

    A coarse scan brackets the maximum, golden-section search refines it.
    Raises :class:`FlatProfileError` when the maximum sits on the scan boundary.
    """
    spec = spec or QuadratureSpec()
    w_max = 20.0 * E_F if w_max is None else w_max
    if L == 0:
        raise FlatProfileError("at contact |F| grows linearly with W; no interior maximum")
    if not L > 0:
        raise DomainError(f"separation must be positive, got {L}")
    ws = w_max * np.arange(1, n_scan + 1) / n_scan
    mag = np.abs(scan_force_in_W(L, E_F, ws, spec))
    j = int(np.argmax(mag))
    if j == 0 or j == n_scan - 1:
        raise FlatProfileError(f"|F| peaks at the scan boundary W={ws[j]:g}")

    def neg(w):
        m = make_material(E_F, w)
        return -abs(force_semiinfinite(m, m, L, spec).value)

    res = optimize.minimize_scalar(neg, bracket=(ws[j - 1], ws[j], ws[j + 1]), method="golden",
                                   tol=1e-8)
    m = make_material(E_F, float(res.x))
    return Extremum(float(res.x), force_semiinfinite(m, m, L, spec).value)


# ---------------------------------------------------------------- sweeps


@dataclass
class SweepResult:
    """A one-parameter sweep; failed points carry ``nan`` and a non-``ok`` status."""

    axis_name: str
    axis: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    eta_used: np.ndarray
    status: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.axis)
        if not (len(self.values) == len(self.errors) == len(self.eta_used) == len(self.status) == n):
            raise ValueError("sweep arrays must have equal length")

    @property
    def ok(self) -> bool:
        return all(s == "ok" for s in self.status)


def _guarded(fn: Callable[..., ForcePoint], L: float, *args) -> ForcePoint:
    try:
        return fn(*args)
    except ConvergenceError as exc:
        return ForcePoint(L, math.nan, math.nan, math.nan, "convergence-failure", {"message": str(exc)})
    except TunnelForceError as exc:
        return ForcePoint(L, math.nan, math.nan, math.nan, type(exc).__name__, {"message": str(exc)})


def _semi_task(args):
    mat1, mat2, L, spec = args
    return _guarded(force_semiinfinite, L, mat1, mat2, L, spec)


def _film_task(args):
    mat, d1, d2, L, spec = args
    return _guarded(force_thin_films, L, mat, d1, d2, L, spec)


def _map(task, items, jobs: int):
    if jobs <= 1 or len(items) < 2:
        return [task(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves input order, so output is independent of scheduling
        return list(pool.map(task, items, chunksize=max(1, len(items) // (4 * jobs))))


def _collect(axis_name, axis, points: Sequence[ForcePoint], metadata) -> SweepResult:
    return SweepResult(
        axis_name, np.asarray(axis, dtype=float),
        np.array([p.value for p in points]), np.array([p.error_estimate for p in points]),
        np.array([p.eta_used for p in points]), [p.status for p in points], metadata,
    )


def sweep_separation(mat1: MaterialParams, mat2: MaterialParams, ls, spec: QuadratureSpec | None = None,
                     jobs: int = 1) -> SweepResult:
    spec = spec or QuadratureSpec()
    ls = [float(x) for x in ls]
    pts = _map(_semi_task, [(mat1, mat2, L, spec) for L in ls], jobs)
    return _collect("L", ls, pts, {"mat1": mat1, "mat2": mat2, "spec": spec})


def sweep_work_function(E_F: float, ws, L: float, spec: QuadratureSpec | None = None,
                        jobs: int = 1) -> SweepResult:
    spec = spec or QuadratureSpec()
    ws = [float(w) for w in ws]
    items = [(m, m, L, spec) for m in (make_material(E_F, w) for w in ws)]
    pts = _map(_semi_task, items, jobs)
    return _collect("W", ws, pts, {"fermi_energy": E_F, "L": L, "spec": spec})


def sweep_films(mat: MaterialParams, d: float, ls, spec: QuadratureSpec | None = None,
                jobs: int = 1, d2: float | None = None) -> SweepResult:
    spec = spec or QuadratureSpec()
    d2 = d if d2 is None else d2
    ls = [float(x) for x in ls]
    pts = _map(_film_task, [(mat, d, d2, L, spec) for L in ls], jobs)
    return _collect("L", ls, pts, {"mat": mat, "d1": d, "d2": d2, "spec": spec})
