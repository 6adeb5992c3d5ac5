"""Adaptive Gauss-Kronrod quadrature with explicit resonance handling."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import optimize

from . import _accel
from .errors import ConvergenceError

# Kronrod 15-point abscissae on [-1, 1] (odd indices are the 7 Gauss nodes)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_W = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and regularisation shared by every flux integral.

    ``eta=None`` means ``1e-6 * E_F`` of whichever material is involved.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2000
    eta: float | None = None
    eta_extrapolate: bool = True

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise ValueError("tolerances must be positive")
        if self.eta is not None and not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.max_subdivisions < 10:
            raise ValueError("max_subdivisions must be at least 10")

    def eta_for(self, fermi_energy: float) -> float:
        return self.eta if self.eta is not None else 1e-6 * fermi_energy

    def with_(self, **kw) -> "QuadratureSpec":
        return replace(self, **kw)


def _pole_breakpoints(a, b, poles, widths):
    pts = {a, b}
    for p, w in zip(poles, widths):
        if not a < p < b:
            continue
        pts.add(p)
        w = max(abs(w), 1e-15 * max(abs(p), 1.0))
        for sign in (-1.0, 1.0):
            step = w
            while True:
                x = p + sign * step
                if not a < x < b:
                    break
                pts.add(x)
                step *= 4.0
    return np.array(sorted(pts))


def integrate_adaptive(f, a, b, spec: QuadratureSpec | None = None, poles=(), widths=None):
    """Integrate a vectorised real function over ``[a, b]``.

    Globally adaptive GK15: panels with the largest error estimates are
    bisected until ``error <= max(abs_tol, rel_tol * |value|)``.  The
    bisection budget is ``max_subdivisions`` plus one per seeded panel, so
    many resonances do not starve the rest of the interval.  Each entry
    of ``poles`` (with Lorentzian half width from ``widths``) seeds a
    geometric ladder of breakpoints so that narrow peaks are never straddled
    by a single panel.

    Returns
    -------
    value, error : float
    """
    spec = spec or QuadratureSpec()
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integration limits must be finite")
    if not a < b:
        raise ValueError(f"integration limits must satisfy a < b, got [{a}, {b}]")
    poles = np.atleast_1d(np.asarray(poles, dtype=float))
    if widths is None:
        widths = np.full(poles.shape, 1e-8 * (b - a))
    widths = np.broadcast_to(np.asarray(widths, dtype=float), poles.shape)
    edges = _pole_breakpoints(a, b, poles, widths)

    lo = edges[:-1].copy()
    hi = edges[1:].copy()
    val, err = _eval_panels(f, lo, hi)
    # every seeded pole panel earns one extra bisection on top of the budget
    splits = 0
    seeded = lo.size - 1
    while True:
        total = float(np.sum(val))
        total_err = float(np.sum(err))
        tol = max(spec.abs_tol, spec.rel_tol * abs(total))
        if total_err <= tol:
            return total, total_err
        mid = 0.5 * (lo + hi)
        splittable = (mid > lo) & (mid < hi) & (hi - lo > 4e-16 * np.maximum(np.abs(mid), 1e-300))
        order = np.argsort(-err, kind="stable")
        order = order[splittable[order]]
        order = order[err[order] > tol / (4.0 * lo.size)]
        if order.size == 0:
            raise ConvergenceError(
                "quadrature stalled at floating-point resolution",
                value=total, error=total_err, diagnostics={"panels": int(lo.size)},
            )
        order = order[: max(1, lo.size // 2)]
        if splits + order.size > spec.max_subdivisions + seeded:
            raise ConvergenceError(
                f"max_subdivisions={spec.max_subdivisions} exhausted",
                value=total, error=total_err, diagnostics={"panels": int(lo.size)},
            )
        splits += order.size
        keep = np.ones(lo.size, bool)
        keep[order] = False
        new_lo = np.concatenate([lo[order], mid[order]])
        new_hi = np.concatenate([mid[order], hi[order]])
        nv, ne = _eval_panels(f, new_lo, new_hi)
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])
        # keep panel order deterministic
        idx = np.argsort(lo, kind="stable")
        lo, hi, val, err = lo[idx], hi[idx], val[idx], err[idx]


def _eval_panels(f, lo, hi):
    half = 0.5 * (hi - lo)
    centre = 0.5 * (hi + lo)
    x = centre[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        bad = x[~np.isfinite(fx)]
        raise ConvergenceError(f"integrand not finite at x={bad[0]!r}", diagnostics={"x": bad})
    return _accel.gk_panels(fx, half, KRONROD_W, GAUSS_W)


def find_resonances(secular, a, b, n_scan=401, threshold=0.1, accept=1e-6, max_scan=100_000):
    """Locate real roots of a secular function ``g = D - N`` on ``[a, b]``.

    ``secular(x)`` returns the pair ``(D, N)``.  If ``g`` is real on the axis
    its sign is tracked directly; otherwise the sign of ``sin(arg(D/N)/2)``
    is used, which changes sign at every root of a lossless round trip.
    Sign changes where the normalised magnitude is below ``threshold`` are
    bisected; local dips of ``|g|`` are searched for hidden root pairs.
    Roots are kept when ``|g| <= accept * (|D| + |N|)``.  The scan starts
    with ``n_scan`` points and is refined (up to ``max_scan``) while roots
    crowd into neighbouring intervals.
    """
    span = b - a
    while True:
        xs = np.linspace(a + 1e-9 * span, b - 1e-9 * span, n_scan)
        d, n = secular(xs)
        g = d - n
        scale = np.abs(d) + np.abs(n) + 1e-300
        real_mode = bool(np.max(np.abs(g.imag) / scale) <= 1e-8)
        s = g.real / scale if real_mode else np.sin(0.5 * np.angle(d * np.conj(n)))
        # crossings in neighbouring intervals or large phase steps mean the scan is too coarse
        cross = s[:-1] * s[1:] < 0
        crowded = bool(np.any(cross[:-1] & cross[1:]))
        if not real_mode:
            z = d * np.conj(n)
            crowded |= bool(np.max(np.abs(np.angle(z[1:] * np.conj(z[:-1]))), initial=0.0) > 0.5)
        if not crowded or n_scan >= max_scan:
            break
        n_scan = 4 * n_scan - 3

    def signed(x):
        dd, nn = secular(np.atleast_1d(x))
        dd, nn = dd[0], nn[0]
        if real_mode:
            return float((dd - nn).real / (abs(dd) + abs(nn) + 1e-300))
        return float(np.sin(0.5 * np.angle(dd * np.conj(nn))))

    brackets = []
    for i in range(n_scan - 1):
        if s[i] == 0.0:
            brackets.append((xs[i], xs[i]))
        elif s[i] * s[i + 1] < 0 and min(abs(s[i]), abs(s[i + 1])) < threshold:
            brackets.append((xs[i], xs[i + 1]))

    def hidden_crossing(lo, hi, sign):
        # a root pair between two same-signed samples shows up as a sign flip at the extremum
        res = optimize.minimize_scalar(
            lambda x: sign * signed(x), bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-14 * max(abs(hi), 1.0)},
        )
        if sign * res.fun < 0:
            brackets.append((lo, res.x))
            brackets.append((res.x, hi))

    absg = np.abs(g)
    for i in range(1, n_scan - 1):
        if s[i] == 0.0:
            # a sample sitting on a root hides any partner root in the adjacent intervals
            step = 1e-9 * span
            for lo, hi, nb in ((xs[i - 1], xs[i] - step, s[i - 1]), (xs[i] + step, xs[i + 1], s[i + 1])):
                if nb != 0.0 and lo < hi:
                    hidden_crossing(lo, hi, 1.0 if nb > 0 else -1.0)
            continue
        dip = (absg[i] <= absg[i - 1] and absg[i] <= absg[i + 1]) or (
            abs(s[i]) <= abs(s[i - 1]) and abs(s[i]) <= abs(s[i + 1])
        )
        if not dip or s[i - 1] * s[i] <= 0 or s[i] * s[i + 1] <= 0:
            continue
        hidden_crossing(xs[i - 1], xs[i + 1], 1.0 if s[i] > 0 else -1.0)

    roots = []
    for lo, hi in brackets:
        if lo == hi:
            x = lo
        else:
            try:
                x = optimize.brentq(signed, lo, hi, xtol=1e-15 * max(abs(lo), 1.0), rtol=1e-15)
            except ValueError:
                continue
        dd, nn = secular(np.atleast_1d(x))
        if abs(dd[0] - nn[0]) <= accept * (abs(dd[0]) + abs(nn[0])):
            roots.append(x)
    roots = sorted(set(roots))
    out = []
    for x in roots:
        if not out or x - out[-1] > 1e-14 * max(abs(x), 1.0):
            out.append(x)
    return np.array(out)
