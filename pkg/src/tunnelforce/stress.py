"""Momentum-flux integrals built from round-trip reflection factors.

All energies are in internal units (hbar = 2m = 1) and the spin factor 2 of
a zero-temperature occupation is included everywhere.  Integrands carry the
retarded shift ``E -> E + i eta`` only in the reflection-dependent part of
the kernel, ``(1 + rho)/(1 - rho) = 1 + 2 rho/(1 - rho)``; the constant part
is pole free and is integrated at ``eta = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError, ResonanceError
from .params import MaterialParams
from .quadrature import QuadratureSpec, find_resonances, integrate_adaptive
from .scattering import longitudinal_wavenumber, reflection_parts, step_amplitude


@dataclass
class FluxResult:
    """A momentum-flux density (or force per area) with diagnostics.

    ``eta_correction`` is the shift applied by the Richardson step in eta,
    i.e. ``value - R(eta/2)``.
    """

    value: float
    error_estimate: float
    eta_used: float
    resonances_detected: int = 0
    eta_correction: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.error_estimate = abs(self.error_estimate)

    def __float__(self):
        return float(self.value)


def round_trip_kernel(r1, r2, k, L):
    """``(1 + r1 r2 e^{2ikL}) / (1 - r1 r2 e^{2ikL})``.

    Raises :class:`ResonanceError` when the denominator vanishes.
    """
    if np.any(np.asarray(L) < 0):
        raise DomainError("gap width must be non-negative")
    rho = np.asarray(r1) * np.asarray(r2) * np.exp(2j * np.asarray(k) * L)
    den = 1.0 - rho
    hit = np.abs(den) <= 1e-14 * (1.0 + np.abs(rho))
    if np.any(hit):
        loc = np.broadcast_to(np.asarray(k, dtype=complex), hit.shape)[hit].flat[0]
        raise ResonanceError(f"round-trip pole at k={loc!r}", location=loc)
    out = (1.0 + rho) / den
    return out[()] if out.ndim == 0 else out


def near_resonance(r1, r2, k, L, margin=1e-12):
    """True where a real-k round trip is within ``margin`` of unit modulus."""
    rho = np.asarray(r1) * np.asarray(r2) * np.exp(2j * np.asarray(k) * L)
    return (np.abs(np.imag(k)) == 0) & (np.abs(rho) >= 1.0 - margin)


def _rho_term(refl1, refl2, k, L):
    """``2 rho / (1 - rho)`` from pole-free parts (finite across poles of r)."""
    n1, d1 = reflection_parts(refl1, k)
    n2, d2 = reflection_parts(refl2, k)
    num = n1 * n2 * np.exp(2j * k * L)
    return 2.0 * num / (d1 * d2 - num)


def _secular(refl1, refl2, L, k_of_x):
    def secular(x):
        k = k_of_x(np.asarray(x, dtype=float))
        n1, d1 = reflection_parts(refl1, k)
        n2, d2 = reflection_parts(refl2, k)
        return d1 * d2, n1 * n2 * np.exp(2j * k * L)

    return secular


def _richardson(run, eta, spec: QuadratureSpec):
    """Evaluate ``run(eta)`` and, if enabled, extrapolate eta -> 0 linearly."""
    v1, e1 = run(eta)
    if not spec.eta_extrapolate:
        return v1, e1, 0.0
    v2, e2 = run(0.5 * eta)
    value = 2.0 * v2 - v1
    return value, 2.0 * e2 + e1, value - v2


def _real_axis_flux(refl1, refl2, L, k_max, weight, eta, spec, v_gap=0.0):
    """Shared machinery for fluxes over propagating gap states ``0 < k < k_max``.

    The integrand is ``weight(k) * (k + Re[k' * 2 rho(k')/(1 - rho(k'))])``
    with ``k' = sqrt(k^2 + i eta)``.
    """
    if L <= 0:
        raise DomainError(f"gap width must be positive, got {L}")
    secular = _secular(refl1, refl2, L, lambda x: x.astype(complex))
    poles = find_resonances(secular, 0.0, k_max)
    # a pole at k = 0 is a band edge, not an occupied resonance
    poles = poles[poles > 1e-12 * k_max]

    def run(et):
        def f(k):
            kc = longitudinal_wavenumber(k * k + 1j * et, 0.0)
            return weight(k) * (k + np.real(kc * _rho_term(refl1, refl2, kc, L)))

        return integrate_adaptive(f, 0.0, k_max, spec, poles=poles, widths=et / (2.0 * poles))

    return _regularised(run, eta, spec, poles)


def _regularised(run, eta, spec, poles, diagnostics=None):
    """Integrate at ``eta = 0`` when the path is pole free, else broaden and extrapolate.

    A finite ``eta`` also smears the square-root branch point of a
    half-space wavenumber at its band bottom, an error of order ``sqrt(eta)``
    that the linear extrapolation cannot remove; pole-free paths therefore
    use the exact limit directly.
    """
    diagnostics = dict(diagnostics or {})
    if len(poles) == 0:
        try:
            with np.errstate(divide="raise", invalid="raise"):
                value, err = run(0.0)
            return FluxResult(value, err, 0.0, 0, 0.0, diagnostics)
        except (ConvergenceError, FloatingPointError) as exc:
            diagnostics["unbroadened_failure"] = str(exc)
    value, err, corr = _richardson(run, eta, spec)
    return FluxResult(value, err, eta, len(poles), corr, diagnostics)


def momentum_flux_1d(r1_fn, r2_fn, L, fermi_energy, spec: QuadratureSpec | None = None):
    """One-dimensional momentum flux in a gap of width ``L``.

    ``fermi_energy`` is the Fermi-level kinetic energy inside the gap
    (potential zero); only propagating states ``0 < k < k_F`` are summed.
    """
    spec = spec or QuadratureSpec()
    if fermi_energy <= 0:
        raise DomainError("1D flux needs a positive kinetic Fermi energy in the gap")
    kf = math.sqrt(fermi_energy)
    eta = spec.eta_for(fermi_energy)
    return _real_axis_flux(r1_fn, r2_fn, L, kf, lambda k: (4.0 / math.pi) * k, eta, spec)


def momentum_flux_3d_zeroT(r1_fn, r2_fn, L, kinetic_fermi, spec: QuadratureSpec | None = None):
    """Momentum-flux density of a 3D free-electron gas between two reflectors.

    The parallel momenta are integrated out analytically, leaving the
    longitudinal weight ``(K_F - k^2) k / pi^2`` per unit ``dk``.
    """
    spec = spec or QuadratureSpec()
    if kinetic_fermi <= 0:
        raise DomainError("3D flux over propagating states needs K_F > 0")
    kf = math.sqrt(kinetic_fermi)
    eta = spec.eta_for(kinetic_fermi)
    return _real_axis_flux(
        r1_fn, r2_fn, L, kf, lambda k: (kinetic_fermi - k * k) * k / math.pi**2, eta, spec
    )


def gap_force(refl1, refl2, L, kappa_fermi, kappa_top, eta, spec: QuadratureSpec | None = None):
    """Force per area from evanescent states in a vacuum gap of width ``L``.

    Occupied states have decay constants between ``kappa_fermi`` (Fermi
    level) and ``kappa_top`` (deepest band bottom).  Negative values attract.
    The variable ``kappa = kappa_top cos(theta)`` removes the square-root
    behaviour of step amplitudes at the band bottom.  ``L = 0`` is allowed
    here (contact of two half spaces); the integrand stays finite in theta.
    """
    spec = spec or QuadratureSpec()
    if not L >= 0:
        raise DomainError(f"gap width must be non-negative, got {L}")
    if kappa_top <= kappa_fermi:
        return FluxResult(0.0, 0.0, eta)
    theta_f = math.acos(kappa_fermi / kappa_top)
    kf2 = kappa_fermi**2

    def kappa_of(theta):
        return kappa_top * np.cos(theta)

    secular = _secular(refl1, refl2, L, lambda th: 1j * kappa_of(th))
    poles = find_resonances(secular, 0.0, theta_f)
    # theta = 0 is the band bottom of a half space (k_M = 0), a branch point
    poles = poles[poles > 1e-6 * theta_f]
    kp = kappa_of(poles)
    jac = kappa_top * np.sin(poles)

    def run(et):
        def f(theta):
            kappa = kappa_of(theta)
            kc = longitudinal_wavenumber(-kappa * kappa + 1j * et, 0.0)
            term = np.real(kc * _rho_term(refl1, refl2, kc, L))
            return (kappa * (kappa * kappa - kf2) * term) * kappa_top * np.sin(theta) / math.pi**2

        with np.errstate(under="ignore"):
            return integrate_adaptive(
                f, 0.0, theta_f, spec, poles=poles, widths=et / (2.0 * kp * np.maximum(jac, 1e-300))
            )

    return _regularised(run, eta, spec, poles, {"poles_theta": poles})


def _common_fermi_level(mat1: MaterialParams, mat2: MaterialParams):
    w1, w2 = mat1.work_function, mat2.work_function
    if abs(w1 - w2) > 1e-12 * max(w1, w2, 1.0):
        raise DomainError(
            "materials with a shared vacuum level and chemical potential must have equal work functions"
        )
    return mat1.kappa_fermi


def evanescent_force(mat1: MaterialParams, mat2: MaterialParams, L, spec: QuadratureSpec | None = None):
    """Force per area between two semi-infinite metals across a vacuum gap."""
    spec = spec or QuadratureSpec()
    kappa_f = _common_fermi_level(mat1, mat2)
    eta = spec.eta_for(min(mat1.fermi_energy, mat2.fermi_energy))
    return gap_force(
        step_amplitude(mat1), step_amplitude(mat2), L, kappa_f,
        max(mat1.kappa_zero, mat2.kappa_zero), eta, spec,
    )
