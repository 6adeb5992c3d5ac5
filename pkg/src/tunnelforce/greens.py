"""Gap Green's function in scattering form and the z-resolved flux route.

Inside a gap ``0 <= z <= L`` bounded by reflectors with amplitudes ``r1``
(left) and ``r2`` (right),

    G(z, z') = psi_L(z<) psi_R(z>) / (2 i k e^{-ikL} (1 - r1 r2 e^{2ikL}))

with ``psi_L = e^{-ikz} + r1 e^{ikz}`` and ``psi_R = e^{ik(z-L)} + r2 e^{-ik(z-L)}``
(hbar = 2m = 1).  Coincidence limits of the mixed derivative are taken from
this closed form; the real delta-function term drops out of every imaginary
part and is omitted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResonanceError
from .quadrature import QuadratureSpec, find_resonances, integrate_adaptive
from .scattering import longitudinal_wavenumber, reflection_parts
from .stress import _regularised, _secular


@dataclass(frozen=True)
class GapGreens:
    """Data fixing the gap Green's function at one (complex) energy."""

    r1: complex
    r2: complex
    L: float
    E: complex
    k: complex | None = None

    def __post_init__(self):
        if self.k is None:
            object.__setattr__(self, "k", complex(longitudinal_wavenumber(self.E, 0.0)))

    @property
    def denominator(self):
        k = self.k
        return 2j * k * np.exp(-1j * k * self.L) * (1.0 - self.r1 * self.r2 * np.exp(2j * k * self.L))

    def _check(self, *zs):
        for z in zs:
            if np.any(np.asarray(z) < 0) or np.any(np.asarray(z) > self.L):
                raise DomainError("positions must lie inside the gap [0, L]")
        den = self.denominator
        if abs(den) < 1e-300:
            raise ResonanceError("Green's function denominator vanished; increase eta", location=self.k)
        return den

    def psi_left(self, z):
        k = self.k
        return np.exp(-1j * k * z) + self.r1 * np.exp(1j * k * z)

    def dpsi_left(self, z):
        k = self.k
        return -1j * k * (np.exp(-1j * k * z) - self.r1 * np.exp(1j * k * z))

    def psi_right(self, z):
        k, L = self.k, self.L
        return np.exp(1j * k * (z - L)) + self.r2 * np.exp(-1j * k * (z - L))

    def dpsi_right(self, z):
        k, L = self.k, self.L
        return 1j * k * (np.exp(1j * k * (z - L)) - self.r2 * np.exp(-1j * k * (z - L)))


def greens_value(g: GapGreens, z, zp):
    den = g._check(z, zp)
    zl = np.minimum(z, zp)
    zr = np.maximum(z, zp)
    return g.psi_left(zl) * g.psi_right(zr) / den


def _coincident(g: GapGreens, z):
    """``(G, d_z d_z' G)`` at ``z' -> z`` without the delta term."""
    den = g._check(z)
    gzz = g.psi_left(z) * g.psi_right(z) / den
    dd = g.dpsi_left(z) * g.dpsi_right(z) / den
    return gzz, dd


def effective_ldos(g: GapGreens, z):
    """``-(1/2pi) Im[G + k^-2 d_z d_z' G]`` at coincidence."""
    gzz, dd = _coincident(g, z)
    return -np.imag(gzz + dd / g.k**2) / (2.0 * math.pi)


def flux_from_greens(g: GapGreens, z):
    """Momentum-flux density per unit energy at ``z`` (one spin, unit occupation)."""
    gzz, dd = _coincident(g, z)
    return -np.imag(g.k**2 * gzz + dd) / math.pi


def _greens_batch(refl1, refl2, L, kc):
    n1, d1 = reflection_parts(refl1, kc)
    n2, d2 = reflection_parts(refl2, kc)
    return n1 / d1, n2 / d2


def integrated_flux(r1_fn, r2_fn, L, fermi_energy, z, spec: QuadratureSpec | None = None):
    """Energy integral of :func:`flux_from_greens` over occupied states at fixed ``z``.

    Spin factor 2; states ``0 < E < E_F`` in a gap at zero potential.  This
    is the independent partner of :func:`tunnelforce.stress.momentum_flux_1d`.
    """
    spec = spec or QuadratureSpec()
    if not 0 <= z <= L:
        raise DomainError("z must lie inside the gap")
    kf = math.sqrt(fermi_energy)
    eta = spec.eta_for(fermi_energy)
    poles = find_resonances(_secular(r1_fn, r2_fn, L, lambda x: x.astype(complex)), 0.0, kf)
    poles = poles[poles > 1e-12 * kf]

    def run(et):
        def f(k):
            kc = longitudinal_wavenumber(k * k + 1j * et, 0.0)
            r1, r2 = _greens_batch(r1_fn, r2_fn, L, kc)
            g = GapGreens(r1, r2, L, k * k + 1j * et, kc)
            den = g.denominator
            val = -np.imag((kc**2 * g.psi_left(z) * g.psi_right(z) + g.dpsi_left(z) * g.dpsi_right(z)) / den)
            return 2.0 * k * 2.0 * val / math.pi

        return integrate_adaptive(f, 0.0, kf, spec, poles=poles, widths=et / (2.0 * poles))

    return _regularised(run, eta, spec, poles)


def integrated_ldos(r1_fn, r2_fn, L, energy, z, eta=1e-6, spec: QuadratureSpec | None = None):
    """``int_0^E rho_ef(z) dE`` per spin: the number of gap states below ``E`` per length."""
    spec = spec or QuadratureSpec()
    kmax = math.sqrt(energy)
    poles = find_resonances(_secular(r1_fn, r2_fn, L, lambda x: x.astype(complex)), 0.0, kmax)
    poles = poles[poles > 1e-12 * kmax]

    def f(k):
        kc = longitudinal_wavenumber(k * k + 1j * eta, 0.0)
        r1, r2 = _greens_batch(r1_fn, r2_fn, L, kc)
        g = GapGreens(r1, r2, L, k * k + 1j * eta, kc)
        den = g.denominator
        val = -np.imag((g.psi_left(z) * g.psi_right(z) + g.dpsi_left(z) * g.dpsi_right(z) / kc**2) / den)
        return 2.0 * k * val / (2.0 * math.pi)

    return integrate_adaptive(f, 0.0, kmax, spec, poles=poles, widths=eta / (2.0 * poles))
