"""Grand-potential oracle: forces from brute-force bound-state spectra.

Nothing here touches reflection amplitudes.  The 1D Hamiltonian
``-d^2/dz^2 + V(z)`` is discretised on a piecewise-uniform grid whose
nodes sit on every potential step, enclosed in vacuum padding and hard
walls.  Spectra below the chemical potential give the zero-temperature
grand potential per area, and its finite difference in the gap width gives
the force.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import _accel
from .errors import GeometryError
from .geometry import FilmPair, ForcePoint, SemiInfinitePair
from .scattering import PotentialProfile

# eigenvalues are requested a little above the cutoff so h and h/2 spectra can be paired
_MATCH_MARGIN = 0.05


@dataclass(frozen=True)
class GridSpec:
    """Discretisation controls.

    ``padding=None`` picks ``40 / kappa`` with ``kappa`` the decay constant at
    the cutoff energy, capped at ``padding_cap``.
    """

    spacing: float = 0.01
    padding: float | None = None
    padding_cap: float = 200.0
    richardson: bool = True
    check_padding: bool = False
    min_cells: int = 4

    def __post_init__(self):
        if not self.spacing > 0:
            raise GeometryError("grid spacing must be positive")


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    count: int
    reference: str = "vacuum level"
    grid: dict = field(default_factory=dict)


def _padding(grid: GridSpec, e_cut: float, v_out: float) -> float:
    if grid.padding is not None:
        return grid.padding
    kappa = math.sqrt(max(v_out - e_cut, 0.0))
    if kappa == 0.0:
        return grid.padding_cap
    return min(40.0 / kappa, grid.padding_cap)


def _cell_counts(thicknesses, h, min_cells):
    return [max(int(math.ceil(d / h - 1e-9)), min_cells) for d in thicknesses]


def _eigs(thicknesses, pots, counts, e_hi):
    spacing = np.concatenate([np.full(n, d / n) for d, n in zip(thicknesses, counts)])
    cell_v = np.concatenate([np.full(n, v) for v, n in zip(pots, counts)])
    diag, off = _accel.fd_tridiagonal(spacing, cell_v)
    lo = float(np.min(pots)) - 1.0
    if e_hi <= lo:
        return np.empty(0)
    return eigh_tridiagonal(
        diag, off, eigvals_only=True, select="v", select_range=(lo, e_hi), tol=1e-14
    )


class _Discretisation:
    """Frozen cell counts for a layered profile so neighbouring geometries share a grid."""

    def __init__(self, profile: PotentialProfile, e_cut: float, grid: GridSpec):
        v_out = min(profile.left_terminal, profile.right_terminal)
        if not e_cut < v_out:
            raise GeometryError("bound-state cutoff must lie below both terminal potentials")
        self.pad = _padding(grid, e_cut, v_out)
        self.grid = grid
        self.e_cut = e_cut
        self.profile = profile
        thick = self._thicknesses(profile)
        self.counts = _cell_counts(thick, grid.spacing, grid.min_cells)

    def _thicknesses(self, profile, pad=None):
        pad = self.pad if pad is None else pad
        return [pad] + [d for d, _ in profile.layers] + [pad]

    def _pots(self, profile):
        return [profile.left_terminal] + [v for _, v in profile.layers] + [profile.right_terminal]

    def spectrum(self, profile: PotentialProfile, refine: int = 1, pad=None):
        if len(profile.layers) != len(self.profile.layers):
            raise GeometryError("profile topology changed under a frozen discretisation")
        thick = self._thicknesses(profile, pad)
        counts = [n * refine for n in self.counts]
        if pad is not None:
            counts[0] = counts[-1] = max(int(math.ceil(pad / self.pad * self.counts[0])), 1) * refine
        span = self.e_cut - min(self._pots(profile))
        return _eigs(thick, self._pots(profile), counts, self.e_cut + _MATCH_MARGIN * max(span, 1e-3))

    def extrapolated(self, profile: PotentialProfile):
        e1 = self.spectrum(profile, 1)
        if not self.grid.richardson:
            return e1[e1 < self.e_cut]
        e2 = self.spectrum(profile, 2)
        n = min(e1.size, e2.size)
        ev = (4.0 * e2[:n] - e1[:n]) / 3.0
        return ev[ev < self.e_cut]


def bound_states(profile: PotentialProfile, e_max: float, grid: GridSpec | None = None) -> SpectrumResult:
    """All levels below ``e_max`` of the profile boxed in padded hard walls.

    Eigenvalues are measured from the potential zero (vacuum level) and
    Richardson-improved from spacings ``h`` and ``h/2``.
    """
    grid = grid or GridSpec()
    disc = _Discretisation(profile, e_max, grid)
    ev = disc.extrapolated(profile)
    if grid.check_padding:
        e_ref = disc.spectrum(profile, 1)
        e_dbl = disc.spectrum(profile, 1, pad=2.0 * disc.pad)
        n = min(e_ref.size, e_dbl.size)
        keep = e_ref[:n] < e_max
        scale = e_max - min([v for _, v in profile.layers] + [profile.left_terminal])
        if n and np.max(np.abs(e_ref[:n] - e_dbl[:n])[keep], initial=0.0) > 1e-9 * scale:
            raise GeometryError(f"padding {disc.pad:g} too small for levels below {e_max:g}")
    return SpectrumResult(
        np.sort(ev), int(ev.size),
        grid={"spacing": grid.spacing, "padding": disc.pad, "cells": int(sum(disc.counts))},
    )


def grand_potential_from_levels(levels, mu: float) -> float:
    """Zero-temperature grand potential per area of 2D subbands, spin included.

    Each level contributes ``-(mu - e)^2 / (4 pi)``: transverse density of
    states ``1/(4 pi)`` per spin in hbar = 2m = 1 units.
    """
    levels = np.asarray(levels)
    occ = levels[levels < mu]
    return -float(np.sum((mu - occ) ** 2)) / (4.0 * math.pi)


def grand_potential_per_area(profile: PotentialProfile, mu: float, grid: GridSpec | None = None) -> float:
    return grand_potential_from_levels(bound_states(profile, mu, grid).eigenvalues, mu)


def _profile_at(geometry, L, proxy_width):
    if isinstance(geometry, SemiInfinitePair):
        return geometry.proxy_profile(proxy_width, L)
    if isinstance(geometry, FilmPair):
        return geometry.profile(L)
    raise TypeError(f"oracle cannot handle {type(geometry).__name__}")


def _mu_of(geometry):
    if isinstance(geometry, SemiInfinitePair):
        w1, w2 = geometry.mat1.work_function, geometry.mat2.work_function
        if abs(w1 - w2) > 1e-12 * max(w1, w2, 1.0):
            raise GeometryError("oracle assumes a common Fermi level and vacuum level")
        return geometry.mat1.chemical_potential, geometry.mat1.k_fermi
    return geometry.mat.chemical_potential, geometry.mat.k_fermi


def oracle_force(geometry, dL: float | None = None, grid: GridSpec | None = None,
                 proxy_width: float | None = None, proxy_average: int = 1) -> ForcePoint:
    """``-dOmega/dL`` at fixed chemical potential by central differences.

    Semi-infinite metals are represented by slabs of ``proxy_width``
    (default ``30 / k_F``).  Finite slabs carry quantum-size oscillations of
    relative size ``~0.1 / (k_F D)`` with period ``pi / k_F`` in the width;
    ``proxy_average > 1`` averages the force over that many widths spread
    across one period, which cancels the leading oscillation.  Grid spacing
    defaults to ``0.01 / k_F``.  The error estimate adds the step-halving
    change in ``dL`` and the Richardson correction in ``h``.
    """
    mu, kf = _mu_of(geometry)
    if proxy_average > 1:
        if not isinstance(geometry, SemiInfinitePair):
            raise GeometryError("proxy averaging applies to semi-infinite pairs only")
        base = 30.0 / kf if proxy_width is None else proxy_width
        pts = [
            oracle_force(geometry, dL, grid, base + (j + 0.5) / proxy_average * math.pi / kf)
            for j in range(proxy_average)
        ]
        vals = np.array([p.value for p in pts])
        diag = dict(pts[0].diagnostics, proxy_width=base, proxy_average=proxy_average,
                    proxy_spread=float(np.ptp(vals)))
        return ForcePoint(geometry.L, float(np.mean(vals)), max(p.error_estimate for p in pts),
                          0.0, "ok", diag)
    L = geometry.L
    dL = 1e-3 / kf if dL is None else dL
    if grid is None:
        grid = GridSpec(spacing=0.01 / kf)
    proxy_width = 30.0 / kf if proxy_width is None else proxy_width
    if not L - dL > 0:
        raise GeometryError("oracle needs L - dL > 0")
    disc = _Discretisation(_profile_at(geometry, L, proxy_width), mu, grid)

    def omega(Lx, refine):
        ev = disc.spectrum(_profile_at(geometry, Lx, proxy_width), refine)
        return grand_potential_from_levels(ev, mu)

    def diff(step, refine):
        return -(omega(L + step, refine) - omega(L - step, refine)) / (2.0 * step)

    f1 = diff(dL, 1)
    if grid.richardson:
        f2 = diff(dL, 2)
        value = (4.0 * f2 - f1) / 3.0
        f2_half = diff(0.5 * dL, 2)
        err = abs(f2 - f2_half) + abs(value - f2)
    else:
        value = f1
        err = abs(f1 - diff(0.5 * dL, 1))
    return ForcePoint(L, value, err, 0.0, "ok",
                      {"dL": dL, "spacing": grid.spacing, "padding": disc.pad, "proxy_width": proxy_width})


def oracle_surface_energy(mat, width: float | None = None, grid: GridSpec | None = None,
                          n_avg: int = 8) -> float:
    """Per-surface energy from ``(2 Omega(slab d) - Omega(slab 2d)) / 2``.

    Quantum-size oscillations are suppressed by averaging over ``n_avg``
    widths spread across one Fermi half-wavelength ``pi / k_F``.
    """
    kf = mat.k_fermi
    width = 40.0 / kf if width is None else width
    grid = grid or GridSpec(spacing=0.01 / kf)
    mu = mat.chemical_potential
    vals = []
    for j in range(n_avg):
        d = width + (j + 0.5) / n_avg * math.pi / kf
        one = grand_potential_per_area(PotentialProfile(0.0, ((d, mat.well_depth),), 0.0), mu, grid)
        two = grand_potential_per_area(PotentialProfile(0.0, ((2 * d, mat.well_depth),), 0.0), mu, grid)
        vals.append(0.5 * (2.0 * one - two))
    return float(np.mean(vals))
