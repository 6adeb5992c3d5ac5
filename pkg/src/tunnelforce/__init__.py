"""Tunneling-induced forces between conductors from electronic reflection amplitudes.

Internal units throughout: hbar = 2m = 1, energies measured from the vacuum
level, so a metal with Fermi energy ``E_F`` and work function ``W`` is a
well of depth ``W + E_F`` and ``E = k^2``.
"""
from .errors import (
    ConvergenceError,
    DegenerateBranchError,
    DomainError,
    FlatProfileError,
    GeometryError,
    ResonanceError,
    TunnelForceError,
)
from .geometry import Bulk, FilmPair, ForcePoint, SemiInfinitePair
from .models import (
    SweepResult,
    contact_force,
    contact_limit,
    critical_film_width,
    fermi_pressure,
    force_extremum_in_W,
    force_semiinfinite,
    force_thin_films,
    surface_energy,
)
from .oracle import GridSpec, bound_states, grand_potential_per_area, oracle_force
from .params import MaterialParams, UnitSystem, make_material, material_from_wtilde
from .quadrature import QuadratureSpec, integrate_adaptive
from .scattering import PotentialProfile, stack_reflection, step_reflection
from .stress import FluxResult, evanescent_force, momentum_flux_1d, momentum_flux_3d_zeroT

__version__ = "0.1.0"

__all__ = [
    "Bulk", "ConvergenceError", "DegenerateBranchError", "DomainError", "FilmPair",
    "FlatProfileError", "FluxResult", "ForcePoint", "GeometryError", "GridSpec",
    "MaterialParams", "PotentialProfile", "QuadratureSpec", "ResonanceError",
    "SemiInfinitePair", "SweepResult", "TunnelForceError", "UnitSystem", "bound_states",
    "contact_force", "contact_limit", "critical_film_width", "evanescent_force",
    "fermi_pressure", "force_extremum_in_W", "force_semiinfinite", "force_thin_films",
    "grand_potential_per_area", "integrate_adaptive", "make_material",
    "material_from_wtilde", "momentum_flux_1d", "momentum_flux_3d_zeroT", "oracle_force",
    "stack_reflection", "step_reflection", "surface_energy",
]
