"""Material parameters and unit conversion.

Internally every quantity uses natural units with hbar = 2m = 1, so a
kinetic energy equals the square of the wavenumber.  Energies are measured
from the vacuum level; a metal is a flat well of depth ``W + E_F``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import constants

from .errors import DomainError

# hbar^2 / 2 m_e in eV * Angstrom^2
HBAR2_OVER_2M_EV_A2 = (
    constants.hbar**2 / (2.0 * constants.m_e) / constants.e / constants.angstrom**2
)


@dataclass(frozen=True)
class MaterialParams:
    """Free-electron conductor described by its Fermi energy and work function.

    Parameters
    ----------
    fermi_energy : float
        E_F > 0, kinetic energy at the Fermi level measured from the band bottom.
    work_function : float
        W >= 0, distance from the Fermi level up to the vacuum level.
    """

    fermi_energy: float
    work_function: float
    k_fermi: float = field(init=False)
    kappa_fermi: float = field(init=False)
    kappa_zero: float = field(init=False)
    density: float = field(init=False)

    def __post_init__(self):
        ef = float(self.fermi_energy)
        w = float(self.work_function)
        if not math.isfinite(ef) or ef <= 0.0:
            raise DomainError(f"Fermi energy must be positive, got {ef!r}")
        if not math.isfinite(w) or w < 0.0:
            raise DomainError(f"work function must be non-negative, got {w!r}")
        kf = math.sqrt(ef)
        object.__setattr__(self, "fermi_energy", ef)
        object.__setattr__(self, "work_function", w)
        object.__setattr__(self, "k_fermi", kf)
        object.__setattr__(self, "kappa_fermi", math.sqrt(w))
        object.__setattr__(self, "kappa_zero", math.sqrt(w + ef))
        object.__setattr__(self, "density", kf**3 / (3.0 * math.pi**2))

    @property
    def well_depth(self) -> float:
        """Potential of the metal interior relative to vacuum (negative)."""
        return -(self.work_function + self.fermi_energy)

    @property
    def chemical_potential(self) -> float:
        """Fermi level relative to vacuum."""
        return -self.work_function

    @property
    def w_tilde(self) -> float:
        """Dimensionless work function W / 2E_F."""
        return self.work_function / (2.0 * self.fermi_energy)


def make_material(fermi_energy: float, work_function: float) -> MaterialParams:
    return MaterialParams(fermi_energy, work_function)


def material_from_wtilde(fermi_energy: float, w_tilde: float) -> MaterialParams:
    """Build a material from E_F and the reduced work function W / 2E_F."""
    return MaterialParams(fermi_energy, 2.0 * fermi_energy * w_tilde)


@dataclass(frozen=True)
class UnitSystem:
    """Physical size of one internal energy unit and one internal length unit.

    ``energy_scale`` is in eV and ``length_scale`` in Angstrom.  With
    hbar = 2m = 1 the two are tied for electrons; use :meth:`electron` to get
    the consistent pair from an energy scale alone.
    """

    energy_scale: float = 1.0
    length_scale: float = 1.0

    def __post_init__(self):
        for name in ("energy_scale", "length_scale"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise DomainError(f"{name} must be positive and finite, got {v!r}")

    @classmethod
    def electron(cls, energy_scale_ev: float) -> "UnitSystem":
        if not (math.isfinite(energy_scale_ev) and energy_scale_ev > 0.0):
            raise DomainError(f"energy scale must be positive and finite, got {energy_scale_ev!r}")
        return cls(energy_scale_ev, math.sqrt(HBAR2_OVER_2M_EV_A2 / energy_scale_ev))

    @classmethod
    def parse(cls, text: str) -> "UnitSystem":
        """Parse ``"internal"`` or ``"ev:<scale>"`` (eV per internal energy unit)."""
        text = text.strip().lower()
        if text in ("internal", "natural", ""):
            return cls()
        kind, _, value = text.partition(":")
        if kind != "ev" or not value:
            raise DomainError(f"unrecognised unit system {text!r}; use 'ev:<scale>'")
        try:
            scale = float(value)
        except ValueError:
            raise DomainError(f"bad energy scale in {text!r}") from None
        return cls.electron(scale)

    def _factor(self, energy_power: float, length_power: float) -> float:
        return self.energy_scale**energy_power * self.length_scale**length_power


def to_internal(value, units: UnitSystem, energy_power=1, length_power=0):
    """Convert a physical value with dimension energy^a * length^b to internal units."""
    return value / units._factor(energy_power, length_power)


def from_internal(value, units: UnitSystem, energy_power=1, length_power=0):
    return value * units._factor(energy_power, length_power)
