"""Scenario descriptions shared by the force models and the oracle."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError
from .params import MaterialParams
from .scattering import PotentialProfile


@dataclass(frozen=True)
class Bulk:
    mat: MaterialParams


@dataclass(frozen=True)
class SemiInfinitePair:
    """Two semi-infinite metals facing each other across a vacuum gap ``L``."""

    mat1: MaterialParams
    mat2: MaterialParams
    L: float

    def __post_init__(self):
        if not (np.isfinite(self.L) and self.L >= 0):
            raise GeometryError(f"gap must be non-negative, got {self.L}")

    def proxy_profile(self, width: float, L: float | None = None) -> PotentialProfile:
        """Finite slabs of the given width standing in for the half spaces."""
        L = self.L if L is None else L
        return PotentialProfile(
            0.0, ((width, self.mat1.well_depth), (L, 0.0), (width, self.mat2.well_depth)), 0.0
        )


@dataclass(frozen=True)
class FilmPair:
    """Two free-standing films of one material, widths ``d1`` and ``d2``."""

    mat: MaterialParams
    d1: float
    d2: float
    L: float

    def __post_init__(self):
        for name in ("d1", "d2"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise GeometryError(f"{name} must be positive, got {v}")
        if not (np.isfinite(self.L) and self.L >= 0):
            raise GeometryError(f"gap must be non-negative, got {self.L}")

    def profile(self, L: float | None = None) -> PotentialProfile:
        L = self.L if L is None else L
        v = self.mat.well_depth
        layers = ((self.d1, v), (L, 0.0), (self.d2, v)) if L > 0 else ((self.d1 + self.d2, v),)
        return PotentialProfile(0.0, layers, 0.0)


@dataclass
class ForcePoint:
    """Force per area at one separation, with error estimate and status."""

    L: float
    value: float
    error_estimate: float = 0.0
    eta_used: float = 0.0
    status: str = "ok"
    diagnostics: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)
