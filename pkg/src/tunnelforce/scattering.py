"""Wavenumbers, transfer matrices and reflection amplitudes.

Conventions
-----------
In a uniform medium the wavefunction is ``A exp(i k u) + B exp(-i k u)`` with
``u`` pointing *into* the scatterer.  A reflection amplitude ``r = B / A`` is
referenced at the boundary of the incident medium, so the same object serves
the left and the right side of a gap.  Wavenumbers always take the branch
``Im k >= 0``: evanescent waves decay into barriers and, for complex energies
``E + i eta``, the retarded prescription is automatic.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _accel
from .errors import DegenerateBranchError, GeometryError
from .params import MaterialParams


def longitudinal_wavenumber(energy, potential):
    """``sqrt(E - V)`` on the branch with non-negative imaginary part."""
    k = np.sqrt(np.asarray(energy, dtype=np.complex128) - potential)
    k = np.where(k.imag < 0.0, -k, k)
    return k[()] if k.ndim == 0 else k


@dataclass(frozen=True)
class PotentialProfile:
    """Piecewise-constant potential: left terminal, finite layers, right terminal.

    ``layers`` is a sequence of ``(thickness, potential)`` pairs ordered from
    left to right.
    """

    left_terminal: float
    layers: tuple = ()
    right_terminal: float = 0.0

    def __post_init__(self):
        layers = tuple((float(d), float(v)) for d, v in self.layers)
        for d, _ in layers:
            if not (np.isfinite(d) and d > 0.0):
                raise GeometryError(f"layer thickness must be positive and finite, got {d}")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "left_terminal", float(self.left_terminal))
        object.__setattr__(self, "right_terminal", float(self.right_terminal))

    def mirrored(self) -> "PotentialProfile":
        return PotentialProfile(self.right_terminal, self.layers[::-1], self.left_terminal)

    @property
    def width(self) -> float:
        return sum(d for d, _ in self.layers)


@dataclass(frozen=True)
class TransferMatrix:
    """2x2 amplitude transfer matrix, ``(A, B)_left = M (A, B)_right``."""

    m11: complex
    m12: complex
    m21: complex
    m22: complex
    k_left: complex
    k_right: complex

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @property
    def reflection(self) -> complex:
        """Reflection for a wave incident from the left with nothing returning from the right."""
        return self.m21 / self.m11

    @property
    def transmission(self) -> complex:
        return 1.0 / self.m11


def interface_matrix(k1: complex, k2: complex) -> TransferMatrix:
    """Matching of value and slope across an abrupt step from medium 1 to medium 2."""
    k1 = complex(k1)
    k2 = complex(k2)
    if k1 == 0:
        raise DegenerateBranchError("zero wavenumber on the incident side of an interface")
    a = (k1 + k2) / (2.0 * k1)
    b = (k1 - k2) / (2.0 * k1)
    return TransferMatrix(a, b, b, a, k1, k2)


def propagation_matrix(k: complex, d: float) -> TransferMatrix:
    if d < 0:
        raise GeometryError(f"propagation length must be non-negative, got {d}")
    k = complex(k)
    return TransferMatrix(np.exp(-1j * k * d), 0j, 0j, np.exp(1j * k * d), k, k)


def compose(a: TransferMatrix, b: TransferMatrix) -> TransferMatrix:
    m = a.as_array() @ b.as_array()
    return TransferMatrix(m[0, 0], m[0, 1], m[1, 0], m[1, 1], a.k_left, b.k_right)


def stack_transfer_matrix(profile: PotentialProfile, energy: complex) -> TransferMatrix:
    """Unscaled product of interface and propagation matrices, left to right.

    Only suitable for moderately thick evanescent layers; the reflection
    routines use the rescaled kernel instead.
    """
    pots = [profile.left_terminal] + [v for _, v in profile.layers] + [profile.right_terminal]
    ks = [complex(longitudinal_wavenumber(energy, v)) for v in pots]
    m = interface_matrix(ks[0], ks[1])
    for j, (d, _) in enumerate(profile.layers, start=1):
        m = compose(m, propagation_matrix(ks[j], d))
        m = compose(m, interface_matrix(ks[j], ks[j + 1]))
    return m


class ReflectionAmplitude:
    """Reflection amplitude of a layered scatterer seen from a uniform medium.

    Evaluated as a function of the complex wavenumber ``k`` in the incident
    medium (potential ``v_inc``).  :meth:`parts` gives a pole-free
    numerator/denominator pair used for resonance location.
    """

    def __init__(self, v_inc: float, layers: Sequence = (), v_far: float = 0.0):
        self.v_inc = float(v_inc)
        self.layers = tuple((float(d), float(v)) for d, v in layers)
        self.v_far = float(v_far)
        self._lv = np.array([v for _, v in self.layers], dtype=np.float64)
        self._ld = np.array([d for d, _ in self.layers], dtype=np.float64)
        if np.any(~(self._ld > 0)):
            raise GeometryError("layer thicknesses must be positive")

    def parts(self, k):
        k = np.asarray(k, dtype=np.complex128)
        num, den = _accel.stack_parts(k.reshape(-1), self.v_inc, self._lv, self._ld, self.v_far)
        return num.reshape(k.shape), den.reshape(k.shape)

    def __call__(self, k):
        num, den = self.parts(k)
        r = num / den
        return r[()] if r.ndim == 0 else r

    def from_kappa(self, kappa):
        """Amplitude for an evanescent incident wave with decay constant ``kappa``."""
        return self(1j * np.asarray(kappa, dtype=np.float64))

    @property
    def potentials(self):
        return [self.v_inc] + [v for _, v in self.layers] + [self.v_far]

    def __repr__(self):
        return f"ReflectionAmplitude(v_inc={self.v_inc}, layers={self.layers}, v_far={self.v_far})"


class ConstantReflection:
    """Energy-independent reflection amplitude (idealised mirror)."""

    def __init__(self, value: complex):
        self.value = complex(value)

    def parts(self, k):
        k = np.asarray(k, dtype=np.complex128)
        return np.full(k.shape, self.value), np.ones(k.shape, dtype=np.complex128)

    def __call__(self, k):
        num, _ = self.parts(k)
        return num[()] if num.ndim == 0 else num

    def __repr__(self):
        return f"ConstantReflection({self.value})"


def reflection_parts(refl, k):
    """``(num, den)`` for any reflection evaluator; plain callables get ``den = 1``."""
    if hasattr(refl, "parts"):
        return refl.parts(k)
    k = np.asarray(k, dtype=np.complex128)
    return np.asarray(refl(k), dtype=np.complex128) * np.ones(k.shape), np.ones(k.shape, np.complex128)


def step_amplitude(mat: MaterialParams, v_gap: float = 0.0) -> ReflectionAmplitude:
    """Reflection off a semi-infinite free-electron metal seen from the gap."""
    return ReflectionAmplitude(v_gap, (), mat.well_depth)


def film_amplitude(mat: MaterialParams, thickness: float, v_gap: float = 0.0) -> ReflectionAmplitude:
    """Reflection off a free-standing film (vacuum | well | vacuum) seen from the gap."""
    return ReflectionAmplitude(v_gap, ((thickness, mat.well_depth),), 0.0)


def step_reflection(kappa, mat: MaterialParams):
    """Closed form ``(i kappa - k_M) / (i kappa + k_M)`` for a vacuum-metal step."""
    kappa = np.asarray(kappa, dtype=np.float64)
    k_m = longitudinal_wavenumber(mat.kappa_zero**2 - kappa**2, 0.0)
    return (1j * kappa - k_m) / (1j * kappa + k_m)


def stack_reflection(profile: PotentialProfile, energy, from_side: str = "left"):
    """Reflection amplitude of the whole profile for a wave from one terminal.

    ``energy`` may be complex (``E + i eta``) and array-valued.
    """
    if from_side == "left":
        refl = ReflectionAmplitude(profile.left_terminal, profile.layers, profile.right_terminal)
    elif from_side == "right":
        refl = ReflectionAmplitude(profile.right_terminal, profile.layers[::-1], profile.left_terminal)
    else:
        raise ValueError(f"from_side must be 'left' or 'right', got {from_side!r}")
    k = longitudinal_wavenumber(energy, refl.v_inc)
    r = refl(k)
    if not np.all(np.isfinite(r)):
        raise GeometryError("transfer-matrix rescaling failed to keep the amplitude finite")
    return r
