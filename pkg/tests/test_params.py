import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tunnelforce.errors import DomainError
from tunnelforce.params import (
    UnitSystem,
    from_internal,
    make_material,
    material_from_wtilde,
    to_internal,
)

energies = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)
work_functions = st.floats(min_value=0.0, max_value=1e3, allow_nan=False)


def test_unit_material():
    m = make_material(1.0, 1.0)
    assert m.k_fermi == 1.0
    assert m.kappa_fermi == 1.0
    assert m.kappa_zero == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert m.density == pytest.approx(1.0 / (3.0 * math.pi**2), rel=1e-15)


def test_zero_work_function():
    m = make_material(1.0, 0.0)
    assert m.kappa_fermi == 0.0
    assert m.kappa_zero == 1.0


def test_density_from_k_fermi():
    m = make_material(4.0, 1.0)
    assert m.k_fermi == 2.0
    assert m.density == pytest.approx(8.0 / (3.0 * math.pi**2), rel=1e-15)


def test_reference_levels():
    m = make_material(2.0, 3.0)
    assert m.well_depth == -5.0
    assert m.chemical_potential == -3.0
    assert m.w_tilde == 0.75


def test_wtilde_constructor():
    m = material_from_wtilde(2.0, 0.25)
    assert m.work_function == 1.0


@pytest.mark.parametrize("ef,w", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.1), (math.nan, 1.0), (1.0, math.inf)])
def test_invalid_material(ef, w):
    with pytest.raises(DomainError):
        make_material(ef, w)


@given(energies, work_functions)
def test_decay_constant_gap_is_fermi_energy(ef, w):
    m = make_material(ef, w)
    assert m.kappa_zero > m.kappa_fermi
    assert abs(m.kappa_zero**2 - m.kappa_fermi**2 - ef) <= 1e-14 * max(ef + w, 1.0) * 4


@given(energies, work_functions)
def test_density_scaling(ef, w):
    n1 = make_material(ef, w).density
    n2 = make_material(2.0 * ef, w).density
    assert n2 == pytest.approx(2.0**1.5 * n1, rel=1e-13)


def test_material_is_immutable():
    m = make_material(1.0, 1.0)
    with pytest.raises(AttributeError):
        m.fermi_energy = 2.0


def test_identity_units():
    u = UnitSystem()
    assert to_internal(1.0, u) == 1.0


@pytest.mark.parametrize("x", [0.1, 1.0, 10.0])
@pytest.mark.parametrize("powers", [(1, 0), (0, 1), (1, -3), (0, -1)])
def test_round_trip(x, powers):
    u = UnitSystem.electron(3.7)
    back = from_internal(to_internal(x, u, *powers), u, *powers)
    assert back == pytest.approx(x, rel=1e-12)


def test_ev_scale():
    u = UnitSystem.parse("ev:5")
    assert to_internal(5.0, u) == pytest.approx(1.0, rel=1e-15)


def test_electron_length_scale():
    # one internal length unit is sqrt(hbar^2 / 2m / E0); about 1.95 Angstrom for E0 = 1 eV
    u = UnitSystem.electron(1.0)
    assert u.length_scale == pytest.approx(1.9518, rel=1e-4)


@pytest.mark.parametrize("text", ["ev", "ev:abc", "joule:2", "ev:-1"])
def test_bad_unit_strings(text):
    with pytest.raises(DomainError):
        UnitSystem.parse(text)
