import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tunnelforce.errors import DomainError, FlatProfileError
from tunnelforce.models import (
    SweepResult,
    contact_force,
    contact_limit,
    critical_film_width,
    critical_film_width_numeric,
    fermi_pressure,
    force_extremum_in_W,
    force_semiinfinite,
    force_thin_films,
    scan_force_in_W,
    surface_energy,
    surface_energy_analytic,
    sweep_films,
    sweep_separation,
    sweep_work_function,
)
from tunnelforce.oracle import bound_states, oracle_surface_energy
from tunnelforce.params import make_material, material_from_wtilde
from tunnelforce.scattering import PotentialProfile

MAT = make_material(1.0, 1.0)


class TestPressure:
    def test_unit_gas(self):
        p = fermi_pressure(MAT)
        assert p.closed_form == pytest.approx(2 / (15 * math.pi**2), rel=1e-15)
        assert p.rel_diff < 1e-8

    def test_k_fermi_fifth_power(self):
        p1 = fermi_pressure(make_material(1.0, 1.0)).numeric
        p4 = fermi_pressure(make_material(4.0, 1.0)).numeric
        assert p4 == pytest.approx(2.0**5 * p1, rel=1e-9)

    @pytest.mark.parametrize("W", [0.0, 0.3, 7.0])
    def test_independent_of_far_side(self, W):
        assert fermi_pressure(make_material(1.0, W)).numeric == pytest.approx(2 / (15 * math.pi**2), rel=1e-9)


class TestContact:
    def test_unit_metal(self):
        assert contact_force(MAT) == pytest.approx(-8 / (15 * math.pi**2), rel=1e-15)
        assert contact_force(MAT) == pytest.approx(-0.054038, abs=1e-6)

    def test_zero_work_function(self):
        m = make_material(2.0, 0.0)
        assert contact_force(m) == pytest.approx(-m.k_fermi**3 * 2.0 / (5 * math.pi**2), rel=1e-15)

    def test_linear_in_W(self):
        ws = np.linspace(0.0, 10.0, 11)
        f = [contact_force(make_material(1.0, w)) for w in ws]
        slope = np.polyfit(ws, f, 1)[0]
        assert slope == pytest.approx(-1 / (3 * math.pi**2), rel=1e-12)

    @pytest.mark.parametrize("W", [0.2, 1.0, 5.0])
    def test_numeric_limit(self, W):
        m = make_material(1.0, W)
        assert contact_limit(m).value == pytest.approx(contact_force(m), rel=1e-6)

    def test_zero_gap_uses_closed_form(self):
        p = force_semiinfinite(MAT, MAT, 0.0)
        assert p.value == contact_force(MAT)

    def test_zero_gap_dissimilar_metals(self):
        a, b = make_material(1.0, 1.0), make_material(2.0, 1.0)
        assert force_semiinfinite(a, b, 0.0).value == pytest.approx(contact_limit(a, b).value, rel=1e-6)


class TestSemiInfinite:
    def test_negative_gap(self):
        with pytest.raises(DomainError):
            force_semiinfinite(MAT, MAT, -1.0)

    def test_swap_identical(self):
        a, b = make_material(1.0, 2.0), make_material(1.0, 2.0)
        assert force_semiinfinite(a, b, 0.3).value == force_semiinfinite(b, a, 0.3).value

    def test_ordering_at_contact_and_range(self):
        mats = [material_from_wtilde(1.0, w) for w in (0.1, 0.3, 1.0, 3.0, 10.0)]
        at0 = [abs(force_semiinfinite(m, m, 0.0).value) for m in mats]
        assert np.all(np.diff(at0) > 0)
        small, large = mats[0], mats[-1]
        assert abs(force_semiinfinite(small, small, 1.0).value) > abs(force_semiinfinite(large, large, 1.0).value)

    def test_diagnostics(self):
        p = force_semiinfinite(MAT, MAT, 0.5)
        assert p.status == "ok"
        assert p.diagnostics["resonances_detected"] == 0


class TestFilms:
    @pytest.mark.parametrize("L", [0.0, 0.05, 0.3, 1.0])
    def test_subcritical_films(self, L):
        assert abs(force_thin_films(MAT, 0.5, 0.5, L).value) < 1e-10

    def test_cutoff(self):
        near = force_thin_films(MAT, 1.0, 1.0, 0.05).value
        far = [force_thin_films(MAT, 1.0, 1.0, L).value for L in (0.6, 0.8, 1.5)]
        assert near < -1e-3
        assert max(abs(f) for f in far) < 1e-10

    def test_thick_films_approach_half_spaces(self):
        ref = force_semiinfinite(MAT, MAT, 0.01).value
        assert force_thin_films(MAT, 8.0, 8.0, 0.01).value == pytest.approx(ref, rel=0.05)

    @pytest.mark.parametrize("D,tol", [(40.0, 1e-4), (100.0, 1e-6)])
    def test_width_averaged_limit(self, D, tol):
        # quantum-size oscillations average out over one Fermi half-wavelength of widths
        ref = force_semiinfinite(MAT, MAT, 0.5).value
        vals = [force_thin_films(MAT, D + (j + 0.5) / 8 * math.pi, D + (j + 0.5) / 8 * math.pi, 0.5).value
                for j in range(8)]
        assert np.mean(vals) == pytest.approx(ref, rel=tol)

    def test_resonances_reported(self):
        p = force_thin_films(MAT, 4.0, 4.0, 0.3)
        assert p.diagnostics["resonances_detected"] >= 2

    def test_unequal_films(self):
        a = force_thin_films(MAT, 2.0, 4.0, 0.3).value
        b = force_thin_films(MAT, 4.0, 2.0, 0.3).value
        assert a == pytest.approx(b, rel=1e-9)
        assert a < 0

    @pytest.mark.parametrize("d", [0.0, -1.0, math.inf])
    def test_bad_width(self, d):
        with pytest.raises(DomainError):
            force_thin_films(MAT, d, 1.0, 0.5)

    @settings(max_examples=15, deadline=None)
    @given(st.floats(0.05, 20.0), st.floats(0.01, 0.99), st.floats(0.0, 3.0))
    def test_zero_force_below_threshold(self, W, frac, L):
        m = make_material(1.0, W)
        d = 0.5 * frac * critical_film_width(m)
        assert abs(force_thin_films(m, d, d, L).value) < 1e-10


class TestCriticalWidth:
    def test_equal_energies(self):
        assert critical_film_width(MAT) == pytest.approx(math.pi / 2, rel=1e-15)

    @pytest.mark.parametrize("W", [0.01, 0.5, 3.0, 40.0])
    def test_root_agrees(self, W):
        m = make_material(2.0, W)
        assert critical_film_width_numeric(m) == pytest.approx(critical_film_width(m), rel=1e-12)

    def test_ground_state_at_chemical_potential(self):
        m = make_material(1.0, 2.5)
        prof = PotentialProfile(0.0, ((critical_film_width(m), m.well_depth),), 0.0)
        assert bound_states(prof, -1.0).eigenvalues[0] == pytest.approx(m.chemical_potential, abs=1e-4)

    def test_fused_films_below_threshold(self):
        assert 2 * 0.5 < critical_film_width(MAT)

    def test_limits(self):
        assert critical_film_width(make_material(1.0, 0.0)) == 0.0
        assert critical_film_width(make_material(1.0, 1e6)) < math.pi


class TestSurfaceEnergy:
    def test_matches_analytic(self):
        s = surface_energy(MAT)
        assert s.sigma == pytest.approx(s.analytic, rel=1e-8)
        assert s.sigma == pytest.approx(1 / (32 * math.pi), rel=1e-8)
        assert s.work_of_separation == 2 * s.sigma

    @pytest.mark.parametrize("W", [0.05, 0.5, 5.0])
    def test_positive(self, W):
        assert surface_energy_analytic(make_material(1.0, W)) > 0

    def test_oracle(self):
        assert oracle_surface_energy(MAT) == pytest.approx(surface_energy(MAT).sigma, rel=1e-3)

    def test_needs_work_function(self):
        with pytest.raises(DomainError):
            surface_energy(make_material(1.0, 0.0))


class TestExtremum:
    def test_interior_maxima_move_with_separation(self):
        w1, f1 = force_extremum_in_W(0.1, 1.0)
        w2, _ = force_extremum_in_W(0.2, 1.0)
        assert 0 < w2 < w1 < 20
        assert f1 < 0

    def test_contact_has_no_extremum(self):
        with pytest.raises(FlatProfileError):
            force_extremum_in_W(0.0, 1.0)
        f = np.abs(scan_force_in_W(0.0, 1.0, np.linspace(0.1, 20, 30)))
        assert np.all(np.diff(f) > 0)

    def test_boundary_maximum(self):
        with pytest.raises(FlatProfileError):
            force_extremum_in_W(0.1, 1.0, w_max=2.0)


class TestSweeps:
    def test_parallel_matches_serial(self):
        ls = np.linspace(0.0, 1.0, 9)
        a = sweep_separation(MAT, MAT, ls, jobs=1)
        b = sweep_separation(MAT, MAT, ls, jobs=3)
        np.testing.assert_array_equal(a.values, b.values)
        np.testing.assert_array_equal(a.axis, ls)
        assert a.ok

    def test_work_function_sweep(self):
        res = sweep_work_function(1.0, [0.5, 1.0, 2.0], 0.0)
        np.testing.assert_allclose(res.values, [contact_force(make_material(1.0, w)) for w in (0.5, 1.0, 2.0)],
                                   rtol=1e-15)

    def test_failed_points_are_marked(self):
        res = sweep_films(MAT, 2.0, [0.3, -1.0])
        assert res.status[0] == "ok"
        assert res.status[1] != "ok"
        assert math.isnan(res.values[1])
        assert not res.ok

    def test_length_check(self):
        with pytest.raises(ValueError):
            SweepResult("L", np.zeros(2), np.zeros(3), np.zeros(2), np.zeros(2), ["ok", "ok"])
