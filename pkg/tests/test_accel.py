import os
import subprocess
import sys

import numpy as np
import pytest

from tunnelforce import _accel
from tunnelforce.quadrature import GAUSS_W, KRONROD_W

rng = np.random.default_rng(11)


def test_stack_parts_parity():
    k = np.sqrt(rng.uniform(-3.0, 3.0, 500) + 1e-6j)
    args = (k, 0.0, np.array([-2.0, 0.0, 5.0]), np.array([3.0, 0.4, 20.0]), -1.0)
    for a, b in zip(_accel.stack_parts_numba(*args), _accel.stack_parts_numpy(*args)):
        np.testing.assert_allclose(a, b, rtol=1e-11, atol=1e-14)


def test_stack_parts_no_layers():
    k = np.array([0.5 + 0j, 1j])
    num, den = _accel.stack_parts_numpy(k, 0.0, np.empty(0), np.empty(0), -2.0)
    km = np.sqrt(k * k + 2.0)
    np.testing.assert_allclose(num / den, (k - km) / (k + km), atol=1e-14)


def test_fd_tridiagonal_parity():
    h = rng.uniform(0.005, 0.02, 300)
    v = rng.uniform(-3.0, 0.0, 300)
    for a, b in zip(_accel.fd_tridiagonal_numba(h, v), _accel.fd_tridiagonal_numpy(h, v)):
        np.testing.assert_allclose(a, b, rtol=1e-13)


def test_uniform_stencil():
    diag, off = _accel.fd_tridiagonal_numpy(np.full(5, 0.5), np.zeros(5))
    np.testing.assert_allclose(diag, 8.0)
    np.testing.assert_allclose(off, -4.0)


def test_gk_parity():
    fx = rng.standard_normal((50, 15))
    half = rng.uniform(0.1, 1.0, 50)
    for a, b in zip(_accel.gk_panels_numba(fx, half, KRONROD_W, GAUSS_W),
                    _accel.gk_panels_numpy(fx, half, KRONROD_W, GAUSS_W)):
        np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("flag,expected", [("0", "False"), ("off", "False"), ("1", "True")])
def test_environment_flag(flag, expected):
    env = dict(os.environ, TUNNELFORCE_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", "from tunnelforce import _accel; print(_accel.USE_NUMBA)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == expected


def test_numpy_path_gives_same_force():
    code = ("from tunnelforce import make_material, evanescent_force, force_thin_films;"
            "m = make_material(1.0, 1.0);"
            "print(repr(evanescent_force(m, m, 0.5).value), repr(force_thin_films(m, 2.0, 2.0, 0.3).value))")
    vals = []
    for flag in ("0", "1"):
        env = dict(os.environ, TUNNELFORCE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        vals.append([float(x) for x in out.stdout.split()])
    np.testing.assert_allclose(vals[0], vals[1], rtol=1e-10)
