"""Hot kernels with a numba path and a pure-numpy fallback.

Set ``TUNNELFORCE_NUMBA=0`` in the environment (before import) to force the
numpy implementations.  Both paths are kept importable under explicit names
(``*_numba`` / ``*_numpy``) so tests and the benchmark can compare them.
"""
import cmath
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and os.environ.get("TUNNELFORCE_NUMBA", "1").lower() not in (
    "0",
    "false",
    "no",
    "off",
)


def _njit(fn):
    if numba is None:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# ---------------------------------------------------------------------------
# transfer-matrix reflection of a layered stack

def _stack_parts_loop(k_inc, v_inc, layer_v, layer_d, v_far):
    """Loop form of :func:`stack_parts_numpy`, compiled by numba."""
    n = k_inc.shape[0]
    nl = layer_v.shape[0]
    num = np.empty(n, dtype=np.complex128)
    den = np.empty(n, dtype=np.complex128)
    for i in range(n):
        ka = k_inc[i]
        energy = v_inc + ka * ka
        # interface into the first layer (or the far medium)
        if nl > 0:
            kb = cmath.sqrt(energy - layer_v[0])
        else:
            kb = cmath.sqrt(energy - v_far)
        if kb.imag < 0.0:
            kb = -kb
        inv = 0.5 / ka if ka != 0 else 1.0
        m11 = (ka + kb) * inv
        m12 = (ka - kb) * inv
        m21 = m12
        m22 = m11
        for j in range(nl):
            kj = kb
            d = layer_d[j]
            # propagation, stripped of the positive factor exp(Im k d)
            ph = cmath.exp(-1j * kj.real * d)
            p1 = ph
            p2 = cmath.exp(2j * kj * d) * ph
            m11, m21 = m11 * p1, m21 * p1
            m12, m22 = m12 * p2, m22 * p2
            if j + 1 < nl:
                kb = cmath.sqrt(energy - layer_v[j + 1])
            else:
                kb = cmath.sqrt(energy - v_far)
            if kb.imag < 0.0:
                kb = -kb
            inv = 0.5 / kj if kj != 0 else 1.0
            a = (kj + kb) * inv
            b = (kj - kb) * inv
            m11, m12 = m11 * a + m12 * b, m11 * b + m12 * a
            m21, m22 = m21 * a + m22 * b, m21 * b + m22 * a
            s = max(abs(m11), abs(m12), abs(m21), abs(m22))
            if s > 0.0:
                m11 /= s
                m12 /= s
                m21 /= s
                m22 /= s
        num[i] = m21
        den[i] = m11
    return num, den


def stack_parts_numpy(k_inc, v_inc, layer_v, layer_d, v_far):
    """Pole-free numerator and denominator of a stack reflection amplitude.

    ``r = num / den``.  The incident medium has potential ``v_inc`` and complex
    wavenumber ``k_inc``; layers are listed moving away from the incident
    medium and ``v_far`` is the terminal medium.  Both outputs share an
    arbitrary positive real scale per energy.
    """
    k_inc = np.asarray(k_inc, dtype=np.complex128)
    energy = v_inc + k_inc * k_inc
    pots = list(layer_v) + [v_far]

    def kz(v):
        k = np.sqrt(energy - v)
        return np.where(k.imag < 0.0, -k, k)

    ka = k_inc
    kb = kz(pots[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(ka != 0, 0.5 / ka, 1.0)
    m11 = (ka + kb) * inv
    m12 = (ka - kb) * inv
    m21 = m12.copy()
    m22 = m11.copy()
    for j, d in enumerate(layer_d):
        kj = kb
        ph = np.exp(-1j * kj.real * d)
        p2 = np.exp(2j * kj * d) * ph
        m11, m21 = m11 * ph, m21 * ph
        m12, m22 = m12 * p2, m22 * p2
        kb = kz(pots[j + 1])
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = np.where(kj != 0, 0.5 / kj, 1.0)
        a = (kj + kb) * inv
        b = (kj - kb) * inv
        m11, m12 = m11 * a + m12 * b, m11 * b + m12 * a
        m21, m22 = m21 * a + m22 * b, m21 * b + m22 * a
        s = np.maximum.reduce([np.abs(m11), np.abs(m12), np.abs(m21), np.abs(m22)])
        s = np.where(s > 0.0, s, 1.0)
        m11, m12, m21, m22 = m11 / s, m12 / s, m21 / s, m22 / s
    return m21, m11


stack_parts_numba = _njit(_stack_parts_loop)


def stack_parts(k_inc, v_inc, layer_v, layer_d, v_far):
    k = np.ascontiguousarray(np.atleast_1d(k_inc), dtype=np.complex128)
    lv = np.ascontiguousarray(layer_v, dtype=np.float64).reshape(-1)
    ld = np.ascontiguousarray(layer_d, dtype=np.float64).reshape(-1)
    if USE_NUMBA:
        return stack_parts_numba(k, float(v_inc), lv, ld, float(v_far))
    return stack_parts_numpy(k, float(v_inc), lv, ld, float(v_far))


# ---------------------------------------------------------------------------
# finite-difference Hamiltonian on a piecewise-uniform grid

def _fd_tridiagonal_loop(spacing, cell_v):
    n = spacing.shape[0] - 1
    diag = np.empty(n)
    off = np.empty(max(n - 1, 0))
    w = np.empty(n)
    for i in range(n):
        hm = spacing[i]
        hp = spacing[i + 1]
        w[i] = 0.5 * (hm + hp)
        vnode = (hm * cell_v[i] + hp * cell_v[i + 1]) / (hm + hp)
        diag[i] = (1.0 / hm + 1.0 / hp) / w[i] + vnode
    for i in range(n - 1):
        off[i] = -1.0 / (spacing[i + 1] * np.sqrt(w[i] * w[i + 1]))
    return diag, off


def fd_tridiagonal_numpy(spacing, cell_v):
    """Symmetrised 3-point Laplacian plus potential on interior nodes.

    ``spacing[i]`` and ``cell_v[i]`` describe cell ``i``; nodes sit between
    consecutive cells and Dirichlet walls close both ends.  The nonuniform
    stencil is symmetrised with the node weights ``(h- + h+)/2``.
    """
    hm = spacing[:-1]
    hp = spacing[1:]
    w = 0.5 * (hm + hp)
    vnode = (hm * cell_v[:-1] + hp * cell_v[1:]) / (hm + hp)
    diag = (1.0 / hm + 1.0 / hp) / w + vnode
    off = -1.0 / (hp[:-1] * np.sqrt(w[:-1] * w[1:]))
    return diag, off


fd_tridiagonal_numba = _njit(_fd_tridiagonal_loop)


def fd_tridiagonal(spacing, cell_v):
    h = np.ascontiguousarray(spacing, dtype=np.float64)
    v = np.ascontiguousarray(cell_v, dtype=np.float64)
    if USE_NUMBA:
        return fd_tridiagonal_numba(h, v)
    return fd_tridiagonal_numpy(h, v)


# ---------------------------------------------------------------------------
# Gauss-Kronrod 7/15 panel sums

def _gk_panels_loop(fx, half, wk, wg):
    n = fx.shape[0]
    val = np.empty(n)
    err = np.empty(n)
    for i in range(n):
        sk = 0.0
        sg = 0.0
        for j in range(15):
            sk += wk[j] * fx[i, j]
        for j in range(7):
            sg += wg[j] * fx[i, 2 * j + 1]
        val[i] = sk * half[i]
        err[i] = abs((sk - sg) * half[i])
    return val, err


def gk_panels_numpy(fx, half, wk, wg):
    """Kronrod value and |Kronrod - Gauss| per panel from sampled values."""
    sk = fx @ wk
    sg = fx[:, 1::2] @ wg
    return sk * half, np.abs((sk - sg) * half)


gk_panels_numba = _njit(_gk_panels_loop)


def gk_panels(fx, half, wk, wg):
    if USE_NUMBA:
        return gk_panels_numba(np.ascontiguousarray(fx), half, wk, wg)
    return gk_panels_numpy(fx, half, wk, wg)
