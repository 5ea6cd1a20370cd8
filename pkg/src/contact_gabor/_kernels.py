"""Hot numeric kernels with numba and pure-numpy implementations.

Backend selection: set CONTACT_GABOR_BACKEND=numpy to force the numpy path;
anything else (or unset) uses numba when it imports. Both paths produce the
same values up to floating-point summation order; see benchmarks/ for a
timing comparison.
"""

import os

import numpy as np

try:
    from numba import njit

    _HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency, but be safe
    _HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap(args[0]) if args and callable(args[0]) else wrap


def backend():
    if os.environ.get("CONTACT_GABOR_BACKEND", "").lower() == "numpy":
        return "numpy"
    return "numba" if _HAS_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# direction scan: O_k = sum_j coeffs_j * exp(-i <freqs_k, nodes_j>)

def _phase_scan_numpy(nodes, coeffs, freqs):
    # einsum reduction: fixed-order sums independent of BLAS threading
    return np.einsum("dp,p->d", np.exp(-1j * (freqs @ nodes.T)), coeffs)


@njit(cache=True)
def _phase_scan_numba(nodes, coeffs, freqs):  # pragma: no cover - jitted
    D = freqs.shape[0]
    P = nodes.shape[0]
    n = nodes.shape[1]
    out = np.empty(D, dtype=np.complex128)
    for k in range(D):
        acc = 0.0 + 0.0j
        for j in range(P):
            ph = 0.0
            for a in range(n):
                ph += freqs[k, a] * nodes[j, a]
            acc += coeffs[j] * complex(np.cos(ph), -np.sin(ph))
        out[k] = acc
    return out


def phase_scan(nodes, coeffs, freqs):
    """Modulation integrals of one coefficient vector against many covectors."""
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    freqs = np.ascontiguousarray(freqs, dtype=np.float64)
    if backend() == "numba":
        return _phase_scan_numba(nodes, coeffs, freqs)
    return _phase_scan_numpy(nodes, coeffs, freqs)


# ---------------------------------------------------------------------------
# Gabor synthesis matrix: atom values of time-frequency shifts on a grid.
# row (W, xi): exp(-2*pi*i <xi,V>) * exp(-(V-W)^t A (V-W) - i <eta, V-W>)

def _shift_matrix_numpy(nodes, amat, eta, trans, mods):
    diff = nodes[None, :, :] - trans[:, None, :]
    quad = np.einsum("lpa,ab,lpb->lp", diff, amat, diff)
    phase = 2.0 * np.pi * (mods @ nodes.T) + diff @ eta
    return np.exp(-quad - 1j * phase)


@njit(cache=True)
def _shift_matrix_numba(nodes, amat, eta, trans, mods):  # pragma: no cover
    L = trans.shape[0]
    P = nodes.shape[0]
    n = nodes.shape[1]
    out = np.empty((L, P), dtype=np.complex128)
    for l in range(L):
        for j in range(P):
            quad = 0.0
            ph = 0.0
            for a in range(n):
                da = nodes[j, a] - trans[l, a]
                ph += 2.0 * np.pi * mods[l, a] * nodes[j, a] + eta[a] * da
                for b in range(n):
                    quad += da * amat[a, b] * (nodes[j, b] - trans[l, b])
            out[l, j] = np.exp(-quad) * complex(np.cos(ph), -np.sin(ph))
    return out


def shift_matrix(nodes, amat, eta, trans, mods):
    """Values of every time-frequency shifted window on the fiber grid."""
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    amat = np.ascontiguousarray(amat, dtype=np.float64)
    eta = np.ascontiguousarray(eta, dtype=np.float64)
    trans = np.ascontiguousarray(trans, dtype=np.float64)
    mods = np.ascontiguousarray(mods, dtype=np.float64)
    if backend() == "numba":
        return _shift_matrix_numba(nodes, amat, eta, trans, mods)
    return _shift_matrix_numpy(nodes, amat, eta, trans, mods)


# ---------------------------------------------------------------------------
# Bargmann kernel sums: Bf(V_k, eta_k) given weighted samples fw_j at fiber
# nodes W_j.  Kernel exponent (before the z-only Gaussian prefactor):
# 2*pi*(W^t (A/pi) V) + 2*pi*i <eta, W> - W^t A W

def _bargmann_sums_numpy(wnodes, fw, amat, zv, ze):
    aw = wnodes @ (amat / np.pi)
    quad = np.einsum("ja,ab,jb->j", wnodes, amat, wnodes)
    expo = 2.0 * np.pi * ((zv @ aw.T) + 1j * (ze @ wnodes.T)) - quad[None, :]
    return np.einsum("kp,p->k", np.exp(expo), fw)


@njit(cache=True)
def _bargmann_sums_numba(wnodes, fw, amat, zv, ze):  # pragma: no cover
    Z = zv.shape[0]
    P = wnodes.shape[0]
    n = wnodes.shape[1]
    aw = wnodes @ (amat / np.pi)
    quad = np.empty(P)
    for j in range(P):
        q = 0.0
        for a in range(n):
            for b in range(n):
                q += wnodes[j, a] * amat[a, b] * wnodes[j, b]
        quad[j] = q
    out = np.empty(Z, dtype=np.complex128)
    for k in range(Z):
        acc = 0.0 + 0.0j
        for j in range(P):
            re = -quad[j]
            im = 0.0
            for a in range(n):
                re += 2.0 * np.pi * aw[j, a] * zv[k, a]
                im += 2.0 * np.pi * ze[k, a] * wnodes[j, a]
            acc += fw[j] * np.exp(re) * complex(np.cos(im), np.sin(im))
        out[k] = acc
    return out


def bargmann_sums(wnodes, fw, amat, zv, ze):
    """Kernel quadrature sums of the fiberwise Bargmann transform.

    zv and ze are the translation/modulation parts of the target points;
    the z-only Gaussian prefactor is applied by the caller.
    """
    wnodes = np.ascontiguousarray(wnodes, dtype=np.float64)
    fw = np.ascontiguousarray(fw, dtype=np.complex128)
    amat = np.ascontiguousarray(amat, dtype=np.float64)
    zv = np.ascontiguousarray(zv, dtype=np.float64)
    ze = np.ascontiguousarray(ze, dtype=np.float64)
    if backend() == "numba":
        return _bargmann_sums_numba(wnodes, fw, amat, zv, ze)
    return _bargmann_sums_numpy(wnodes, fw, amat, zv, ze)
