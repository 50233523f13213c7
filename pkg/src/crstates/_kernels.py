"""Hot loops used by the bipartite operations and the distillability probe.

Every kernel exists twice: a numba ``@njit`` version and a pure numpy
version with identical semantics. The numba path is used when numba imports
and ``CRSTATES_DISABLE_NUMBA`` is unset (or ``0``); otherwise the numpy path
is used. Both implementations stay importable as ``NUMPY_KERNELS`` and
``NUMBA_KERNELS`` so tests and benchmarks can compare them directly.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

# ---------------------------------------------------------------------------
# numpy reference path
# ---------------------------------------------------------------------------


def _np_partial_transpose(mat, k, m):
    return np.ascontiguousarray(
        mat.reshape(k, m, k, m).transpose(0, 3, 2, 1).reshape(k * m, k * m)
    )


def _np_realign(mat, k):
    return np.ascontiguousarray(
        mat.reshape(k, k, k, k).transpose(0, 2, 1, 3).reshape(k * k, k * k)
    )


def _np_quadratic_forms(sigma, vecs):
    # vecs: (trials, n); returns Re(v^* sigma v) per row
    return np.einsum("ti,ij,tj->t", vecs.conj(), sigma, vecs).real.copy()


def _np_compress_batch(sigma, frames):
    # frames: (trials, K, 2); returns B^* sigma B with B = A (x) conj(A)
    trials, K, _ = frames.shape
    out = np.empty((trials, 4, 4), dtype=np.complex128)
    for t in range(trials):
        a = frames[t]
        b = np.kron(a, a.conj())
        out[t] = b.conj().T @ sigma @ b
    return out


NUMPY_KERNELS = SimpleNamespace(
    name="numpy",
    partial_transpose=_np_partial_transpose,
    realign=_np_realign,
    quadratic_forms=_np_quadratic_forms,
    compress_batch=_np_compress_batch,
)

# ---------------------------------------------------------------------------
# numba path
# ---------------------------------------------------------------------------

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

if njit is not None:

    @njit(cache=True)
    def _nb_partial_transpose(mat, k, m):
        n = k * m
        out = np.empty((n, n), dtype=mat.dtype)
        for i in range(k):
            for p in range(m):
                for j in range(k):
                    for q in range(m):
                        out[i * m + p, j * m + q] = mat[i * m + q, j * m + p]
        return out

    @njit(cache=True)
    def _nb_realign(mat, k):
        n = k * k
        out = np.empty((n, n), dtype=mat.dtype)
        for i in range(k):
            for p in range(k):
                for j in range(k):
                    for q in range(k):
                        out[i * k + p, j * k + q] = mat[i * k + j, p * k + q]
        return out

    @njit(cache=True)
    def _nb_quadratic_forms(sigma, vecs):
        trials, n = vecs.shape
        out = np.empty(trials)
        for t in range(trials):
            acc = 0.0 + 0.0j
            for i in range(n):
                row = 0.0 + 0.0j
                for j in range(n):
                    row += sigma[i, j] * vecs[t, j]
                acc += np.conj(vecs[t, i]) * row
            out[t] = acc.real
        return out

    @njit(cache=True)
    def _nb_compress_batch(sigma, frames):
        trials, K, _ = frames.shape
        n = K * K
        out = np.empty((trials, 4, 4), dtype=np.complex128)
        b = np.empty((n, 4), dtype=np.complex128)
        for t in range(trials):
            for i in range(K):
                for p in range(K):
                    for c in range(2):
                        for d in range(2):
                            b[i * K + p, 2 * c + d] = frames[t, i, c] * np.conj(frames[t, p, d])
            # the n x n product goes through BLAS; the loops above only build B
            sb = sigma @ b
            out[t] = np.ascontiguousarray(np.conj(b).T) @ sb
        return out

    NUMBA_KERNELS = SimpleNamespace(
        name="numba",
        partial_transpose=_nb_partial_transpose,
        realign=_nb_realign,
        quadratic_forms=_nb_quadratic_forms,
        compress_batch=_nb_compress_batch,
    )
else:  # pragma: no cover
    NUMBA_KERNELS = None


def _select():
    flag = os.environ.get("CRSTATES_DISABLE_NUMBA", "").strip().lower()
    if NUMBA_KERNELS is None or flag not in ("", "0", "false", "no"):
        return NUMPY_KERNELS
    return NUMBA_KERNELS


ACTIVE = _select()
