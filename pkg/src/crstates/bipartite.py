"""Index permutations and contractions on bipartite and multipartite matrices."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import _kernels
from .state import (
    BipartiteState,
    DimensionError,
    ParameterError,
    as_matrix,
    hermitize,
)


def _dims_of(mat, k, m):
    if isinstance(mat, BipartiteState):
        return mat.matrix, mat.k, mat.m
    mat = as_matrix(mat)
    if k is None:
        raise DimensionError("factor dimension k is required for raw matrices")
    if m is None:
        m = mat.shape[0] // k
    if mat.shape != (k * m, k * m):
        raise DimensionError(f"matrix of shape {mat.shape} does not split as ({k}, {m})")
    return mat, k, m


def partial_transpose(mat, k: int | None = None, m: int | None = None) -> np.ndarray:
    """Transpose the second tensor factor.

    Entry ``((i, p), (j, q))`` of the result is entry ``((i, q), (j, p))`` of
    the input. Accepts a :class:`BipartiteState` or a raw matrix with ``k``
    (and optionally ``m``).
    """
    mat, k, m = _dims_of(mat, k, m)
    return _kernels.ACTIVE.partial_transpose(np.ascontiguousarray(mat), k, m)


def realignment(mat, k: int | None = None, m: int | None = None) -> np.ndarray:
    """Realignment ``((i, p), (j, q)) <- ((i, j), (p, q))``.

    Defined for square splits only; it maps ``u u^*`` to the identity, the
    identity to ``u u^*`` and fixes the flip operator.
    """
    mat, k, m = _dims_of(mat, k, m)
    if k != m:
        raise DimensionError(f"realignment needs k == m, got ({k}, {m})")
    return _kernels.ACTIVE.realign(np.ascontiguousarray(mat), k)


def flip_operator(k: int) -> np.ndarray:
    """Swap operator ``F (x (x) y) = y (x) x`` on C^k (x) C^k."""
    if k < 1:
        raise ParameterError("k must be positive")
    idx = np.arange(k * k)
    i, p = np.divmod(idx, k)
    out = np.zeros((k * k, k * k))
    out[idx, p * k + i] = 1.0
    return out.astype(np.complex128)


def max_ent_vector(k: int) -> np.ndarray:
    """Unnormalized ``u_k = sum_i e_i (x) e_i``."""
    if k < 1:
        raise ParameterError("k must be positive")
    return np.eye(k, dtype=np.complex128).reshape(-1)


def max_ent_projector(k: int) -> np.ndarray:
    u = max_ent_vector(k)
    return np.outer(u, u.conj())


@dataclass(frozen=True)
class SitesDescriptor:
    """Factor dimensions of a multipartite matrix and the left/right boundary.

    ``dims[:split]`` form the left party and ``dims[split:]`` the right one.
    """

    dims: tuple[int, ...]
    split: int

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ParameterError(f"dims must be positive, got {self.dims}")
        if not 0 <= self.split <= len(dims):
            raise ParameterError(f"split {self.split} outside [0, {len(dims)}]")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def bipartite(cls, k: int, m: int) -> SitesDescriptor:
        return cls((k, m), 1)

    @property
    def total(self) -> int:
        return int(np.prod(self.dims))

    @property
    def left(self) -> int:
        return int(np.prod(self.dims[: self.split], dtype=int))

    @property
    def right(self) -> int:
        return int(np.prod(self.dims[self.split :], dtype=int))

    def without(self, site: int) -> SitesDescriptor:
        self._check(site)
        dims = self.dims[:site] + self.dims[site + 1 :]
        split = self.split - 1 if site < self.split else self.split
        if not dims:
            raise ParameterError("cannot trace out the only remaining site")
        return SitesDescriptor(dims, split)

    def _check(self, site):
        if not 0 <= site < len(self.dims):
            raise ParameterError(f"site index {site} outside [0, {len(self.dims)})")


def partial_trace(mat, sites: SitesDescriptor, site_index: int) -> np.ndarray:
    """Trace out one tensor factor; the result lives on ``sites.without(site_index)``."""
    sites._check(site_index)
    mat = as_matrix(mat)
    n = sites.total
    if mat.shape != (n, n):
        raise DimensionError(f"matrix of shape {mat.shape} does not match dims {sites.dims}")
    s = len(sites.dims)
    t = mat.reshape(sites.dims + sites.dims)
    out = np.trace(t, axis1=site_index, axis2=s + site_index)
    rest = n // sites.dims[site_index]
    return out.reshape(rest, rest)


def tensor_state(mat, sites: SitesDescriptor) -> BipartiteState:
    """Read a multipartite matrix as a bipartite state across ``sites.split``."""
    return BipartiteState(sites.left, sites.right, mat)


def shuffle_matrices(mats, dims) -> np.ndarray:
    """Shuffle raw matrices ``mats[i]`` on ``C^{k_i} (x) C^{m_i}``.

    Returns ``P (mats[0] (x) ... (x) mats[-1]) P^t`` where ``P`` regroups the
    factors ``(k1, m1, ..., ks, ms)`` into ``(k1, ..., ks, m1, ..., ms)``. The
    matrices need not be Hermitian.
    """
    if not mats:
        raise ParameterError("shuffle needs at least one matrix")
    if len(mats) != len(dims):
        raise ParameterError("one (k, m) pair is needed per matrix")
    mats = [as_matrix(x) for x in mats]
    for x, (k, m) in zip(mats, dims):
        if x.shape != (k * m, k * m):
            raise DimensionError(f"matrix of shape {x.shape} does not split as ({k}, {m})")
    s = len(mats)
    if s == 1:
        return mats[0].copy()
    axes_dims = [d for pair in dims for d in pair]
    big = reduce(np.kron, mats)
    # kron axes are (k1, m1, ..., ks, ms); regroup to (k1, ..., ks, m1, ..., ms)
    order = [2 * i for i in range(s)] + [2 * i + 1 for i in range(s)]
    t = big.reshape(axes_dims + axes_dims)
    perm = order + [2 * s + a for a in order]
    n = big.shape[0]
    return np.ascontiguousarray(t.transpose(perm).reshape(n, n))


def shuffle(states) -> BipartiteState:
    """Shuffle of bipartite states, a state on ``(prod k_i, prod m_i)``."""
    states = list(states)
    if not states:
        raise ParameterError("shuffle needs at least one state")
    mat = shuffle_matrices([g.matrix for g in states], [(g.k, g.m) for g in states])
    K = int(np.prod([g.k for g in states]))
    M = int(np.prod([g.m for g in states]))
    return BipartiteState(K, M, mat, check=False)


def shuffle_sites(states) -> SitesDescriptor:
    ks = tuple(g.k for g in states)
    ms = tuple(g.m for g in states)
    return SitesDescriptor(ks + ms, len(ks))


def compress(sigma, frame: np.ndarray) -> BipartiteState:
    """Compress a state on ``C^K (x) C^K`` to ``C^2 (x) C^2``.

    Returns ``(A^* (x) A^t) sigma (A (x) conj(A))`` for a ``K x 2`` frame ``A``,
    Hermitized.
    """
    frame = as_matrix(frame)
    if isinstance(sigma, BipartiteState):
        mat, K, M = sigma.matrix, sigma.k, sigma.m
    else:
        mat = as_matrix(sigma)
        K = M = frame.shape[0]
    if K != M or frame.shape != (K, 2) or mat.shape != (K * K, K * K):
        raise DimensionError(
            f"compress needs a (K, K) state and a K x 2 frame, got {mat.shape} and {frame.shape}"
        )
    if np.linalg.matrix_rank(frame) < 2:
        warnings.warn("compression frame is rank deficient", RuntimeWarning, stacklevel=2)
    b = np.kron(frame, frame.conj())
    out = hermitize(b.conj().T @ mat @ b)
    return BipartiteState(2, 2, out)
