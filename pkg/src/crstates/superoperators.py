"""The maps G and F attached to a state and their composition T = F o G.

Linear maps on matrix spaces are stored as real matrices acting on
coordinates in an orthonormal Hermitian basis (trace inner product). The
basis of M_k is frozen in this order:

1. ``Id / sqrt(k)``
2. symmetric pairs ``(E_jl + E_lj) / sqrt(2)`` for ``j < l`` (lexicographic)
3. antisymmetric pairs ``(-i E_jl + i E_lj) / sqrt(2)`` for ``j < l``
4. traceless diagonals ``diag(1, ..., 1, -l, 0, ...) / sqrt(l (l + 1))``, ``l = 1..k-1``

The coordinate of ``X`` along basis element ``B_a`` is ``tr(B_a X)``, which is
real whenever ``X`` is Hermitian. Because ``F`` is the trace adjoint of ``G``,
the representation of ``F`` is the transpose of that of ``G`` and
``T = F o G`` is a real symmetric positive semidefinite matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .state import BipartiteState, DimensionError, as_matrix


@lru_cache(maxsize=64)
def _basis(k: int) -> np.ndarray:
    mats = [np.eye(k, dtype=np.complex128) / np.sqrt(k)]
    pairs = [(j, l) for j in range(k) for l in range(j + 1, k)]
    for j, l in pairs:
        b = np.zeros((k, k), dtype=np.complex128)
        b[j, l] = b[l, j] = 1 / np.sqrt(2)
        mats.append(b)
    for j, l in pairs:
        b = np.zeros((k, k), dtype=np.complex128)
        b[j, l] = -1j / np.sqrt(2)
        b[l, j] = 1j / np.sqrt(2)
        mats.append(b)
    for l in range(1, k):
        d = np.zeros(k)
        d[:l] = 1.0
        d[l] = -l
        mats.append(np.diag(d / np.sqrt(l * (l + 1))).astype(np.complex128))
    out = np.array(mats)
    out.setflags(write=False)
    return out


def hermitian_basis(k: int) -> np.ndarray:
    """Orthonormal Hermitian basis of M_k as an array of shape ``(k*k, k, k)``."""
    if k < 1:
        raise DimensionError("k must be positive")
    return _basis(int(k))


def to_coords(mats) -> np.ndarray:
    """Complex coordinates ``tr(B_a X)``; real for Hermitian input.

    Accepts a single ``k x k`` matrix or a stack ``(n, k, k)``.
    """
    mats = np.asarray(mats, dtype=np.complex128)
    basis = hermitian_basis(mats.shape[-1])
    flat = basis.reshape(basis.shape[0], -1)
    if mats.ndim == 2:
        return flat @ mats.T.reshape(-1)
    return np.swapaxes(mats, -1, -2).reshape(mats.shape[0], -1) @ flat.T


def from_coords(coords, k: int) -> np.ndarray:
    coords = np.asarray(coords)
    return np.tensordot(coords, hermitian_basis(k), axes=([-1], [0]))


@dataclass(frozen=True, eq=False)
class SuperOperator:
    """Linear map ``M_in -> M_out`` as a real ``out_dim^2 x in_dim^2`` matrix."""

    in_dim: int
    out_dim: int
    rep: np.ndarray

    def __post_init__(self):
        rep = np.array(self.rep, dtype=float, copy=True)
        if rep.shape != (self.out_dim**2, self.in_dim**2):
            raise DimensionError(
                f"rep shape {rep.shape} does not match dims ({self.in_dim} -> {self.out_dim})"
            )
        rep.setflags(write=False)
        object.__setattr__(self, "rep", rep)

    def __call__(self, x) -> np.ndarray:
        x = as_matrix(x)
        if x.shape != (self.in_dim, self.in_dim):
            raise DimensionError(f"expected a {self.in_dim} x {self.in_dim} input")
        return from_coords(self.rep @ to_coords(x), self.out_dim)

    def compose(self, other: SuperOperator) -> SuperOperator:
        """``self o other``."""
        if other.out_dim != self.in_dim:
            raise DimensionError("incompatible superoperators")
        return SuperOperator(other.in_dim, self.out_dim, self.rep @ other.rep)

    def adjoint(self) -> SuperOperator:
        return SuperOperator(self.out_dim, self.in_dim, self.rep.T)

    @property
    def norm(self) -> float:
        """Operator norm with respect to the trace (Frobenius) inner product."""
        if self.rep.size == 0:
            return 0.0
        return float(np.linalg.norm(self.rep, 2))

    def to_dict(self) -> dict:
        if self.in_dim != self.out_dim:
            return {"in_dim": self.in_dim, "out_dim": self.out_dim, "rep": self.rep.tolist()}
        return {"k": self.in_dim, "rep": self.rep.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> SuperOperator:
        if "k" in data:
            return cls(int(data["k"]), int(data["k"]), np.array(data["rep"], dtype=float))
        return cls(int(data["in_dim"]), int(data["out_dim"]), np.array(data["rep"], dtype=float))


def identity_map(k: int) -> SuperOperator:
    return SuperOperator(k, k, np.eye(k * k))


def transpose_map(k: int) -> SuperOperator:
    basis = hermitian_basis(k)
    rep = np.real(to_coords(np.swapaxes(basis, -1, -2))).T
    return SuperOperator(k, k, rep)


def g_apply(state: BipartiteState, x) -> np.ndarray:
    """``G(X) = Tr_1(gamma (X (x) Id))``, a map ``M_k -> M_m``."""
    x = as_matrix(x)
    if x.shape != (state.k, state.k):
        raise DimensionError(f"G expects a {state.k} x {state.k} input, got {x.shape}")
    return np.einsum("ipaq,ai->pq", state.tensor(), x)


def f_apply(state: BipartiteState, y) -> np.ndarray:
    """``F(Y) = Tr_2(gamma (Id (x) Y))``, a map ``M_m -> M_k``."""
    y = as_matrix(y)
    if y.shape != (state.m, state.m):
        raise DimensionError(f"F expects a {state.m} x {state.m} input, got {y.shape}")
    return np.einsum("ipjb,bp->ij", state.tensor(), y)


def g_superop(state: BipartiteState) -> SuperOperator:
    """Representation of G: ``rep[a, b] = tr(gamma (B^k_b (x) B^m_a))``."""
    k, m = state.k, state.m
    # realigned[(i, j), (p, q)] = gamma[(i, p), (j, q)]
    realigned = state.tensor().transpose(0, 2, 1, 3).reshape(k * k, m * m)
    ck = np.swapaxes(hermitian_basis(k), -1, -2).reshape(k * k, k * k)
    cm = np.swapaxes(hermitian_basis(m), -1, -2).reshape(m * m, m * m)
    rep = (ck @ realigned @ cm.T).real.T
    return SuperOperator(k, m, rep)


def f_superop(state: BipartiteState) -> SuperOperator:
    return g_superop(state).adjoint()


def fg_superop(state: BipartiteState) -> SuperOperator:
    """``T = F o G`` on M_k; its rep is ``rep_G^t rep_G`` (symmetric PSD)."""
    g = g_superop(state).rep
    rep = g.T @ g
    return SuperOperator(state.k, state.k, (rep + rep.T) / 2)


def g_smallest_singular_value(state: BipartiteState) -> float:
    """Smallest singular value of G; zero means G is not injective."""
    s = np.linalg.svd(g_superop(state).rep, compute_uv=False)
    if state.k > state.m:
        return 0.0
    return float(s[-1]) if s.size else 0.0


def verify_adjoint(state: BipartiteState, trials: int = 100, seed=0) -> float:
    """Largest ``|tr(G(X) Y^*) - tr(X F(Y)^*)|`` over seeded random Hermitian X, Y.

    The deviation is returned relative to ``||gamma||_F * ||X||_F * ||Y||_F``.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    scale_g = max(np.linalg.norm(state.matrix), np.finfo(float).tiny)
    for _ in range(trials):
        x = _random_hermitian(rng, state.k)
        y = _random_hermitian(rng, state.m)
        lhs = np.trace(g_apply(state, x) @ y.conj().T)
        rhs = np.trace(x @ f_apply(state, y).conj().T)
        scale = scale_g * np.linalg.norm(x) * np.linalg.norm(y)
        worst = max(worst, abs(lhs - rhs) / scale)
    return float(worst)


def _random_hermitian(rng, n):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (z + z.conj().T) / 2


def choi(op: SuperOperator) -> np.ndarray:
    """Choi matrix ``(Id (x) T)(u u^*) = sum_ij E_ij (x) T(E_ij)``."""
    if op.in_dim != op.out_dim:
        raise DimensionError("choi is defined here for maps M_k -> M_k")
    k = op.in_dim
    units = np.zeros((k * k, k, k), dtype=np.complex128)
    units[np.arange(k * k), np.arange(k * k) // k, np.arange(k * k) % k] = 1.0
    images = from_coords(to_coords(units) @ op.rep.T, k)
    out = np.zeros((k * k, k * k), dtype=np.complex128)
    for idx in range(k * k):
        i, j = divmod(idx, k)
        out[i * k : (i + 1) * k, j * k : (j + 1) * k] = images[idx]
    return out


def product_basis_change(k1: int, k2: int) -> np.ndarray:
    """Orthogonal matrix ``U[c, (a, b)] = tr(B_c (B_a (x) B_b))`` on M_{k1 k2}."""
    b1, b2 = hermitian_basis(k1), hermitian_basis(k2)
    prods = np.einsum("aij,bpq->abipjq", b1, b2).reshape(k1 * k1 * k2 * k2, k1 * k2, k1 * k2)
    return np.real(to_coords(prods)).T
