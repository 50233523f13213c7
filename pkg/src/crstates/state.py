"""Dense matrices, PSD predicates, support projections and the state container.

Composite indices follow ``(i, p) -> i * m + p`` so that
``(A (x) B)[(i, p), (j, q)] == A[i, j] * B[p, q]``, which is exactly
``np.kron``. Every permutation in :mod:`crstates.bipartite` relies on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DimensionError(ValueError):
    """Shapes do not agree with the declared factor dimensions."""


class DomainError(ValueError):
    """Input lies outside the set an operation is defined on (e.g. not PSD)."""


class ParameterError(ValueError):
    """A scalar parameter is out of range."""


class PreconditionError(ValueError):
    """A documented hypothesis of a construction is violated."""


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds shared by every predicate.

    Attributes:
        tol_psd: relative slack for eigenvalue signs and supports.
        tol_zero: vanishing threshold for Frobenius/operator norms.
        tol_gap: relative spectral gap above which an eigenvalue is simple.
    """

    tol_psd: float = 1e-9
    tol_zero: float = 1e-9
    tol_gap: float = 1e-7

    def __post_init__(self):
        for name in ("tol_psd", "tol_zero", "tol_gap"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be strictly positive, got {value!r}")
        if not self.tol_gap > self.tol_zero:
            raise ParameterError("tol_gap must exceed tol_zero")

    def to_dict(self) -> dict:
        return {"tol_psd": self.tol_psd, "tol_zero": self.tol_zero, "tol_gap": self.tol_gap}


DEFAULT_TOL = ToleranceConfig()


def as_matrix(mat) -> np.ndarray:
    """Return ``mat`` as a finite complex 2-D array (no copy when possible)."""
    out = np.asarray(mat, dtype=np.complex128)
    if out.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise DomainError("matrix has non-finite entries")
    return out


def _square(mat) -> np.ndarray:
    out = as_matrix(mat)
    if out.shape[0] != out.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {out.shape}")
    return out


def hermitize(mat) -> np.ndarray:
    mat = np.asarray(mat)
    return (mat + mat.conj().T) / 2


def eigh_hermitian(mat) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of the Hermitian part of ``mat`` (ascending)."""
    return np.linalg.eigh(hermitize(_square(mat)))


def is_hermitian(mat, cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
    mat = _square(mat)
    scale = max(1.0, np.linalg.norm(mat))
    return bool(np.linalg.norm(mat - mat.conj().T) <= cfg.tol_zero * scale)


def is_psd(mat, cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True iff ``mat`` is Hermitian and its spectrum is non-negative.

    The eigenvalue slack is ``tol_psd * max(1, largest eigenvalue)``, so
    unnormalized states are judged on their own scale.
    """
    mat = _square(mat)
    if mat.shape[0] == 0:
        return True
    if not is_hermitian(mat, cfg):
        return False
    evals = np.linalg.eigvalsh(hermitize(mat))
    return bool(evals[0] >= -cfg.tol_psd * max(1.0, evals[-1]))


def min_eigenvalue(mat) -> float:
    return float(np.linalg.eigvalsh(hermitize(_square(mat)))[0])


def support_basis(mat, cfg: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal columns spanning the numerical image of a PSD matrix."""
    mat = _square(mat)
    if not is_psd(mat, cfg):
        raise DomainError("support is only defined for PSD matrices")
    evals, evecs = np.linalg.eigh(hermitize(mat))
    top = evals[-1] if evals.size else 0.0
    if top <= 0:
        return np.zeros((mat.shape[0], 0), dtype=np.complex128)
    keep = evals > cfg.tol_psd * top
    return evecs[:, keep]


def support_projection(mat, cfg: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projection onto the image of a PSD matrix.

    Eigenvalues at most ``tol_psd`` times the largest one count as zero.
    """
    basis = support_basis(mat, cfg)
    return basis @ basis.conj().T


def is_projection(mat, cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
    mat = _square(mat)
    if not is_hermitian(mat, cfg):
        return False
    scale = max(1.0, np.linalg.norm(mat))
    return bool(np.linalg.norm(mat @ mat - mat) <= cfg.tol_zero * scale * 10)


def numerical_rank(mat, cfg: ToleranceConfig = DEFAULT_TOL) -> int:
    return support_basis(mat, cfg).shape[1]


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """A PSD matrix on C^k (x) C^m (unnormalized).

    The matrix is copied and frozen on construction. Pass ``check=False`` only
    for matrices already known to be valid (e.g. results of exact index
    permutations of valid states).
    """

    k: int
    m: int
    matrix: np.ndarray
    check: bool = True

    def __post_init__(self):
        k, m = int(self.k), int(self.m)
        if k < 1 or m < 1:
            raise DimensionError(f"factor dimensions must be positive, got ({k}, {m})")
        mat = np.array(self.matrix, dtype=np.complex128, copy=True)
        if mat.shape != (k * m, k * m):
            raise DimensionError(f"matrix of shape {mat.shape} does not match k*m = {k * m}")
        if not np.all(np.isfinite(mat)):
            raise DomainError("state has non-finite entries")
        if self.check and not is_psd(mat):
            raise DomainError(
                f"matrix is not a state (min eigenvalue {min_eigenvalue(mat):.3e})"
            )
        mat = hermitize(mat)
        mat.setflags(write=False)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.k * self.m

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def rank(self, cfg: ToleranceConfig = DEFAULT_TOL) -> int:
        return numerical_rank(self.matrix, cfg)

    def tensor(self) -> np.ndarray:
        """View as a 4-index array ``[i, p, j, q]``."""
        return self.matrix.reshape(self.k, self.m, self.k, self.m)

    def __repr__(self):
        return f"BipartiteState(k={self.k}, m={self.m}, trace={self.trace:.6g})"


def random_state(k: int, m: int, rank: int, seed) -> BipartiteState:
    """Unit-trace state ``G G^*`` from a seeded ``km x rank`` complex Gaussian ``G``."""
    n = k * m
    if not 1 <= rank <= n:
        raise ParameterError(f"rank must lie in [1, {n}], got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    mat = g @ g.conj().T
    return BipartiteState(k, m, mat / np.trace(mat).real)


def random_unitary(n: int, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
