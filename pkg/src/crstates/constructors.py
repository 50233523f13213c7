"""State families, condition flags and functional calculus on states."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bipartite import (
    _dims_of,
    flip_operator,
    max_ent_projector,
    partial_transpose,
    realignment,
    shuffle,
)
from .state import (
    DEFAULT_TOL,
    BipartiteState,
    DomainError,
    ParameterError,
    PreconditionError,
    ToleranceConfig,
    hermitize,
    is_psd,
    random_state,
)
from .superoperators import g_smallest_singular_value


@dataclass(frozen=True)
class TypeFlags:
    """Condition flags of a bipartite matrix.

    ``spc``, ``r_invariant`` and ``antisym_supported`` are ``None`` for
    rectangular splits, where realignment and the flip are not defined.
    """

    psd: bool
    ppt: bool
    spc: bool | None
    r_invariant: bool | None
    antisym_supported: bool | None
    rank: int

    @property
    def conditions(self) -> tuple:
        """The three conditions (PPT, SPC, R-invariant) in order."""
        return (self.ppt, self.spc, self.r_invariant)

    def to_dict(self) -> dict:
        return {
            "psd": self.psd,
            "ppt": self.ppt,
            "spc": self.spc,
            "r_invariant": self.r_invariant,
            "antisym_supported": self.antisym_supported,
            "rank": self.rank,
        }


def _rank(mat, cfg):
    s = np.linalg.svd(mat, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > cfg.tol_psd * s[0]))


def classify(state, cfg: ToleranceConfig = DEFAULT_TOL, k: int | None = None, m: int | None = None) -> TypeFlags:
    """Flags of a state, or of a raw matrix split as ``(k, m)``.

    Raw matrices may be non-Hermitian (e.g. a stored realignment); they then
    simply fail every positivity flag.
    """
    mat, k, m = _dims_of(state, k, m)
    pt = partial_transpose(mat, k, m)
    psd = is_psd(mat, cfg)
    ppt = is_psd(pt, cfg)
    spc = r_inv = anti = None
    if k == m:
        spc = is_psd(realignment(pt, k), cfg)
        scale = np.linalg.norm(mat)
        r_inv = bool(np.linalg.norm(realignment(mat, k) - mat) <= cfg.tol_zero * scale)
        sym = np.eye(k * k) + flip_operator(k) + max_ent_projector(k)
        anti = bool(np.linalg.norm(sym @ mat) <= cfg.tol_zero * max(scale, np.finfo(float).tiny))
    return TypeFlags(bool(psd), bool(ppt), spc, r_inv, anti, _rank(mat, cfg))


def werner_sectors(k: int, a: float, b: float, c: float) -> dict:
    """Eigenvalues of ``a Id + b F + c u u^*`` on its three invariant sectors.

    Sectors: antisymmetric subspace, symmetric subspace orthogonal to ``u``,
    and the line through ``u``. The antisymmetric sector is empty for k = 1.
    """
    out = {"sym_perp_u": a + b, "u_line": a + b + k * c}
    if k >= 2:
        out["antisym"] = a - b
    return out


def werner(k: int, a: float, b: float, c: float, cfg: ToleranceConfig = DEFAULT_TOL) -> BipartiteState:
    """``a Id + b F + c u_k u_k^*`` on C^k (x) C^k.

    Partial transpose sends (a, b, c) to (a, c, b) and realignment to (c, b, a).
    """
    if k < 2:
        raise ParameterError(f"k must be at least 2, got {k}")
    sectors = werner_sectors(k, a, b, c)
    scale = max(1.0, max(abs(v) for v in sectors.values()))
    if min(sectors.values()) < -cfg.tol_psd * scale:
        listing = ", ".join(f"{name}={value:.6g}" for name, value in sectors.items())
        raise DomainError(f"werner({k}, {a}, {b}, {c}) is not PSD: sector eigenvalues {listing}")
    mat = a * np.eye(k * k) + b * flip_operator(k) + c * max_ent_projector(k)
    return BipartiteState(k, k, mat, check=False)


def maxent(k: int) -> BipartiteState:
    return BipartiteState(k, k, max_ent_projector(k), check=False)


def _split_projections(k: int, split: int):
    if not 1 <= split < k:
        raise ParameterError(f"split must lie in [1, {k - 1}], got {split}")
    v1 = np.diag([1.0] * split + [0.0] * (k - split))
    return v1, np.eye(k) - v1


def diag_pair(k: int, split: int = 1) -> BipartiteState:
    """``V1 (x) V1 + V2 (x) V2`` for the coordinate split ``V1 + V2 = Id``."""
    v1, v2 = _split_projections(k, split)
    return BipartiteState(k, k, np.kron(v1, v1.T) + np.kron(v2, v2.T), check=False)


@dataclass(frozen=True)
class Counterexample:
    state: BipartiteState
    g_min_singular_value: float


def counterexample_delta(k: int, eps: float, split: int = 1) -> Counterexample:
    """``u u^* + eps (V1 (x) V1^t + V2 (x) V2^t)`` with its G-invertibility margin.

    The construction needs ``G`` invertible, which only holds for small
    ``eps``; the smallest singular value is returned so callers can check.
    """
    if not eps > 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    pair = diag_pair(k, split)
    mat = max_ent_projector(k) + eps * pair.matrix
    state = BipartiteState(k, k, mat, check=False)
    return Counterexample(state, g_smallest_singular_value(state))


def random(k: int, m: int, rank: int | None = None, seed=0) -> BipartiteState:
    return random_state(k, m, k * m if rank is None else rank, seed)


def _spectral_map(state: BipartiteState, fn, cfg: ToleranceConfig) -> BipartiteState:
    evals, evecs = np.linalg.eigh(state.matrix)
    top = evals[-1] if evals.size else 0.0
    # the numerical kernel is zeroed first so that roots do not inflate round-off
    live = evals > cfg.tol_psd * top if top > 0 else np.zeros(evals.shape, bool)
    mapped = np.where(live, fn(np.where(live, evals, 1.0)), 0.0)
    mat = hermitize((evecs * mapped) @ evecs.conj().T)
    return BipartiteState(state.k, state.m, mat, check=False)


def _check_order(n):
    if int(n) != n or n < 1:
        raise ParameterError(f"order must be a positive integer, got {n}")
    return int(n)


def power(state: BipartiteState, n: int, cfg: ToleranceConfig = DEFAULT_TOL) -> BipartiteState:
    n = _check_order(n)
    return _spectral_map(state, lambda t: t**n, cfg)


def root(state: BipartiteState, n: int, cfg: ToleranceConfig = DEFAULT_TOL) -> BipartiteState:
    n = _check_order(n)
    return _spectral_map(state, lambda t: t ** (1.0 / n), cfg)


def support_state(state: BipartiteState, cfg: ToleranceConfig = DEFAULT_TOL) -> BipartiteState:
    """Orthogonal projection onto the image of the state."""
    return _spectral_map(state, np.ones_like, cfg)


@dataclass
class NewTypeResult:
    state: BipartiteState
    flags: TypeFlags
    factor_flags: list[TypeFlags]
    new_type: bool
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "k": self.state.k,
            "m": self.state.m,
            "flags": self.flags.to_dict(),
            "factor_flags": [f.to_dict() for f in self.factor_flags],
            "new_type": self.new_type,
            "notes": list(self.notes),
        }


_CONDITION_NAMES = ("PPT", "SPC", "R-invariant")


def new_type_state(states, cfg: ToleranceConfig = DEFAULT_TOL) -> NewTypeResult:
    """Shuffle of states each meeting one of the three conditions.

    Hard requirements: square factors with k > 2, every input satisfies at
    least one condition and none is supported in the antisymmetric subspace.
    When every condition is also violated by some input, the shuffle is
    expected to satisfy none of them; otherwise the report says which
    condition survives.
    """
    states = list(states)
    if not states:
        raise PreconditionError("at least one input state is required")
    factor_flags = []
    for idx, g in enumerate(states):
        if g.k != g.m:
            raise PreconditionError(f"input {idx} is not square ({g.k}, {g.m})")
        if g.k <= 2:
            raise PreconditionError(f"input {idx} has k = {g.k}; the construction needs k > 2")
        flags = classify(g, cfg)
        if not any(flags.conditions):
            raise PreconditionError(f"input {idx} satisfies none of PPT, SPC, R-invariance")
        if flags.antisym_supported:
            raise PreconditionError(f"input {idx} is supported in the antisymmetric subspace")
        factor_flags.append(flags)
    notes = []
    expected = True
    for pos, name in enumerate(_CONDITION_NAMES):
        if all(f.conditions[pos] for f in factor_flags):
            expected = False
            notes.append(f"every input is {name}, so the shuffle stays {name}")
    out = shuffle(states)
    flags = classify(out, cfg)
    new_type = flags.psd and not any(flags.conditions)
    if expected and not new_type:
        notes.append("shuffle unexpectedly satisfies a condition")
    return NewTypeResult(out, flags, factor_flags, new_type, notes)
