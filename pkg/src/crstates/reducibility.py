"""Complete reducibility of ``T = F o G``: Perron supports, pair tests, certificates.

``decompose`` walks a worklist of projections ``P`` whose sub-algebras
``P M_k P`` are invariant under ``T`` and already split off from everything
else. For each one it takes the PSD eigenvector of ``T|PMP`` at the spectral
radius with the largest support. A proper support ``W`` must split ``P``
cleanly (``T`` vanishing on ``W M (P-W) + (P-W) M W``) or the state is not
completely reducible. A full support with a simple spectral radius is an
irreducible block. A full support with a degenerate spectral radius is pushed
to the PSD boundary inside the top eigenspace, which yields a PSD eigenvector
of strictly smaller support and hence a proper split candidate.

Projections are carried as orthonormal column bases, and all spectral work on
``P M_k P`` happens in local ``r x r`` coordinates (``r = rank P``), so split
pieces stay exactly inside their parent.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .state import (
    DEFAULT_TOL,
    BipartiteState,
    DimensionError,
    ToleranceConfig,
    as_matrix,
    hermitize,
    support_projection,
)
from .superoperators import (
    SuperOperator,
    fg_superop,
    from_coords,
    g_apply,
    hermitian_basis,
    to_coords,
)


class Verdict(str, enum.Enum):
    COMPLETELY_REDUCIBLE = "CompletelyReducible"
    NOT_COMPLETELY_REDUCIBLE = "NotCompletelyReducible"
    INCONCLUSIVE = "Inconclusive"


class ZeroBlock(Exception):
    """``T`` is numerically zero on the requested sub-algebra."""


@dataclass
class PairCheck:
    holds_a: bool
    holds_b: bool
    defect_b: float
    trace_w_vperp: float
    trace_wperp_v: float

    def to_dict(self) -> dict:
        return {
            "holds_a": self.holds_a,
            "holds_b": self.holds_b,
            "defect_b": self.defect_b,
            "trace_w_vperp": self.trace_w_vperp,
            "trace_wperp_v": self.trace_wperp_v,
        }


@dataclass
class Block:
    w: np.ndarray
    v: np.ndarray
    spectral_radius: float
    gap: float | None = None

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.w).real))


@dataclass
class Witness:
    w: np.ndarray
    v: np.ndarray
    check: PairCheck
    offblock_norm: float


@dataclass
class ReducibilityCertificate:
    verdict: Verdict
    blocks: list[Block] = field(default_factory=list)
    residual_norm: float = 0.0
    t_norm: float = 0.0
    witness: Witness | None = None
    gap_report: float | None = None
    tolerances: ToleranceConfig = DEFAULT_TOL
    notes: list[str] = field(default_factory=list)

    @property
    def is_cr(self) -> bool:
        return self.verdict is Verdict.COMPLETELY_REDUCIBLE

    def to_dict(self) -> dict:
        out = {
            "verdict": self.verdict.value,
            "blocks": [
                {
                    "rank": b.rank,
                    "spectral_radius": b.spectral_radius,
                    "gap": b.gap,
                    "W": _matrix_dict(b.w),
                    "V": _matrix_dict(b.v),
                }
                for b in self.blocks
            ],
            "residual_norm": self.residual_norm,
            "t_norm": self.t_norm,
            "witness": None,
            "gap_report": self.gap_report,
            "tolerances": self.tolerances.to_dict(),
            "notes": list(self.notes),
        }
        if self.witness is not None:
            out["witness"] = {
                "W": _matrix_dict(self.witness.w),
                "V": _matrix_dict(self.witness.v),
                "offblock_norm": self.witness.offblock_norm,
                **self.witness.check.to_dict(),
            }
        return out


def _matrix_dict(mat) -> dict:
    mat = np.asarray(mat)
    return {"re": (mat.real + 0.0).tolist(), "im": (mat.imag + 0.0).tolist()}


# ---------------------------------------------------------------------------
# sub-algebra coordinates
# ---------------------------------------------------------------------------


def subalgebra_embedding(q: np.ndarray) -> np.ndarray:
    """Columns: coordinates of ``Q B^r_c Q^*`` for the Hermitian basis of M_r.

    For orthonormal ``Q`` (``k x r``) the columns are orthonormal and span the
    Hermitian part of ``P M_k P`` with ``P = Q Q^*``.
    """
    r = q.shape[1]
    if r == 0:
        return np.zeros((q.shape[0] ** 2, 0))
    mats = np.einsum("is,csu,ju->cij", q, hermitian_basis(r), q.conj())
    return np.real(to_coords(mats)).T


def offblock_embedding(qa: np.ndarray, qb: np.ndarray) -> np.ndarray:
    """Orthonormal coordinates of the Hermitian part of ``A M B + B M A``."""
    ra, rb = qa.shape[1], qb.shape[1]
    if ra == 0 or rb == 0:
        return np.zeros((qa.shape[0] ** 2, 0))
    outer = np.einsum("is,jt->stij", qa, qb.conj()).reshape(ra * rb, qa.shape[0], qa.shape[0])
    herm = (outer + np.swapaxes(outer, -1, -2).conj()) / np.sqrt(2)
    skew = (1j * outer - 1j * np.swapaxes(outer, -1, -2).conj()) / np.sqrt(2)
    return np.real(to_coords(np.concatenate([herm, skew]))).T


def _local_split(mat_loc, cfg):
    """Eigenbasis of a PSD local matrix split into (support, kernel)."""
    evals, evecs = np.linalg.eigh(hermitize(mat_loc))
    top = evals[-1] if evals.size else 0.0
    keep = evals > cfg.tol_psd * top if top > 0 else np.zeros(evals.shape, bool)
    return evecs[:, keep], evecs[:, ~keep], evals


@dataclass
class _Spectrum:
    q: np.ndarray
    evals: np.ndarray
    top_vecs: np.ndarray
    lam: float
    multiplicity: int
    gap: float | None
    ambiguous: bool
    rho_loc: np.ndarray
    rho_coords: np.ndarray


def _spectrum(op: SuperOperator, q: np.ndarray, t_norm: float, cfg: ToleranceConfig) -> _Spectrum:
    r = q.shape[1]
    emb = subalgebra_embedding(q)
    restricted = emb.T @ op.rep @ emb
    restricted = (restricted + restricted.T) / 2
    evals, evecs = np.linalg.eigh(restricted)
    lam = float(evals[-1])
    if lam <= cfg.tol_zero * t_norm:
        raise ZeroBlock(f"spectral radius {lam:.3e} on a rank-{r} sub-algebra")
    rel = (lam - evals) / lam
    top = rel <= cfg.tol_zero
    ambiguous = bool(np.any((rel > cfg.tol_zero) & (rel < cfg.tol_gap)))
    rest = rel[~top]  # descending, so the last entry is the smallest gap
    gap = float(rest[-1]) if rest.size else None
    top_vecs = evecs[:, top]
    # project the identity of the sub-algebra (coordinates sqrt(r) e_0) on the top space
    p_loc = np.zeros(r * r)
    p_loc[0] = np.sqrt(r)
    coords = top_vecs @ (top_vecs.T @ p_loc)
    rho_loc = hermitize(from_coords(coords, r))
    w = np.linalg.eigvalsh(rho_loc)
    if w[0] < -cfg.tol_psd * max(w[-1], 0.0) or w[-1] <= 0:
        coords, rho_loc = _power_iteration(restricted, p_loc, r)
    norm = np.linalg.norm(rho_loc)
    return _Spectrum(
        q=q,
        evals=evals,
        top_vecs=top_vecs,
        lam=lam,
        multiplicity=int(top.sum()),
        gap=gap,
        ambiguous=ambiguous,
        rho_loc=rho_loc / norm,
        rho_coords=coords / norm,
    )


def _power_iteration(restricted, start, r, iters=20000, tol=1e-15):
    x = start / np.linalg.norm(start)
    for _ in range(iters):
        y = restricted @ x
        y /= np.linalg.norm(y)
        if np.linalg.norm(y - x) < tol:
            x = y
            break
        x = y
    evals, evecs = np.linalg.eigh(hermitize(from_coords(x, r)))
    rho = (evecs * np.clip(evals, 0, None)) @ evecs.conj().T
    return x, rho


def _basis_of(proj, cfg) -> np.ndarray:
    proj = as_matrix(proj)
    inside, _, _ = _local_split(proj, cfg)
    return inside


def perron_psd(
    op: SuperOperator, proj=None, cfg: ToleranceConfig = DEFAULT_TOL
) -> tuple[np.ndarray, float]:
    """PSD eigenvector of ``T|PMP`` at its spectral radius.

    ``P`` must span a sub-algebra invariant under ``op`` (default: identity).
    The eigenvector returned is the projection of ``P`` onto the top
    eigenspace, which has the largest support among PSD top eigenvectors; it is
    normalized to unit Frobenius norm.

    Raises:
        ZeroBlock: if ``op`` vanishes on ``P M P`` (relative to ``tol_zero``).
    """
    k = op.in_dim
    q = np.eye(k, dtype=np.complex128) if proj is None else _basis_of(proj, cfg)
    spectrum = _spectrum(op, q, max(op.norm, np.finfo(float).tiny), cfg)
    return q @ spectrum.rho_loc @ q.conj().T, spectrum.lam


def invariant_partner(state: BipartiteState, w) -> np.ndarray:
    """``V`` = projection onto the image of ``G(W)``."""
    image = hermitize(g_apply(state, w))
    return support_projection(image)


def certify_pair(state: BipartiteState, w, v, cfg: ToleranceConfig = DEFAULT_TOL) -> PairCheck:
    """Compare the trace-vanishing condition (a) with the splitting condition (b).

    (a): ``tr(gamma (W (x) V^perp)) = tr(gamma (W^perp (x) V)) = 0``
    (b): ``gamma = (W(x)V) gamma (W(x)V) + (W^perp(x)V^perp) gamma (W^perp(x)V^perp)``
    """
    w, v = as_matrix(w), as_matrix(v)
    k, m = state.k, state.m
    if w.shape != (k, k) or v.shape != (m, m):
        raise DimensionError(f"projections must be {k}x{k} and {m}x{m}")
    gamma = state.matrix
    wp = np.eye(k) - w
    vp = np.eye(m) - v
    t1 = float(np.trace(gamma @ np.kron(w, vp)).real)
    t2 = float(np.trace(gamma @ np.kron(wp, v)).real)
    a = np.kron(w, v)
    b = np.kron(wp, vp)
    defect = float(np.linalg.norm(gamma - a @ gamma @ a - b @ gamma @ b))
    scale_tr = max(state.trace, 0.0)
    holds_a = max(abs(t1), abs(t2)) <= cfg.tol_zero * scale_tr
    holds_b = defect <= cfg.tol_zero * np.linalg.norm(gamma)
    return PairCheck(bool(holds_a), bool(holds_b), defect, t1, t2)


def _offblock_norm(op, qa, qb) -> float:
    emb = offblock_embedding(qa, qb)
    if emb.shape[1] == 0:
        return 0.0
    return float(np.linalg.norm(op.rep @ emb, 2))


def _descend(spectrum: _Spectrum, cfg: ToleranceConfig):
    """Move from the full-support Perron vector to the PSD boundary of the top space."""
    r = spectrum.q.shape[1]
    y = spectrum.top_vecs.T @ spectrum.rho_coords
    _, _, vh = np.linalg.svd(y.reshape(1, -1))
    sigma_loc = hermitize(from_coords(spectrum.top_vecs @ vh[1], r))
    mu = scipy.linalg.eigh(sigma_loc, spectrum.rho_loc, eigvals_only=True)
    t = 1.0 / mu[-1]
    return hermitize(spectrum.rho_loc - t * sigma_loc)


def _sort_key(block: Block):
    diag = np.diag(block.w).real
    idx = int(np.argmax(diag > 1e-12)) if np.any(diag > 1e-12) else len(diag)
    return (idx, -round(float(diag[idx]) if idx < len(diag) else 0.0, 9), block.rank)


def decompose(state: BipartiteState, cfg: ToleranceConfig = DEFAULT_TOL) -> ReducibilityCertificate:
    """Decide whether ``F o G`` is completely reducible, with evidence.

    Returns a certificate holding either the irreducible blocks ``(W_i, V_i)``
    and the residual norm, or a pair ``(W, V)`` satisfying condition (a) but
    violating (b), or an ``Inconclusive`` verdict when a multiplicity decision
    falls between ``tol_zero`` and ``tol_gap``.
    """
    k = state.k
    op = fg_superop(state)
    t_norm = op.norm
    cert = ReducibilityCertificate(Verdict.COMPLETELY_REDUCIBLE, t_norm=t_norm, tolerances=cfg)
    if t_norm == 0.0 or np.linalg.norm(state.matrix) == 0.0:
        cert.notes.append("zero state: empty block list, everything residual")
        return cert

    gaps = []
    worklist = [np.eye(k, dtype=np.complex128)]
    max_steps = 4 * k * k + 8
    steps = 0
    while worklist:
        steps += 1
        if steps > max_steps:
            cert.notes.append("worklist did not terminate")
            cert.verdict = Verdict.INCONCLUSIVE
            break
        q = worklist.pop(0)
        r = q.shape[1]
        try:
            spectrum = _spectrum(op, q, t_norm, cfg)
        except ZeroBlock:
            continue
        if spectrum.gap is not None:
            gaps.append(spectrum.gap)
        if spectrum.ambiguous:
            cert.notes.append(
                f"eigenvalue within the gap band on a rank-{r} sub-algebra (lambda={spectrum.lam:.6g})"
            )
        inside, outside, _ = _local_split(spectrum.rho_loc, cfg)
        if inside.shape[1] == r and spectrum.multiplicity == 1:
            w = q @ q.conj().T
            cert.blocks.append(Block(w, invariant_partner(state, w), spectrum.lam, spectrum.gap))
            continue
        if inside.shape[1] == r:
            boundary = _descend(spectrum, cfg)
            inside, outside, _ = _local_split(boundary, cfg)
            if inside.shape[1] in (0, r):
                cert.notes.append(f"PSD-boundary descent did not reduce the support (rank {r})")
                cert.verdict = Verdict.INCONCLUSIVE
                continue
        qa, qb = q @ inside, q @ outside
        off = _offblock_norm(op, qa, qb)
        if off > cfg.tol_zero * t_norm:
            w = qa @ qa.conj().T
            v = invariant_partner(state, w)
            check = certify_pair(state, w, v, cfg)
            cert.witness = Witness(w, v, check, off)
            if check.holds_a and not check.holds_b:
                cert.verdict = Verdict.NOT_COMPLETELY_REDUCIBLE
            else:
                cert.verdict = Verdict.INCONCLUSIVE
                cert.notes.append("off-block coupling found but the pair test did not confirm it")
            cert.gap_report = min(gaps) if gaps else None
            return cert
        worklist.extend([qa, qb])

    cert.blocks.sort(key=_sort_key)
    cert.gap_report = min(gaps) if gaps else None
    cert.residual_norm = residual_norm(op, [b.w for b in cert.blocks])
    if cert.residual_norm > cfg.tol_zero * t_norm:
        cert.notes.append("T does not vanish on the residual subspace")
        cert.verdict = Verdict.INCONCLUSIVE
    if cert.verdict is Verdict.COMPLETELY_REDUCIBLE and any("gap band" in n for n in cert.notes):
        cert.verdict = Verdict.INCONCLUSIVE
    return cert


def residual_norm(op: SuperOperator, projections) -> float:
    """Operator norm of ``T`` on the complement of the block sub-algebras."""
    cols = [subalgebra_embedding(_basis_of(w, DEFAULT_TOL)) for w in projections]
    n = op.rep.shape[1]
    emb = np.hstack(cols) if cols else np.zeros((n, 0))
    comp = np.eye(n) - emb @ emb.T
    return float(np.linalg.norm(op.rep @ comp, 2))


def is_completely_reducible(state: BipartiteState, cfg: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    return decompose(state, cfg).verdict


def verify_certificate(
    state: BipartiteState, cert: ReducibilityCertificate, cfg: ToleranceConfig = DEFAULT_TOL
) -> list[str]:
    """Re-check a certificate from scratch; returns a list of violated properties."""
    problems = []
    op = fg_superop(state)
    t_norm = op.norm
    if cert.verdict is Verdict.NOT_COMPLETELY_REDUCIBLE:
        if cert.witness is None:
            return ["negative verdict without witness"]
        check = certify_pair(state, cert.witness.w, cert.witness.v, cfg)
        if not check.holds_a:
            problems.append("witness violates condition (a)")
        if check.holds_b or check.defect_b <= cfg.tol_zero * np.linalg.norm(state.matrix):
            problems.append("witness satisfies condition (b)")
        return problems
    if cert.verdict is not Verdict.COMPLETELY_REDUCIBLE:
        return problems
    ws = [b.w for b in cert.blocks]
    total = sum(ws, np.zeros((state.k, state.k), dtype=np.complex128))
    if np.linalg.eigvalsh(hermitize(np.eye(state.k) - total))[0] < -1e-8:
        problems.append("block projections exceed the identity")
    for i, a in enumerate(ws):
        for b in ws[i + 1 :]:
            if np.linalg.norm(a @ b) > cfg.tol_zero * 10:
                problems.append("blocks are not orthogonal")
        emb = subalgebra_embedding(_basis_of(a, cfg))
        leak = op.rep @ emb - emb @ (emb.T @ op.rep @ emb)
        if np.linalg.norm(leak, 2) > cfg.tol_zero * max(t_norm, 1e-300):
            problems.append("block sub-algebra is not invariant")
    if residual_norm(op, ws) > cfg.tol_zero * t_norm:
        problems.append("T does not vanish on the residual")
    return problems
