"""Randomized search for negative rank-two-span values on shuffles of partial transposes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .bipartite import partial_transpose, realignment, shuffle, shuffle_matrices
from .constructors import classify
from .state import (
    DEFAULT_TOL,
    BipartiteState,
    DimensionError,
    ParameterError,
    PreconditionError,
    ToleranceConfig,
    as_matrix,
    hermitize,
)

MAX_PROBE_DIM = 128
COMPRESSED_TOL = 1e-8


@dataclass
class ProbeReport:
    trials: int
    seed: int
    min_value: float
    violations: int
    compressed_ppt_failures: int
    compressed_r_failures: int
    max_r_defect: float
    max_pt_negativity: float
    per_trial: list[dict] = field(default_factory=list)

    def summary_line(self) -> str:
        return f"min={self.min_value!r} violations={self.violations} trials={self.trials} seed={self.seed}"

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "min_value": self.min_value,
            "violations": self.violations,
            "compressed_ppt_failures": self.compressed_ppt_failures,
            "compressed_r_failures": self.compressed_r_failures,
            "max_r_defect": self.max_r_defect,
            "max_pt_negativity": self.max_pt_negativity,
            "per_trial": list(self.per_trial),
        }


def _trial_draw(seed, trial, K):
    rng = np.random.default_rng([seed, trial])
    a = rng.standard_normal((K, 2)) + 1j * rng.standard_normal((K, 2))
    q, _ = np.linalg.qr(a)
    w = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    return q, w / np.linalg.norm(w)


def probe(
    states,
    trials: int = 1000,
    seed: int = 0,
    cfg: ToleranceConfig = DEFAULT_TOL,
    require_invariant: bool = True,
    sample: int = 10,
) -> ProbeReport:
    """Sample ``tr(Sigma v v^*)`` for ``v = (A (x) A) w``, ``A`` a random K x 2 isometry.

    ``Sigma`` is the shuffle of the partial transposes of ``states``. Each
    trial also compresses the shuffle of the states themselves to 2 (x) 2 and
    records whether the result is PPT and realignment-invariant. Trial ``t``
    draws from ``default_rng([seed, t])``, so runs are reproducible and
    independent of trial order.
    """
    states = list(states)
    if not states:
        raise ParameterError("probe needs at least one state")
    if trials < 1:
        raise ParameterError(f"trials must be positive, got {trials}")
    for idx, g in enumerate(states):
        if g.k != g.m or g.k < 2:
            raise DimensionError(f"input {idx} must be square with k >= 2, got ({g.k}, {g.m})")
        if require_invariant and not classify(g, cfg).r_invariant:
            raise PreconditionError(f"input {idx} is not invariant under realignment")
    K = int(np.prod([g.k for g in states]))
    if K > MAX_PROBE_DIM:
        raise ParameterError(f"shuffle dimension {K} exceeds the probe cap {MAX_PROBE_DIM}")

    sigma = shuffle_matrices(
        [partial_transpose(g) for g in states], [(g.k, g.m) for g in states]
    )
    big = shuffle(states).matrix

    frames = np.empty((trials, K, 2), dtype=np.complex128)
    vecs = np.empty((trials, K * K), dtype=np.complex128)
    for t in range(trials):
        a, w = _trial_draw(seed, t, K)
        frames[t] = a
        vecs[t] = (a @ w @ a.T).reshape(-1)
    kern = _kernels.ACTIVE
    values = kern.quadratic_forms(np.ascontiguousarray(sigma), vecs)
    compressed = kern.compress_batch(np.ascontiguousarray(big), frames)

    ppt_fail = r_fail = 0
    max_r = max_neg = 0.0
    per_trial = []
    for t in range(trials):
        sig = hermitize(compressed[t])
        scale = np.linalg.norm(sig)
        r_defect = float(np.linalg.norm(realignment(sig, 2) - sig) / scale) if scale > 0 else 0.0
        evals = np.linalg.eigvalsh(hermitize(partial_transpose(sig, 2, 2)))
        top = max(abs(evals[-1]), np.finfo(float).tiny)
        negativity = float(max(-evals[0], 0.0) / top)
        ppt = negativity <= COMPRESSED_TOL
        r_inv = r_defect <= COMPRESSED_TOL
        ppt_fail += not ppt
        r_fail += not r_inv
        max_r = max(max_r, r_defect)
        max_neg = max(max_neg, negativity)
        if t < sample:
            per_trial.append(
                {
                    "trial": t,
                    "value": float(values[t]),
                    "compressed_ppt": bool(ppt),
                    "compressed_r_invariant": bool(r_inv),
                    "rng_seed": [int(seed), t],
                }
            )

    return ProbeReport(
        trials=int(trials),
        seed=int(seed),
        min_value=float(values.min()),
        violations=int(np.sum(values < -cfg.tol_zero)),
        compressed_ppt_failures=int(ppt_fail),
        compressed_r_failures=int(r_fail),
        max_r_defect=max_r,
        max_pt_negativity=max_neg,
        per_trial=per_trial,
    )


def rank2_span_value(sigma, a, b, c, d, tol: float = 1e-10) -> float:
    """``tr(Sigma v v^*)`` for ``v = a (x) b + c (x) d`` with ``dim span{a, b, c, d} <= 2``."""
    mat = sigma.matrix if isinstance(sigma, BipartiteState) else as_matrix(sigma)
    vs = [np.asarray(x, dtype=np.complex128).reshape(-1) for x in (a, b, c, d)]
    K = vs[0].size
    if any(x.size != K for x in vs) or mat.shape != (K * K, K * K):
        raise DimensionError(f"vectors of length {K} need a {K * K} x {K * K} matrix")
    stack = np.stack(vs, axis=1)
    s = np.linalg.svd(stack, compute_uv=False)
    if s.size > 2 and s[2] > tol * max(s[0], 1.0):
        raise ParameterError("a, b, c, d must span a space of dimension at most 2")
    v = np.kron(vs[0], vs[1]) + np.kron(vs[2], vs[3])
    if np.linalg.norm(v) == 0:
        raise ParameterError("v = a (x) b + c (x) d is zero")
    return float(np.real(v.conj() @ mat @ v))
