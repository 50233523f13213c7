"""Acceptance gate: one PASS/FAIL line per criterion.

Lines are collected in ``conftest.ACCEPTANCE_LINES`` and printed in the
terminal summary. Running this file directly prints them as well.
"""

import json
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from conftest import ACCEPTANCE_LINES
from crstates.bipartite import (
    flip_operator,
    max_ent_projector,
    max_ent_vector,
    partial_trace,
    partial_transpose,
    realignment,
    shuffle,
    shuffle_sites,
)
from crstates.constructors import (
    classify,
    counterexample_delta,
    diag_pair,
    new_type_state,
    power,
    root,
    support_state,
    werner,
)
from crstates.probe import probe
from crstates.reducibility import Verdict, certify_pair, decompose, verify_certificate
from crstates.state import ToleranceConfig, BipartiteState, is_psd, random_state, random_unitary
from crstates.superoperators import (
    choi,
    f_apply,
    fg_superop,
    from_coords,
    g_apply,
    hermitian_basis,
    to_coords,
    verify_adjoint,
)

CR = Verdict.COMPLETELY_REDUCIBLE
NOT_CR = Verdict.NOT_COMPLETELY_REDUCIBLE


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


# ---------------------------------------------------------------------------
# shared constructions (also used for the determinism check)
# ---------------------------------------------------------------------------


def separable_pure(k, m, seed):
    x = random_unitary(k, seed)[:, 0]
    y = random_unitary(m, seed + 1)[:, 0]
    v = np.kron(x, y)
    return BipartiteState(k, m, np.outer(v, v.conj()))


def random_ppt_2x2(seed):
    rng = np.random.default_rng(seed)
    while True:
        g = random_state(2, 2, 4, int(rng.integers(2**32)))
        if classify(g).ppt:
            return g


def rank_deficient_ppt_2x2(seed):
    # separable rank-2 state: sum of two product projectors
    a, b = separable_pure(2, 2, seed), separable_pure(2, 2, seed + 100)
    return BipartiteState(2, 2, a.matrix + 0.5 * b.matrix)


def cr_witnesses_2x2():
    e1 = BipartiteState(2, 2, np.kron(np.diag([1.0, 0]), np.diag([1.0, 0])))
    return {
        "diag_pair": diag_pair(2),
        "e11": e1,
        "ppt_full": random_ppt_2x2(3),
        "sep_rank2": rank_deficient_ppt_2x2(5),
    }


def anchored_cases():
    return {
        "separable_pure_e11": (cr_witnesses_2x2()["e11"], CR),
        "separable_pure_3x2": (separable_pure(3, 2, 11), CR),
        "maxent_2": (BipartiteState(2, 2, max_ent_projector(2)), NOT_CR),
        "maxent_3": (BipartiteState(3, 3, max_ent_projector(3)), NOT_CR),
        "diag_pair_2": (diag_pair(2), CR),
        "counterexample_2_0.1": (counterexample_delta(2, 0.1).state, NOT_CR),
    }


def closure_cases():
    w = cr_witnesses_2x2()
    names = list(w)
    cases = {}
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            cases[f"sum:{a}+{b}"] = BipartiteState(2, 2, w[a].matrix + w[b].matrix)
    for name, g in w.items():
        cases[f"power3:{name}"] = power(g, 3)
        cases[f"root2:{name}"] = root(g, 2)
        cases[f"support:{name}"] = support_state(g)
    for a, b in (("diag_pair", "ppt_full"), ("sep_rank2", "diag_pair"), ("e11", "sep_rank2")):
        s = shuffle([w[a], w[b]])
        sites = shuffle_sites([w[a], w[b]])
        cases[f"shuffle:{a}*{b}"] = s
        for site in range(4):
            new = sites.without(site)
            mat = partial_trace(s.matrix, sites, site)
            cases[f"ptrace{site}:{a}*{b}"] = BipartiteState(new.left, new.right, mat)
    return cases


def not_cr_shuffle():
    return shuffle([diag_pair(2), BipartiteState(2, 2, max_ent_projector(2))])


def new_type_report():
    return new_type_state([werner(3, 1, 0, -1 / 3), werner(3, 1, -1, 1)])


def probe_report():
    return probe([werner(3, 1, -0.9, 1)], trials=1000, seed=42)


def build_reports() -> str:
    """JSON of every report from criteria 4-8, concatenated."""
    out = {}
    for name, (g, _) in anchored_cases().items():
        out[f"c4:{name}"] = decompose(g).to_dict()
    for name, g in closure_cases().items():
        out[f"c5:{name}"] = decompose(g).to_dict()
    out["c5:not_cr_shuffle"] = decompose(not_cr_shuffle()).to_dict()
    res = new_type_report()
    out["c6:new_type"] = res.to_dict()
    out["c6:factors"] = [decompose(werner(3, 1, 0, -1 / 3)).to_dict(), decompose(werner(3, 1, -1, 1)).to_dict()]
    out["c7"] = type_preservation_counts()
    out["c8"] = probe_report().to_dict()
    return json.dumps(out, sort_keys=True)


def type_preservation_counts():
    ppt_fail = r_fail = 0
    rng = np.random.default_rng(7)
    for i in range(20):
        a, b = random_ppt_2x2(1000 + i), random_ppt_2x2(2000 + i)
        ppt_fail += not classify(shuffle([a, b])).ppt
        ws = []
        for _ in range(2):
            a_ = rng.uniform(0.1, 2.0)
            ws.append(werner(3, a_, rng.uniform(-1, 1) * a_, a_))
        r_fail += not classify(shuffle(ws)).r_invariant
    return {"pairs": 20, "ppt_failures": ppt_fail, "r_invariant_failures": r_fail}


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------


def test_criterion_1_identities():
    worst = 0.0
    for k in (2, 3, 4):
        u, f, ident = max_ent_projector(k), flip_operator(k), np.eye(k * k)
        errs = [
            realignment(u, k) - ident,
            realignment(ident, k) - u,
            realignment(f, k) - f,
            partial_transpose(u, k) - f,
            partial_transpose(f, k) - u,
            (f @ max_ent_vector(k) - max_ent_vector(k))[:, None],
        ]
        worst = max(worst, max(np.abs(e).max() for e in errs))
    rel = 0.0
    for i in range(50):
        k = 2 + i % 3
        g = random_state(k, k, 1 + i % (k * k), 500 + i)
        lhs = partial_transpose(realignment(partial_transpose(g), k), k)
        rhs = g.matrix @ flip_operator(k)
        rel = max(rel, np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))
    record(1, worst <= 1e-13 and rel <= 1e-12, f"identity max_abs_err={worst:.1e}, R(g^G)^G vs gF rel_err={rel:.1e}")


def test_criterion_2_adjointness():
    rng = np.random.default_rng(2)
    worst = 0.0
    for i in range(100):
        k, m = (int(x) for x in rng.integers(1, 5, size=2))
        g = random_state(k, m, int(rng.integers(1, k * m + 1)), 900 + i)
        worst = max(worst, verify_adjoint(g, trials=1, seed=i))
    record(2, worst <= 1e-10, f"max relative adjoint deviation={worst:.1e} over 100 triples")


def _t_by_application(g):
    """T built column by column from F(G(B_b)), independent of the rep formula."""
    basis = hermitian_basis(g.k)
    cols = [np.real(to_coords(f_apply(g, g_apply(g, b)))) for b in basis]
    return np.array(cols).T


def test_criterion_3_cp_self_adjoint():
    cfg = ToleranceConfig(tol_psd=1e-9)
    sym = agree = 0.0
    choi_ok = True
    for i in range(50):
        k, m = 2 + i % 3, 2 + (i // 3) % 3
        g = random_state(k, m, 1 + i % (k * m), 1300 + i)
        t = _t_by_application(g)
        sym = max(sym, np.abs(t - t.T).max() / max(np.abs(t).max(), 1e-300))
        op = fg_superop(g)
        agree = max(agree, np.abs(op.rep - t).max())
        choi_ok &= is_psd(choi(op), cfg)
        assert np.allclose(from_coords(op.rep[:, 0], k), f_apply(g, g_apply(g, hermitian_basis(k)[0])))
    ok = sym <= 1e-10 and agree <= 1e-10 and choi_ok
    record(3, ok, f"rep asymmetry={sym:.1e}, rep vs F(G(.))={agree:.1e}, Choi PSD={choi_ok}")


def test_criterion_4_anchored_decisions():
    details, ok = [], True
    for name, (g, expected) in anchored_cases().items():
        t0 = time.perf_counter()
        cert = decompose(g)
        dt = time.perf_counter() - t0
        good = cert.verdict is expected and dt < 5.0 and verify_certificate(g, cert) == []
        if expected is NOT_CR:
            chk = certify_pair(g, cert.witness.w, cert.witness.v)
            good &= chk.holds_a and not chk.holds_b
        if name == "diag_pair_2":
            good &= len(cert.blocks) == 2
        ok &= good
        details.append(f"{name}={cert.verdict.value}({dt:.2f}s)")
    record(4, ok, ", ".join(details))


def test_criterion_5_theorem_closure():
    t0 = time.perf_counter()
    cases = closure_cases()
    failures = []
    for name, g in cases.items():
        assert g.k * g.m <= 16
        cert = decompose(g)
        if cert.verdict is not CR or verify_certificate(g, cert):
            failures.append(name)
    neg = decompose(not_cr_shuffle())
    if neg.verdict is not NOT_CR:
        failures.append("shuffle with a non-CR factor")
    dt = time.perf_counter() - t0
    ok = not failures and dt < 30.0
    record(5, ok, f"{len(cases)} CR closure cases + 1 negative shuffle, failures={failures or 0}, {dt:.2f}s")


def test_criterion_6_new_type():
    t0 = time.perf_counter()
    res = new_type_report()
    f = res.flags
    factors = [decompose(werner(3, 1, 0, -1 / 3)).verdict, decompose(werner(3, 1, -1, 1)).verdict]
    dt = time.perf_counter() - t0
    ok = (
        f.psd
        and f.ppt is False
        and f.spc is False
        and f.r_invariant is False
        and factors == [CR, CR]
        and f.rank < 81
        and res.state.k == res.state.m == 9
        and dt < 10.0
    )
    record(6, ok, f"flags={f.to_dict()}, factors={[v.value for v in factors]}, {dt:.2f}s")


def test_criterion_7_type_preservation():
    counts = type_preservation_counts()
    ok = counts["ppt_failures"] == 0 and counts["r_invariant_failures"] == 0
    record(7, ok, f"{counts}")


def test_criterion_8_probe():
    t0 = time.perf_counter()
    rep = probe_report()
    dt = time.perf_counter() - t0
    ok = (
        rep.violations == 0
        and rep.min_value >= -1e-9
        and rep.compressed_ppt_failures == 0
        and rep.compressed_r_failures == 0
        and rep.max_r_defect <= 1e-8
        and rep.max_pt_negativity <= 1e-8
        and dt < 60.0
    )
    record(8, ok, f"{rep.summary_line()} compressed PPT/R failures="
           f"{rep.compressed_ppt_failures}/{rep.compressed_r_failures}, {dt:.2f}s")


def test_criterion_9_determinism():
    first = build_reports()
    second = build_reports()
    here = Path(__file__).resolve().parent
    code = f"import sys; sys.path.insert(0, {str(here)!r}); import test_acceptance as t; sys.stdout.write(t.build_reports())"
    third = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True).stdout
    ok = first == second == third
    record(9, ok, f"reports for criteria 4-8 byte-identical across 2 in-process runs and 1 fresh process ({len(first)} bytes)")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
