"""``crstates`` command line.

Reports go to stdout as JSON, diagnostics to stderr. Exit codes: 0 success,
1 negative verdict, 2 usage or I/O error, 3 inconclusive decomposition.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import constructors as cons
from .bipartite import (
    SitesDescriptor,
    partial_trace,
    partial_transpose,
    realignment,
    shuffle_matrices,
)
from .io import dumps, read_projection, read_record, read_state, write_record, write_state
from .probe import probe
from .reducibility import Verdict, certify_pair, decompose
from .state import ToleranceConfig

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3
MAX_DECOMPOSE_DIM = 256


class UsageError(Exception):
    pass


def _cfg(args) -> ToleranceConfig:
    return ToleranceConfig(args.tol_psd, args.tol_zero, args.tol_gap)


def _emit(obj, out=None):
    text = dumps(obj)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)


def cmd_classify(args) -> int:
    rec = read_record(args.path)
    flags = cons.classify(rec.matrix, _cfg(args), rec.k, rec.m)
    _emit(flags.to_dict())
    return EXIT_OK


def cmd_decompose(args) -> int:
    rec = read_record(args.path)
    if rec.k * rec.m > MAX_DECOMPOSE_DIM:
        raise UsageError(
            f"k*m = {rec.k * rec.m} exceeds {MAX_DECOMPOSE_DIM}; the superoperator has k^4 entries"
        )
    cert = decompose(rec.to_state(), _cfg(args))
    _emit(cert.to_dict(), args.json_out)
    return {
        Verdict.COMPLETELY_REDUCIBLE: EXIT_OK,
        Verdict.NOT_COMPLETELY_REDUCIBLE: EXIT_NEGATIVE,
        Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
    }[cert.verdict]


def _projection(path, indices, n, flag):
    if (path is None) == (indices is None):
        raise UsageError(f"give exactly one of --{flag} or --{flag}-indices")
    if path is not None:
        return read_projection(path, n)
    if any(not 0 <= i < n for i in indices):
        raise UsageError(f"--{flag}-indices must lie in [0, {n})")
    diag = np.zeros(n)
    diag[list(indices)] = 1.0
    return np.diag(diag).astype(np.complex128)


def cmd_certify(args) -> int:
    state = read_state(args.path)
    w = _projection(args.w, args.w_indices, state.k, "w")
    v = _projection(args.v, args.v_indices, state.m, "v")
    check = certify_pair(state, w, v, _cfg(args))
    _emit(check.to_dict())
    # (a) without (b) exhibits a failure of complete reducibility
    return EXIT_NEGATIVE if check.holds_a and not check.holds_b else EXIT_OK


def cmd_construct(args) -> int:
    fam = args.family
    need = {
        "werner": ("k", "a", "b", "c"),
        "counterexample": ("k", "eps"),
        "maxent": ("k",),
        "diag-pair": ("k",),
        "random": ("k",),
    }[fam]
    missing = [n for n in need if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{fam} needs " + ", ".join("--" + n for n in missing))
    cfg = _cfg(args)
    if fam == "werner":
        state = cons.werner(args.k, args.a, args.b, args.c, cfg)
    elif fam == "counterexample":
        res = cons.counterexample_delta(args.k, args.eps, args.split)
        print(f"G smallest singular value: {res.g_min_singular_value!r}", file=sys.stderr)
        state = res.state
    elif fam == "maxent":
        state = cons.maxent(args.k)
    elif fam == "diag-pair":
        state = cons.diag_pair(args.k, args.split)
    else:
        m = args.m if args.m is not None else args.k
        state = cons.random(args.k, m, args.rank, args.seed)
    write_state(args.output, state)
    return EXIT_OK


def cmd_shuffle(args) -> int:
    recs = [read_record(p) for p in args.paths]
    mat = shuffle_matrices([r.matrix for r in recs], [(r.k, r.m) for r in recs])
    sites = SitesDescriptor(
        tuple(r.k for r in recs) + tuple(r.m for r in recs), len(recs)
    )
    write_record(args.output, sites.left, sites.right, mat, sites)
    return EXIT_OK


def cmd_transform(args) -> int:
    rec = read_record(args.path)
    op, arg = args.op, args.arg
    cfg = _cfg(args)
    if op in ("power", "root", "ptrace") and arg is None:
        raise UsageError(f"{op} needs an integer argument")
    if op not in ("power", "root", "ptrace") and arg is not None:
        raise UsageError(f"{op} takes no argument")
    sites = rec.sites
    if op in ("power", "root", "support"):
        state = rec.to_state()
        if op == "power":
            state = cons.power(state, arg, cfg)
        elif op == "root":
            state = cons.root(state, arg, cfg)
        else:
            state = cons.support_state(state, cfg)
        k, m, mat = state.k, state.m, state.matrix
    elif op == "ptrace":
        desc = rec.descriptor
        new = desc.without(arg)
        mat = partial_trace(rec.matrix, desc, arg)
        k, m, sites = new.left, new.right, new
    elif op == "pt":
        k, m, mat = rec.k, rec.m, partial_transpose(rec.matrix, rec.k, rec.m)
    else:
        k, m, mat = rec.k, rec.m, realignment(rec.matrix, rec.k, rec.m)
    write_record(args.output, k, m, mat, sites)
    return EXIT_OK


def cmd_probe(args) -> int:
    states = [read_state(p) for p in args.paths]
    seed = args.probe_seed if args.probe_seed is not None else args.seed
    report = probe(
        states, args.trials, seed, _cfg(args), require_invariant=not args.allow_non_invariant
    )
    _emit(report.to_dict(), args.json_out)
    print(report.summary_line(), file=sys.stderr)
    return EXIT_OK if report.violations == 0 else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    defaults = ToleranceConfig()
    p = argparse.ArgumentParser(prog="crstates", description="Completely reducible bipartite states.")
    p.add_argument("--tol-psd", type=float, default=defaults.tol_psd)
    p.add_argument("--tol-zero", type=float, default=defaults.tol_zero)
    p.add_argument("--tol-gap", type=float, default=defaults.tol_gap)
    p.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("classify", help="PSD/PPT/SPC/R-invariance flags")
    s.add_argument("path")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("decompose", help="decide complete reducibility")
    s.add_argument("path")
    s.add_argument("--json-out")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("certify", help="compare the pair conditions for (W, V)")
    s.add_argument("path")
    s.add_argument("--w", help="JSON matrix file for W")
    s.add_argument("--v", help="JSON matrix file for V")
    s.add_argument("--w-indices", type=int, nargs="+", help="W as a coordinate projection")
    s.add_argument("--v-indices", type=int, nargs="+", help="V as a coordinate projection")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("construct", help="write a state from a named family")
    s.add_argument("family", choices=["werner", "counterexample", "maxent", "diag-pair", "random"])
    s.add_argument("--k", type=int)
    s.add_argument("--m", type=int)
    s.add_argument("--a", type=float)
    s.add_argument("--b", type=float)
    s.add_argument("--c", type=float)
    s.add_argument("--eps", type=float)
    s.add_argument("--split", type=int, default=1)
    s.add_argument("--rank", type=int)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("shuffle", help="shuffle of several state files")
    s.add_argument("paths", nargs="+")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_shuffle)

    s = sub.add_parser("transform", help="power n | root n | support | ptrace site | pt | realign")
    s.add_argument("path")
    s.add_argument("op", choices=["power", "root", "support", "ptrace", "pt", "realign"])
    s.add_argument("arg", type=int, nargs="?")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("probe", help="rank-two-span probe of a shuffle of partial transposes")
    s.add_argument("paths", nargs="+")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--seed", dest="probe_seed", type=int)
    s.add_argument("--allow-non-invariant", action="store_true")
    s.add_argument("--json-out")
    s.set_defaults(func=cmd_probe)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"crstates: {exc}", file=sys.stderr)
    except (ValueError, OSError) as exc:
        print(f"crstates {args.command}: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
