"""Command-line front end.

Results go to standard output as tab-separated tables (a header row, then
one row per record, with a blank line between tables), preceded by ``#``
lines describing the run.
Diagnostics go to standard error.  Exit status is 0 on success, 1 on a
domain error or a failed check, and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import math
import os
import shlex
import sys
import time
from fractions import Fraction
from typing import Callable, List, Optional, Sequence

from . import __version__
from .comptree import TreeEvaluator
from .counting import DepthPolicy, approx_count, exact_count
from .errors import HypercountError

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


# ---------------------------------------------------------------------------
# output helpers

class Output:
    """Collects the run header and writes tables to a stream."""

    def __init__(self, argv: Sequence[str], seed: Optional[int], stream=None):
        self.stream = stream or sys.stdout
        self.argv = list(argv)
        self.seed = seed
        self.digest = "-"
        self.t0 = time.perf_counter()
        self._header_done = False
        self._tables = 0

    def digest_input(self, data: bytes):
        self.digest = hashlib.sha256(data).hexdigest()[:16]

    def _header(self):
        if self._header_done:
            return
        self._header_done = True
        self.stream.write(f"# command: hypercount {shlex.join(self.argv)}\n")
        self.stream.write(f"# input_sha256: {self.digest}\n")
        self.stream.write(f"# seed: {self.seed if self.seed is not None else '-'}\n")

    def table(self, rows: Sequence[dict]):
        self._header()
        if not rows:
            return
        if self._tables:
            self.stream.write("\n")
        self._tables += 1
        w = csv.DictWriter(self.stream, fieldnames=list(rows[0]), delimiter="\t",
                           lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(v) for k, v in r.items()})

    def finish(self):
        self._header()
        self.stream.write(f"# wall_time_ms: {(time.perf_counter() - self.t0) * 1e3:.1f}\n")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def _note(msg: str):
    print(msg, file=sys.stderr)


def _read_input(path: str, out: Output) -> str:
    data = sys.stdin.buffer.read() if path == "-" else open(path, "rb").read()
    out.digest_input(data)
    return data.decode("utf-8")


def _figure_dir(args) -> Optional[str]:
    return getattr(args, "figures", None)


def _note_figure(path: str):
    _note(f"figure written: {path}")


# ---------------------------------------------------------------------------
# subcommands

def cmd_count(args, out: Output) -> int:
    from .formula import parse_instance

    f = parse_instance(_read_input(args.input, out))
    if args.exact:
        t0 = time.perf_counter()
        z = exact_count(f, threads=args.threads)
        out.table([{"count": z, "n": f.n, "m": f.m, "method": "enumeration",
                    "wall_time_ms": round((time.perf_counter() - t0) * 1e3, 3)}])
        return EXIT_OK

    def trace(depth, d, ws, L, value):
        print(f"{depth}\t{d}\t{','.join(map(str, ws))}\t{L}\t{value!r}", file=sys.stderr)
    policy = (DepthPolicy.proof_depth(args.proof_depth, args.budget)
              if args.proof_depth is not None else DepthPolicy(budget=args.budget))
    ev = TreeEvaluator(budget=args.budget, trace=trace if args.trace else None)
    est = approx_count(f, args.eps, policy, ev)
    out.table([est.as_record()])
    if _figure_dir(args):
        from . import plots
        exact_log2 = None
        if f.n <= 24:
            exact_log2 = math.log2(exact_count(f, threads=args.threads))
        _note_figure(plots.depth_convergence(est.levels, exact_log2, args.figures))
    return EXIT_OK


def cmd_uniqueness(args, out: Output) -> int:
    from .uniqueness import TreeParams, critical_delta, fixed_point, level_gap

    if args.critical is not None:
        k = args.critical
        dc = critical_delta(k)
        rows = []
        for D in (dc, dc + 1):
            if D < 2:
                continue
            r = fixed_point(TreeParams(k, D))
            rows.append({"k": k, "Delta": D, "x": r.x, "fprime_abs": r.fprime_abs,
                         "classification": r.classification.value})
        out.table([{"k": k, "critical_delta": dc, "scaled": dc * k / 2 ** k}])
        out.table(rows)
        if _figure_dir(args):
            from . import plots
            Ds = range(2, max(dc * 2, 8))
            _note_figure(plots.derivative_vs_degree(
                [(D, fixed_point(TreeParams(k, D)).fprime_abs) for D in Ds], k, args.figures))
        return EXIT_OK

    if args.k is None or args.delta is None:
        raise UsageError("uniqueness needs --k and --delta, or --critical K")
    tp = TreeParams(args.k, args.delta)
    if args.gap is not None:
        lg = level_gap(tp, args.gap)
        out.table([{"k": tp.k, "Delta": tp.Delta, "levels": args.gap,
                    "p_last": lg.p[-1], "p_prev": lg.p[-2], "final_gap": lg.final_gap}])
        if _figure_dir(args):
            from . import plots
            _note_figure(plots.level_gaps(lg.gaps, f"k={tp.k}, Delta={tp.Delta}", args.figures))
        return EXIT_OK
    r = fixed_point(tp, args.tol)
    out.table([{"k": tp.k, "Delta": tp.Delta, "x": r.x, "fprime_abs": r.fprime_abs,
                "classification": r.classification.value, "residual": r.residual}])
    return EXIT_OK


def cmd_kappa(args, out: Output) -> int:
    from .decay import kappa_star_max_search

    rep = kappa_star_max_search(args.k, args.delta, args.dmax, args.wcap, args.grid,
                                args.samples, args.seed, d_min=args.dmin,
                                extra_vectors=args.extra, threads=args.threads)
    regime = "Covered36" if (args.k, args.delta) == (3, 6) else (
        "CoveredLarge" if args.k >= args.delta >= 200 else "other")
    out.table([{
        "regime": regime, "k": rep.k, "Delta": rep.Delta,
        "domain": f"d in [{args.dmin},{args.dmax}], w_i <= {args.wcap}, r in [{rep.lower:.3g},1]",
        "bound": rep.bound, "max_found": rep.max_found,
        "pass": "pass" if rep.passed else "FAIL",
        "argmax_w": ",".join(map(str, rep.argmax_w)),
        "argmax_r": ",".join(f"{x:.6g}" for x in rep.argmax_r),
        "vectors": rep.vectors, "grid_size": rep.evaluations,
        "wall_time_ms": round(rep.wall_time_ms, 1),
    }])
    out.table([{"d": d, "max_found": v} for d, v in sorted(rep.per_d.items())])
    if _figure_dir(args):
        from . import plots
        _note_figure(plots.kappa_by_d(rep.per_d, rep.bound, args.figures))
    return EXIT_OK if rep.passed else EXIT_DOMAIN


def cmd_verify(args, out: Output) -> int:
    from .decay import inequality_check, names

    if not args.all and not args.name:
        raise UsageError("verify needs --name NAME or --all")
    todo = names() if args.all else args.name
    results = [inequality_check(n, args.grid, refine=args.refine, seed=args.seed) for n in todo]
    out.table([r.as_record() for r in results])
    if _figure_dir(args):
        from . import plots
        _note_figure(plots.registry_slack([r.name for r in results], [r.slack for r in results],
                                          [r.passed for r in results], args.figures))
    failed = [r.name for r in results if not r.passed]
    if failed:
        _note(f"failed checks: {', '.join(failed)}")
    return EXIT_OK if not failed else EXIT_DOMAIN


def cmd_reduce(args, out: Output) -> int:
    from .counting import hardcore_partition, twospin_partition
    from .formula import serialize_mcnf
    from .graphs import parse_graph, serialize_graph
    from .reductions import (DOMSET_GADGET_PARAMS, domset_gadget_multiplier,
                             domset_hardness_gadget, domset_to_hyperis, hardcore_gadget)

    G = parse_graph(_read_input(args.input, out))
    record = {"construction": args.construction, "source_n": G.n, "source_m": G.m}
    if args.construction == "domset-to-hyperis":
        H = domset_to_hyperis(G)
        text = serialize_mcnf(H, kind="hygraph")
        record.update({"identity": "Z_H = #DomSets(G)", "multiplier": 1,
                       "n": H.n, "m": H.m})
    elif args.construction == "hardcore":
        if args.k is None:
            raise UsageError("reduce hardcore needs --k")
        gad = hardcore_gadget(G, args.k)
        text = serialize_mcnf(gad.hypergraph, kind="hygraph")
        record.update({"identity": "Z_H = multiplier * Z_G(lambda)", "multiplier": gad.multiplier,
                       "lambda": gad.lam, "n": gad.hypergraph.n, "m": gad.hypergraph.m})
        if args.check:
            record["check"] = exact_count(gad.hypergraph) == gad.multiplier * hardcore_partition(G, gad.lam)
    else:
        G2 = domset_hardness_gadget(G)
        text = serialize_graph(G2)
        beta, gamma, lam = DOMSET_GADGET_PARAMS
        record.update({"identity": "#DomSets(G') = multiplier * Z_G(1/2,1,1/2)",
                       "multiplier": domset_gadget_multiplier(G), "n": G2.n, "m": G2.m})
        if args.check:
            from .counting import domsets_bruteforce
            record["check"] = (domsets_bruteforce(G2) ==
                               domset_gadget_multiplier(G) * twospin_partition(G, beta, gamma, lam))
    if args.check and args.construction == "domset-to-hyperis":
        from .counting import domsets_bruteforce
        record["check"] = exact_count(H) == domsets_bruteforce(G)

    with open(args.output, "w") as fh:
        fh.write(text)
    with open(args.output + ".record.tsv", "w") as fh:
        Output(out.argv, out.seed, fh).table([record])
    record["output"] = args.output
    out.table([record])
    return EXIT_OK if record.get("check", True) else EXIT_DOMAIN


def _bench_rows(threads: int) -> List[dict]:
    """Fixed corpus: counting, uniqueness and registry workloads."""
    import random

    from .decay import inequality_check
    from .formula import random_formula
    from .graphs import petersen
    from .reductions import count_regdomset
    from .uniqueness import critical_delta

    rows = []

    def timed(label: str, fn: Callable[[], object]):
        t0 = time.perf_counter()
        val = fn()
        rows.append({"task": label, "result": val,
                     "wall_time_ms": round((time.perf_counter() - t0) * 1e3, 3)})

    rng = random.Random(2024)
    for n in (12, 16, 20):
        f = random_formula(n, n, rng, min_arity=3, max_arity=4, max_degree=6)
        timed(f"approx_count n={n}", lambda f=f: round(approx_count(f, 0.05).value, 6))
        timed(f"exact_count n={n}", lambda f=f: exact_count(f, threads=threads))
    timed("count_regdomset petersen", lambda: round(count_regdomset(petersen(), 0.05).value, 6))
    timed("critical_delta k=6", lambda: critical_delta(6))
    timed("critical_delta k=16", lambda: critical_delta(16))
    timed("verify psi1plusr", lambda: inequality_check("psi1plusr").passed)
    timed("verify bootphase1", lambda: inequality_check("bootphase1").passed)
    return rows


def cmd_bench(args, out: Output) -> int:
    rows = _bench_rows(args.threads)
    out.table(rows)
    if _figure_dir(args):
        from . import plots
        _note_figure(plots.bench_times([r["task"] for r in rows],
                                       [max(r["wall_time_ms"], 1e-3) for r in rows], args.figures))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

class UsageError(Exception):
    pass


def _positive_float(s: str) -> float:
    try:
        return float(Fraction(s))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {s!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hypercount",
        description="Approximate counting of hypergraph independent sets and the supporting analysis.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker cap for parallel loops (default: available cores)")
    common.add_argument("--figures", metavar="DIR",
                        help="also render matplotlib figures into DIR")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    c = sub.add_parser("count", parents=[common], help="count satisfying assignments of an MCNF/hypergraph file",
                       description="Input formats: 'p mcnf n m' or 'p hygraph n m' headers, "
                                   "one clause per line terminated by 0.")
    c.add_argument("--input", required=True, help="instance file, or - for stdin")
    c.add_argument("--eps", type=_positive_float, default=0.05, help="target relative error")
    c.add_argument("--exact", action="store_true", help="brute-force enumeration instead")
    c.add_argument("--proof-depth", type=int, metavar="L", help="fixed truncation depth")
    c.add_argument("--budget", type=int, metavar="NODES", help="node expansion cap")
    c.add_argument("--seed", type=int, default=0, help="recorded in the run header")
    c.add_argument("--trace", action="store_true", help="one stderr line per tree node")
    c.set_defaults(func=cmd_count)

    u = sub.add_parser("uniqueness", parents=[common], help="fixed point on the k-uniform hypertree")
    u.add_argument("--k", type=int)
    u.add_argument("--delta", type=int)
    u.add_argument("--critical", type=int, metavar="K", help="report the critical degree for arity K")
    u.add_argument("--gap", type=int, metavar="LEVELS", help="iterate LEVELS levels from p_0 = 1")
    u.add_argument("--tol", type=float, default=1e-12)
    u.set_defaults(func=cmd_uniqueness, seed=None)

    k = sub.add_parser("kappa", parents=[common], help="numeric maximum of the decay rate kappa*")
    k.add_argument("--k", type=int, default=3)
    k.add_argument("--delta", type=int, default=6)
    k.add_argument("--dmax", type=int, default=5)
    k.add_argument("--dmin", type=int, default=1)
    k.add_argument("--wcap", type=int, default=4)
    k.add_argument("--grid", type=int, default=33)
    k.add_argument("--samples", type=int, default=2000)
    k.add_argument("--extra", type=int, default=8, help="random larger vectors per d")
    k.add_argument("--seed", type=int, default=0)
    k.set_defaults(func=cmd_kappa)

    v = sub.add_parser("verify", parents=[common], help="numeric spot checks of the inequality registry")
    v.add_argument("--name", action="append", metavar="NAME")
    v.add_argument("--all", action="store_true")
    v.add_argument("--grid", type=int, default=401)
    v.add_argument("--refine", type=int, default=2000, help="random points per case")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("reduce", parents=[common], help="gadget constructions on a 'p graph' file")
    r.add_argument("construction", choices=["domset-to-hyperis", "hardcore", "domset-gadget"])
    r.add_argument("--input", required=True)
    r.add_argument("--output", required=True, help="instance path; the record goes to OUTPUT.record.tsv")
    r.add_argument("--k", type=int)
    r.add_argument("--check", action="store_true", help="verify the identity by brute force")
    r.set_defaults(func=cmd_reduce, seed=None)

    b = sub.add_parser("bench", parents=[common], help="timing table over a fixed corpus")
    b.set_defaults(func=cmd_bench, seed=None)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    out = Output(argv, getattr(args, "seed", None))
    try:
        code = args.func(args, out)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        _note(f"error: {e}")
        return EXIT_USAGE
    except (HypercountError, OSError) as e:
        _note(f"error: {type(e).__name__}: {e}")
        return EXIT_DOMAIN
    out.finish()
    return code


if __name__ == "__main__":
    sys.exit(main())
