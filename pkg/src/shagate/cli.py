"""Command-line front end: ``shagate <subcommand> ...``.

Exit codes: 0 success, 1 error, 2 not applicable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from . import __version__, cassels, f2linalg as f2, genus, selmer, suites
from .classgroup import class_group, h2i_ranks
from .classify import ALL18, NA, T1, auto_decompose, classify, family_tag, in_family
from .errors import PreconditionError, ShagateError
from .genus import DEFAULT_BUDGET
from .ntheory import factor_squarefree, is_squarefree

SCHEMA_VERSION = 1
EXIT_OK, EXIT_ERROR, EXIT_NA = 0, 1, 2
SCAN_FIELDS = ["schema_version", "n", "family", "s2", "h4", "h8", "d", "k", "decomposition",
               "theorem", "verdict", "error"]


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if v < 1:
        raise argparse.ArgumentTypeError(f"{v} is not positive")
    return v


def _divisors(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of integers")


def _emit(doc, out) -> None:
    json.dump(doc, out, indent=2, sort_keys=False)
    out.write("\n")


def _bits(m: f2.BitMatrix) -> list[list[int]]:
    return m.to_lists()


# subcommands

def cmd_classify(args, out) -> int:
    res = classify(args.n, args.decomposition, args.budget, args.oracle)
    doc = {"schema_version": SCHEMA_VERSION, **res.to_dict()}
    _emit(doc, out)
    return EXIT_NA if res.verdict == NA else EXIT_OK


def _scan_one(job: tuple[int, int, bool, bool]) -> dict:
    n, budget, oracle, timing = job
    start = time.perf_counter()
    rec = {"schema_version": SCHEMA_VERSION, "n": n}
    try:
        res = classify(n, budget=budget, oracle=oracle)
        rec.update(family=res.family, s2=res.s2, h4=res.h4, h8=res.h8, d=res.d, k=res.k,
                   decomposition=list(res.decomposition) if res.decomposition else None,
                   theorem=res.theorem, verdict=res.verdict, error=None)
    except ShagateError as e:
        rec.update(family=None, s2=None, h4=None, h8=None, d=None, k=None, decomposition=None,
                   theorem=None, verdict="error", error=str(e))
    if timing:
        rec["seconds"] = round(time.perf_counter() - start, 6)
    return rec


def scan_candidates(lo: int, hi: int, wanted: str) -> list[int]:
    out = []
    for n in range(max(1, lo), hi + 1):
        if not is_squarefree(n):
            continue
        if wanted == "any" or in_family(family_tag(factor_squarefree(n)), wanted):
            out.append(n)
    return out


def scan(lo: int, hi: int, wanted: str = "any", jobs: int = 1, budget: int = DEFAULT_BUDGET,
         oracle: bool = False, timing: bool = False) -> list[dict]:
    """Classify every square-free n in [lo, hi] passing the family filter, sorted by n."""
    if lo > hi:
        raise PreconditionError(f"empty range {lo}..{hi}")
    work = [(n, budget, oracle, timing) for n in scan_candidates(lo, hi, wanted)]
    if jobs <= 1 or len(work) < 2:
        recs = [_scan_one(w) for w in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            recs = list(ex.map(_scan_one, work, chunksize=max(1, len(work) // (8 * jobs))))
    recs.sort(key=lambda r: r["n"])
    return recs


def format_records(recs: Sequence[dict], fmt: str, timing: bool = False) -> str:
    buf = io.StringIO()
    if fmt == "jsonl":
        for r in recs:
            buf.write(json.dumps(r, separators=(",", ":")) + "\n")
    else:
        fields = SCAN_FIELDS + (["seconds"] if timing else [])
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in recs:
            row = dict(r)
            if row.get("decomposition"):
                row["decomposition"] = ";".join(map(str, row["decomposition"]))
            w.writerow({f: "" if row.get(f) is None else row[f] for f in fields})
    return buf.getvalue()


def cmd_scan(args, out) -> int:
    recs = scan(args.lo, args.hi, args.filter, args.jobs, args.budget, args.oracle, args.timing)
    out.write(format_records(recs, args.format, args.timing))
    return EXIT_ERROR if any(r["verdict"] == "error" for r in recs) else EXIT_OK


def cmd_selmer(args, out) -> int:
    n = factor_squarefree(args.n)
    if n.value % 2 == 0:
        raise PreconditionError(f"n = {n.value} must be odd")
    m = selmer.monsky_matrix(n)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "n": n.value,
        "primes": list(n.primes),
        "monsky_matrix": _bits(m),
        "rank": f2.rank(m),
        "s2": selmer.s2(n),
        "kernel_basis": [v.to_list() for v in f2.kernel_basis(m)],
    }
    if n.k <= selmer.MAX_OMEGA:
        doc["selmer_group"] = [list(t.as_tuple()) for t in selmer.enumerate_selmer(n)]
    try:
        b = selmer.selmer_basis_h4_1(n)
        doc["basis"] = {"first": list(b.first.as_tuple()), "second": list(b.second.as_tuple()),
                        "case": b.case, "d": b.d, "x": list(b.x)}
    except PreconditionError:
        pass
    _emit(doc, out)
    return EXIT_OK


def cmd_genus(args, out) -> int:
    n = factor_squarefree(args.n)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "n": n.value,
        "redei_matrix": _bits(genus.redei_matrix(n)),
        "h4": genus.h4(n),
        "norm_divisors": [e.value for e in genus.norm_divisors(n)],
    }
    if n.value > 1 and n.all_primes_mod(4, 1):
        doc["h8"] = genus.h8_genus(n, budget=args.budget)
        if n.mod8 == 1 and doc["h4"] == 1:
            doc["d"] = genus.d_of_n(n)
    if args.decomposition:
        hr = genus.higher_redei(n, args.decomposition, args.budget)
        doc["decomposition"] = list(hr.decomposition)
        doc["r_star"] = _bits(hr.matrix)
        doc["c_values"] = list(hr.c_values)
        doc["h8_r_star"] = hr.h8
    _emit(doc, out)
    return EXIT_OK


def cmd_pairing(args, out) -> int:
    n = factor_squarefree(args.n)
    ds = args.decomposition
    if not ds:
        options = auto_decompose(n)
        if not options:
            raise PreconditionError(f"no admissible decomposition of {n.value}")
        ds = options[-1]
    sols = cassels.build_cassels_solutions(n, ds, args.budget)
    table = cassels.pairing_table(n, ds, sols, args.budget)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "n": n.value,
        "decomposition": list(ds),
        "solutions": [{"d": d, "c": list(sc.triple), "gamma": list(sg.triple),
                       "cbar": list(sb.triple)}
                      for d, sc, sg, sb in zip(ds, sols.sol_c, sols.sol_gamma, sols.sol_cbar)],
        "labels": table.labels,
        "a_star": _bits(table.a_star),
        "psi": _bits(table.psi),
        "d_star": list(table.d_star),
        "delta": list(table.delta),
        "pairing_matrix": _bits(table.matrix),
        "block_formula_mismatches": [list(x) for x in table.block_mismatches],
        "nondegenerate": table.nondegenerate,
        "mainthm2": cassels.check_mainthm2(n, ds, args.budget),
    }
    if len(ds) == 2:
        doc["cor2"] = cassels.cor2_check(n, ds[0], ds[1], args.budget)
    _emit(doc, out)
    return EXIT_OK


def cmd_classgroup(args, out) -> int:
    g = class_group(args.n)
    h2, h4, h8 = h2i_ranks(g)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "n": args.n,
        "discriminant": g.disc,
        "h": g.h,
        "invariant_factors": list(g.invariant_factors),
        "h2": h2, "h4": h4, "h8": h8,
    }
    if g.h <= 64:
        doc["forms"] = [[f.a, f.b, f.c] for f in g.elements]
    _emit(doc, out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    fn = suites.SUITES[args.suite]
    report = fn(args.bound) if args.bound is not None and args.suite != "remark1" else fn()
    _emit(report, out)
    return EXIT_OK if report["ok"] else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shagate", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, decomposition=False):
        sp.add_argument("--budget", type=_positive, default=DEFAULT_BUDGET,
                        help="largest c tried by the norm-equation solvers")
        if decomposition:
            sp.add_argument("--decomposition", type=_divisors, default=None,
                            help="comma-separated blocks d1,d2,...")

    sp = sub.add_parser("classify", help="classify one n")
    sp.add_argument("n", type=_positive)
    sp.add_argument("--oracle", action="store_true", help="cross-check ranks with the class group")
    common(sp, True)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("scan", help="classify a range of n")
    sp.add_argument("--from", dest="lo", type=_positive, required=True)
    sp.add_argument("--to", dest="hi", type=_positive, required=True)
    sp.add_argument("--filter", choices=[T1, ALL18, "any"], default="any")
    sp.add_argument("--jobs", type=_positive, default=1)
    sp.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    sp.add_argument("--oracle", action="store_true")
    sp.add_argument("--timing", action="store_true", help="add per-n wall time (breaks byte-identity)")
    common(sp)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("selmer", help="Monsky matrix and pure 2-Selmer group")
    sp.add_argument("n", type=_positive)
    sp.set_defaults(func=cmd_selmer)

    sp = sub.add_parser("genus", help="Redei data, 4-rank and 8-rank")
    sp.add_argument("n", type=_positive)
    common(sp, True)
    sp.set_defaults(func=cmd_genus)

    sp = sub.add_parser("pairing", help="Cassels pairing matrix for a decomposition")
    sp.add_argument("n", type=_positive)
    common(sp, True)
    sp.set_defaults(func=cmd_pairing)

    sp = sub.add_parser("classgroup", help="class group of Q(sqrt(-n)) from reduced forms")
    sp.add_argument("n", type=_positive)
    sp.set_defaults(func=cmd_classgroup)

    sp = sub.add_parser("verify", help="run a cross-check suite")
    sp.add_argument("suite", choices=sorted(suites.SUITES))
    sp.add_argument("--bound", type=_positive, default=None)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_OK
    try:
        return args.func(args, out)
    except (ShagateError, ValueError, ArithmeticError) as e:
        print(f"shagate: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
