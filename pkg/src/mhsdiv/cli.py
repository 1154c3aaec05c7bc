"""mhsdiv command line.

    mhsdiv eval    --s 2 --n 26 [--p 7 --k 2]
    mhsdiv jset    --s 3 --p 37 --max-segment 3
    mhsdiv tau     --s 2,2 --p 13 --e 8
    mhsdiv table   --s 2 --pmax 200
    mhsdiv density --s 2 --X 3000 [--workers 4] [--cache store.jsonl]

Exit status: 0 success, 1 usage or arithmetic error, 2 inconclusive.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

from . import arith
from .criterion import DEFAULT_BUDGET, TauCertificate, find_tau
from .errors import MHSError
from .jsets import ReservedSetRule, enumerate_jset, extract_T, scan_segment
from .mhs import Composition, exact_mhs, rational_mod
from .survey import density

CACHE_ENV = "MHSDIV_CACHE"
EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for inconclusive results here
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _composition(text):
    try:
        return Composition.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _prime(text):
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not arith.is_prime(p):
        raise argparse.ArgumentTypeError(f"{p} is not prime")
    return p


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--s", type=_composition, required=True, metavar="PARTS",
                        help="composition, e.g. 2,3 or 2^4 for (2,2,2,2)")
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    common.add_argument("--budget-override", action="store_true",
                        help="run scans larger than the step budget")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="mhsdiv", description="p-adic divisibility of multiple harmonic sums")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ev = sub.add_parser("eval", parents=[common], help="exact H(s;n), optionally mod p^k")
    ev.add_argument("--n", type=int, required=True)
    ev.add_argument("--p", type=_prime)
    ev.add_argument("--k", type=_positive, default=1)

    js = sub.add_parser("jset", parents=[common], help="enumerate J(s|p^k)")
    js.add_argument("--p", type=_prime, required=True)
    js.add_argument("--k", type=_positive, default=1)
    js.add_argument("--max-segment", type=_positive, default=2)
    js.add_argument("--e", type=int, help="certificate search bound (default max-segment)")
    js.add_argument("--strategy", choices=("auto", "lifted", "exhaustive"), default="auto")
    js.add_argument("--include-trivial", action="store_true",
                    help="also list 1..d-1, where H vanishes")

    ta = sub.add_parser("tau", parents=[common], help="certify finiteness of J(s|p)")
    ta.add_argument("--p", type=_prime, required=True)
    ta.add_argument("--e", type=int, default=8)

    tb = sub.add_parser("table", parents=[common], help="T(s|p) for primes s+2 < p <= pmax")
    tb.add_argument("--pmax", type=int, required=True)

    de = sub.add_parser("density", parents=[common], help="reserved density below X")
    de.add_argument("--X", type=int, required=True)
    de.add_argument("--max-segment", type=_positive, default=2)
    de.add_argument("--e", type=int)
    de.add_argument("--segments", type=_positive,
                    help="compare only the first m segments (m-th density)")
    de.add_argument("--range-offset", type=int, default=2,
                    help="primes p with wt + offset < p < X")
    de.add_argument("--rule", choices=ReservedSetRule.KINDS[:-1],
                    help="reserved-set rule (default chosen from the composition)")
    de.add_argument("--workers", type=_positive, default=1)
    de.add_argument("--cache", default=os.environ.get(CACHE_ENV),
                    help=f"checkpoint store (default ${CACHE_ENV})")
    de.add_argument("--show-verdicts", action="store_true")
    return parser


# -- output helpers -------------------------------------------------------------------

def _set_text(values) -> str:
    return "{" + ",".join(map(str, values)) + "}"


def _emit(fmt, payload, fields, text_lines, out):
    """payload is one row (dict) or a list of rows; csv writes one line per row."""
    if fmt == "json":
        json.dump(payload, out, sort_keys=True)
        out.write("\n")
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(fields)
        for r in payload if isinstance(payload, list) else [payload]:
            w.writerow([";".join(map(str, r[f])) if isinstance(r[f], list) else
                        ("" if r[f] is None else r[f]) for f in fields])
    else:
        for line in text_lines:
            out.write(line + "\n")


def _budget(args):
    return None if args.budget_override else args.budget


# -- subcommands ----------------------------------------------------------------------

def _cmd_eval(args, out):
    x = exact_mhs(args.s, args.n)
    row = {"s": list(args.s.parts), "n": args.n, "value": f"{x.numerator}/{x.denominator}"}
    lines = [f"H({args.s};{args.n}) = {row['value']}"]
    if args.p is not None:
        v = arith.rational_val(x.numerator, x.denominator, args.p)
        row["p"] = args.p
        row["valuation"] = v.v if v.finite else None
        lines.append(f"v_{args.p} = {v.v if v.finite else 'inf'}")
        if v.finite and v.v < 0:
            row["residue"] = None
        else:
            M = args.p ** args.k
            row["residue"] = rational_mod(x, M) if x else 0
            row["k"] = args.k
            lines.append(f"H mod {args.p}^{args.k} = {row['residue']}")
    _emit(args.format, row, list(row), lines, out)
    return EXIT_OK


def _cmd_jset(args, out):
    rep = enumerate_jset(args.s, args.p, args.k, max_segment=args.max_segment,
                         strategy=args.strategy, e=args.e, budget=_budget(args),
                         override=args.budget_override)
    members = rep.values(include_trivial=args.include_trivial)
    tau = rep.certificate.tau if rep.certificate else None
    row = {"s": list(args.s.parts), "p": args.p, "k": args.k, "members": members,
           "tau": tau, "segments_scanned": rep.segments_scanned, "status": rep.status}
    k = "" if args.k == 1 else f"^{args.k}"
    lines = [f"J({args.s}|{args.p}{k}) = {_set_text(members)}",
             f"status: {rep.status}" + (f" (tau={tau})" if tau else
                                        f" (scanned {rep.segments_scanned} segments)")]
    _emit(args.format, row, list(row), lines, out)
    return EXIT_OK if rep.complete else EXIT_INCONCLUSIVE


def _cmd_tau(args, out):
    res = find_tau(args.s, args.p, args.e, budget=_budget(args), override=args.budget_override)
    ok = isinstance(res, TauCertificate)
    row = {"s": list(args.s.parts), "p": args.p, "e": args.e,
           "tau": res.tau if ok else None, "rhs": res.rhs if ok else None,
           "verified": ok}
    line = (f"tau={res.tau} (s={args.s}, p={args.p}, rhs={res.rhs})" if ok else
            f"inconclusive: tau > {args.e} (s={args.s}, p={args.p}); e has to be larger")
    _emit(args.format, row, list(row), [line], out)
    return EXIT_OK if ok else EXIT_INCONCLUSIVE


def table_rows(s: int, pmax: int):
    rows = []
    for p in arith.primes_between(s + 2, pmax + 1):
        j1 = scan_segment((s,), p, 1, 1)
        T = extract_T([m for m in j1 if not m.trivial] + [0], p, s)
        if T:
            rows.append({"p": p, "T": T})
    return rows


def _cmd_table(args, out):
    if args.s.depth != 1:
        raise UsageError("table: --s must be a single part")
    rows = table_rows(args.s.parts[0], args.pmax)
    _emit(args.format, rows, ["p", "T"],
          [f"{r['p']}: {_set_text(r['T'])}" for r in rows], out)
    return EXIT_OK


def _cmd_density(args, out):
    rule = ReservedSetRule(args.rule) if args.rule else None
    rec = density(args.s, args.X, rule, budget=_budget(args), max_segment=args.max_segment,
                  segments=args.segments, e=args.e, workers=args.workers, store=args.cache,
                  range_offset=args.range_offset)
    row = rec.to_dict()
    row["s"] = row.pop("composition")
    if not args.show_verdicts:
        row.pop("verdicts")
    lines = [f"density(RJ({args.s}); {args.X}) = {row['ratio']} = {row['percent']}",
             f"primes: {rec.primes_total} total, {rec.primes_matching} matching, "
             f"{rec.primes_not_matching} not matching, {rec.primes_inconclusive} inconclusive"]
    if args.show_verdicts:
        lines += [f"{p} {v}" for p, v in rec.verdicts]
    fields = ["s", "X", "primes_total", "primes_matching", "primes_not_matching",
              "primes_inconclusive", "ratio", "percent"]
    if args.format == "csv" and args.show_verdicts:
        row["verdicts"] = [f"{p}:{v}" for p, v in rec.verdicts]
        fields.append("verdicts")
    _emit(args.format, row, fields, lines, out)
    return EXIT_INCONCLUSIVE if rec.primes_inconclusive else EXIT_OK


COMMANDS = {"eval": _cmd_eval, "jset": _cmd_jset, "tau": _cmd_tau,
            "table": _cmd_table, "density": _cmd_density}


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_ERROR
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=err, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_ERROR
    except (MHSError, ValueError, ZeroDivisionError) as exc:
        print(f"mhsdiv {args.command}: {type(exc).__name__}: {exc}", file=err)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
