"""Command-line entry point: ``hyplab <command> <scenario.json> [options]``."""
from __future__ import annotations

import argparse
import json
import sys

from .exactfield import FieldError
from .groups import GroupError
from .pipeline import (DEFAULT_PRECISION, FAIL, INCONCLUSIVE, NOT_APPLICABLE, PASS, cmd_bound, cmd_lfun,
                       cmd_nondeg, cmd_sum, cmd_verify, scenario_warnings, write_report)
from .polytope import PolytopeError
from .scenario import ScenarioError, load_scenario

EXIT = {PASS: 0, NOT_APPLICABLE: 0, FAIL: 1, INCONCLUSIVE: 2}
EXIT_ERROR = 3


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workers", type=int, default=argparse.SUPPRESS, help="worker threads (default 1)")
    common.add_argument("--precision", type=int, default=argparse.SUPPRESS, help="interval precision in bits")
    common.add_argument("--cap-group-size", type=int, default=argparse.SUPPRESS,
                        help="override the scenario's max_group_size")

    ap = argparse.ArgumentParser(prog="hyplab", parents=[common],
                                 description="Exact exponential sums on reductive groups with rank-bound checks.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in [("bound", "exact rank bound with provenance trace"),
                           ("sum", "exact sum over the degree-m extension"),
                           ("nondeg", "critical-point sweep of face functions"),
                           ("lfun", "power sums, minimal recurrence and weight check"),
                           ("verify", "compare |S1| with the bound times q^(d/2)"),
                           ("report", "write JSON and CSV reports")]:
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("file")
        if name == "sum":
            p.add_argument("--m", type=int, default=1)
        elif name == "nondeg":
            p.add_argument("--depth", type=int, default=None)
        elif name == "lfun":
            p.add_argument("--terms", type=int, default=None)
        elif name == "report":
            p.add_argument("--out", default="reports")
    return ap


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def run(argv=None) -> int:
    args = _parser().parse_args(argv)
    workers = getattr(args, "workers", 1)
    precision = getattr(args, "precision", DEFAULT_PRECISION)
    if workers < 1 or precision < 16:
        print("hyplab: --workers must be >= 1 and --precision >= 16", file=sys.stderr)
        return EXIT_ERROR
    try:
        sc = load_scenario(args.file)
        if hasattr(args, "cap_group_size"):
            sc = sc.with_caps(max_group_size=args.cap_group_size)
        for msg in scenario_warnings(sc):
            print(f"hyplab: warning: {msg}", file=sys.stderr)
        cmd = args.command
        if cmd == "bound":
            b = cmd_bound(sc)
            _emit({"scenario": sc.label, "bound": [b.value.numerator, b.value.denominator], "trace": b.trace()})
            return 0
        if cmd == "sum":
            _emit({"scenario": sc.label, **cmd_sum(sc, args.m, workers, precision)})
            return 0
        if cmd == "nondeg":
            v = cmd_nondeg(sc, args.depth, workers)
            _emit({"scenario": sc.label, **v.to_json()})
            return 2 if v.status == INCONCLUSIVE else 0
        if cmd == "lfun":
            res = cmd_lfun(sc, args.terms, workers, precision)
            _emit({"scenario": sc.label, "S": [s.to_json() for s in res.sequence.values], **res.to_json()})
            return EXIT[res.status]
        if cmd == "verify":
            r = cmd_verify(sc, workers, precision)
            _emit({"scenario": sc.label, "overall": r.overall, "S1": r.S1.to_json(),
                   "abs_S1": r.comparison.abs_S1.to_json(), "threshold": r.comparison.threshold.to_json(),
                   "bound": [r.bound.value.numerator, r.bound.value.denominator], "nondeg": r.nondeg.status})
            return EXIT[r.overall]
        jpath, cpath, rep = write_report(sc, args.out, workers, precision)
        print(f"{rep['overall']}: wrote {jpath} and {cpath}")
        return EXIT[rep["overall"]]
    except (ScenarioError, GroupError, FieldError, PolytopeError, OSError) as exc:
        print(f"hyplab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
