"""End-to-end pipelines: bound, sums, sweeps, L-function checks and reports."""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .cyclotomic import CyclotomicInteger, Interval, cyc_abs, interval_sqrt_power
from .expsum import (NoRecurrenceWithinCap, PowerSumSequence, RecurrenceData, WeightVerdict, fit_recurrence,
                     hyp_sum, weight_check)
from .groups import CapExceeded, lattice_rank
from .nondeg import (DEGENERATE, EVIDENCE_NONDEGENERATE, NondegVerdict, feasible_depth, newton_polytope,
                     nondeg_sweep, qualifying_faces)
from .polytope import BoundComputation, DegenerateBoundWarning, compute_rank_bound
from .scenario import Scenario

PASS, FAIL, INCONCLUSIVE, NOT_APPLICABLE = "PASS", "FAIL", "INCONCLUSIVE", "NOT_APPLICABLE"
DEFAULT_PRECISION = 128
MAX_PRECISION = 512


def _fr(x: Fraction) -> list[int]:
    return [x.numerator, x.denominator]


def scenario_warnings(scenario: Scenario) -> list[str]:
    """Checkable necessary conditions the bound relies on."""
    out = []
    rank = scenario.group.root_system.rank
    if lattice_rank(scenario.reps) < rank:
        out.append(f"weights span a sublattice of rank {lattice_rank(scenario.reps)} < {rank}: "
                   "the map to the representations cannot be quasi-finite")
    for j, rep in enumerate(scenario.reps):
        if not rep.is_irreducible:
            out.append(f"representation {j} is reducible; the polytope uses all of its weights")
    return out


# -- bound ----------------------------------------------------------------------------------

@dataclass
class BoundReport:
    value: Fraction
    computation: BoundComputation
    weights: list[list[list[int]]]

    def trace(self) -> dict:
        out = self.computation.trace()
        out["weights"] = self.weights
        return out


def cmd_bound(scenario: Scenario) -> BoundReport:
    rs = scenario.group.root_system
    delta = newton_polytope(scenario)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateBoundWarning)
        comp = compute_rank_bound(rs, delta, scenario.d)
    weights = [[list(w) for w in rep.weights] for rep in scenario.reps]
    return BoundReport(comp.value, comp, weights)


# -- sums -----------------------------------------------------------------------------------

def cmd_sum(scenario: Scenario, m: int = 1, workers: int = 1, precision: int = DEFAULT_PRECISION) -> dict:
    s = hyp_sum(scenario, m, workers)
    return {"m": m, "S": s.to_json(), "abs": cyc_abs(s, precision).to_json()}


def cmd_nondeg(scenario: Scenario, depth: int | None = None, workers: int = 1) -> NondegVerdict:
    return nondeg_sweep(scenario, depth or scenario.caps.nondeg_depth, workers, truncate=True)


# -- verification ---------------------------------------------------------------------------

@dataclass
class Comparison:
    status: str
    abs_S1: Interval
    threshold: Interval
    precision: int


def compare(S1: CyclotomicInteger, q: int, d: int, bound: Fraction, precision: int = DEFAULT_PRECISION) -> Comparison:
    """|S1| against q^(d/2) * bound, doubling precision on overlap."""
    prec = precision
    while True:
        a = cyc_abs(S1, prec)
        thr = interval_sqrt_power(q, d, scale=bound, precision=prec)
        if a.hi <= thr.hi:
            return Comparison(PASS, a, thr, prec)
        if a.lo > thr.hi:
            return Comparison(FAIL, a, thr, prec)
        if prec >= MAX_PRECISION:
            return Comparison(INCONCLUSIVE, a, thr, prec)
        prec = min(2 * prec, MAX_PRECISION)


def overall_status(nondeg_status: str, cmp_status: str) -> str:
    if nondeg_status == DEGENERATE:
        return NOT_APPLICABLE
    if nondeg_status != EVIDENCE_NONDEGENERATE:
        return INCONCLUSIVE
    return cmp_status


@dataclass
class VerifyResult:
    scenario: Scenario
    bound: BoundReport
    S1: CyclotomicInteger
    comparison: Comparison
    nondeg: NondegVerdict
    overall: str


def cmd_verify(scenario: Scenario, workers: int = 1, precision: int = DEFAULT_PRECISION) -> VerifyResult:
    nd = cmd_nondeg(scenario, workers=workers)
    S1 = hyp_sum(scenario, 1, workers)
    b = cmd_bound(scenario)
    cmp = compare(S1, scenario.q, scenario.d, b.value, precision)
    return VerifyResult(scenario, b, S1, cmp, nd, overall_status(nd.status, cmp.status))


# -- L-function -----------------------------------------------------------------------------

@dataclass
class LfunResult:
    status: str
    sequence: PowerSumSequence
    requested_terms: int
    bound: Fraction
    recurrence: RecurrenceData | None = None
    weight: WeightVerdict | None = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        rec = self.recurrence
        return {
            "status": self.status,
            "terms": self.sequence.M,
            "requested_terms": self.requested_terms,
            "recurrence": rec.to_json() if rec else None,
            "degree_le_bound": (rec.degree <= self.bound) if rec else None,
            "rank_bound": _fr(self.bound),
            "weight_check": self.weight.to_json() if self.weight else None,
            "notes": list(self.notes),
        }


def recurrence_degree_cap(bound: Fraction) -> int:
    """Degree allowed when fitting: twice the bound plus slack for small fields."""
    return 2 * int(bound) + 4


def cmd_lfun(scenario: Scenario, terms: int | None = None, workers: int = 1, precision: int = DEFAULT_PRECISION,
             nondeg: NondegVerdict | None = None, bound: BoundReport | None = None) -> LfunResult:
    requested = terms or scenario.caps.max_extension_M
    M = min(requested, scenario.caps.max_extension_M, feasible_depth(scenario, requested))
    notes = []
    if M < requested:
        notes.append(f"terms lowered from {requested} to {M} by the caps")
    b = bound or cmd_bound(scenario)
    nd = nondeg or cmd_nondeg(scenario, workers=workers)
    seq = PowerSumSequence(scenario.label, [hyp_sum(scenario, m, workers) for m in range(1, M + 1)])
    res = LfunResult(INCONCLUSIVE, seq, requested, b.value, notes=notes)
    if M == 0:
        res.notes.append("no extension fits the group-size cap")
        return res
    try:
        res.recurrence = fit_recurrence(seq, recurrence_degree_cap(b.value), precision)
    except NoRecurrenceWithinCap as exc:
        res.notes.append(str(exc))
        return res
    res.notes.extend(res.recurrence.notes)
    if nd.status == DEGENERATE:
        res.status = NOT_APPLICABLE
        return res
    res.weight = weight_check(res.recurrence, scenario.q, scenario.d)
    determined = recurrence_determined(res.recurrence.degree, M, b.value)
    if not determined:
        res.notes.append(f"{M} terms do not pin down a recurrence of degree {res.recurrence.degree}")
    if nd.status == EVIDENCE_NONDEGENERATE and determined:
        res.status = res.weight.status
    return res


def recurrence_determined(degree: int, terms: int, bound: Fraction) -> bool:
    """A fitted recurrence is trusted if a spare term confirms it, or if it
    fits within the rank bound and there are 2 * bound terms (any two
    recurrences of degree <= bound agreeing on 2 * bound terms coincide)."""
    return 2 * degree < terms or (degree <= bound and terms >= 2 * bound)


# -- report ---------------------------------------------------------------------------------

def build_report(scenario: Scenario, workers: int = 1, precision: int = DEFAULT_PRECISION) -> tuple[dict, PowerSumSequence]:
    v = cmd_verify(scenario, workers, precision)
    try:
        lf = cmd_lfun(scenario, workers=workers, precision=precision, nondeg=v.nondeg, bound=v.bound)
        lf_json = lf.to_json()
        seq = lf.sequence if lf.sequence.M else PowerSumSequence(scenario.label, [v.S1])
    except (CapExceeded, ArithmeticError, ValueError) as exc:
        lf_json = {"status": "ERROR", "error": f"{type(exc).__name__}: {exc}"}
        seq = PowerSumSequence(scenario.label, [v.S1])
    nd = v.nondeg.to_json()
    report = {
        "version": __version__,
        "scenario": scenario.label,
        "input": scenario.to_json(),
        "d": scenario.d,
        "bound": _fr(v.bound.value),
        "S": [s.to_json() for s in seq.values],
        "abs_S1": v.comparison.abs_S1.to_json(),
        "threshold": v.comparison.threshold.to_json(),
        "comparison": {"status": v.comparison.status, "precision": v.comparison.precision},
        "nondeg": nd,
        "lfun": lf_json,
        "overall": v.overall,
        "warnings": scenario_warnings(scenario),
        "provenance": {
            **v.bound.trace(),
            "faces_without_origin": [f.to_json() for f in qualifying_faces(scenario)],
        },
    }
    return report, seq


def report_bytes(report: dict) -> bytes:
    return (json.dumps(report, sort_keys=True, indent=2) + "\n").encode()


def write_report(scenario: Scenario, out_dir: str | Path, workers: int = 1,
                 precision: int = DEFAULT_PRECISION) -> tuple[Path, Path, dict]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report, seq = build_report(scenario, workers, precision)
    jpath = out / f"{scenario.label}.json"
    cpath = out / f"{scenario.label}.csv"
    jpath.write_bytes(report_bytes(report))
    cpath.write_text(seq.to_csv(precision))
    return jpath, cpath, report
