import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyplab.cyclotomic import CyclotomicInteger, psi
from hyplab.exactfield import field_make
from hyplab.expsum import (NoRecurrenceWithinCap, PowerSumSequence, fit_recurrence, hyp_sum, power_sums,
                           trace_histogram, weight_check)
from hyplab.groups import CapExceeded, GroupSpec
from hyplab.scenario import fixture, fixtures_dir, parse_scenario

FIXTURES = sorted(p.stem for p in fixtures_dir().glob("*.json"))


def ints(p, xs):
    return [CyclotomicInteger.from_int(p, x) for x in xs]


def kl_oracle(m):
    """Kl over F_{5^m} from the definition, element by element."""
    F = field_make(5, m)
    total = CyclotomicInteger.zero(5)
    for x in F.elements():
        if x:
            total = total + psi(x + x.inverse())
    return total


def test_orthogonality_example():
    sc = fixture("torus_t_f3")
    assert hyp_sum(sc) == CyclotomicInteger.from_int(3, -1)


def test_kloosterman_example():
    assert hyp_sum(fixture("kloosterman_f5")) == CyclotomicInteger(5, (2, 0, 1, 1))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_kloosterman_against_definition(m):
    assert hyp_sum(fixture("kloosterman_f5"), m) == kl_oracle(m)


def test_power_sum_examples():
    zero = fixture("torus_zero_f5").with_A([[[0]]])
    sc = parse_scenario({"group": {"kind": "torus", "n": 1}, "q": 3, "reps": [{"torus_character": [1]}],
                         "A": [[[0]]]})
    assert power_sums(sc, 3).values == ints(3, [2, 8, 26])
    t = fixture("torus_t_f3")
    assert power_sums(t, 3).values == ints(3, [-1, -1, -1])
    assert hyp_sum(zero) == CyclotomicInteger.from_int(5, 4)


def test_kloosterman_power_sums_are_real():
    seq = power_sums(fixture("kloosterman_f5"), 4)
    for s in seq.values:
        assert s.galois(4) == s          # invariant under complex conjugation


def test_caps_respected():
    sc = fixture("sl2_std_f5").with_caps(max_group_size=1000)
    with pytest.raises(CapExceeded):
        hyp_sum(sc, 2)


def test_geometric_recurrence():
    rec = fit_recurrence(ints(3, [2 * 3**m for m in range(1, 7)]), 3)
    assert rec.degree == 1
    assert rec.reciprocal_roots[0].modulus.contains(3)


def test_lucas_recurrence():
    vals = [1, 3]
    while len(vals) < 8:
        vals.append(vals[-1] + vals[-2])
    rec = fit_recurrence(ints(5, vals), 4)
    assert rec.degree == 2
    small, big = sorted((r.modulus for r in rec.reciprocal_roots), key=lambda m: m.mid)
    # |roots| are (sqrt 5 - 1)/2 and (sqrt 5 + 1)/2; test containment with exact squares
    assert (2 * small.lo + 1) ** 2 <= 5 <= (2 * small.hi + 1) ** 2
    assert (2 * big.lo - 1) ** 2 <= 5 <= (2 * big.hi - 1) ** 2


def test_kloosterman_recurrence_and_weights():
    seq = power_sums(fixture("kloosterman_f5"), 4)
    rec = fit_recurrence(seq, 2)
    assert rec.degree == 2 and rec.isolated
    for r in rec.reciprocal_roots:
        assert abs(float(r.modulus.mid) - math.sqrt(5)) < 1e-12
    assert weight_check(rec, 5, 1).status == "PASS"


def test_weight_check_boundary_and_violation():
    rec = fit_recurrence(ints(3, [3**m for m in range(1, 5)]), 2)
    assert weight_check(rec, 3, 2).status == "PASS"
    rec = fit_recurrence(ints(3, [9**m for m in range(1, 5)]), 2)
    assert weight_check(rec, 3, 1).status == "FAIL"


def test_no_recurrence_within_cap():
    vals = [1, 0, 0, 2, 0, 0, 0, 5]
    with pytest.raises(NoRecurrenceWithinCap):
        fit_recurrence(ints(3, vals), 1)


def test_csv_layout():
    seq = power_sums(fixture("kloosterman_f5"), 2)
    rows = list(csv.reader(io.StringIO(seq.to_csv())))
    assert rows[0] == ["m", "c0", "c1", "c2", "c3", "abs_mid"]
    assert rows[1][:5] == ["1", "2", "0", "1", "1"]
    assert abs(float(rows[1][5]) - 0.381966011250105) < 1e-12


# -- properties ---------------------------------------------------------------------------

@pytest.mark.property
@pytest.mark.parametrize("name", FIXTURES)
def test_zero_coefficients_give_group_order(name):
    sc = fixture(name)
    zero = sc.with_A([np.zeros_like(a) for a in sc.A])
    F = sc.field
    for m in range(1, min(2, sc.caps.max_extension_M) + 1):
        try:
            val = hyp_sum(zero, m)
        except CapExceeded:
            break
        assert val == CyclotomicInteger.from_int(F.p, sc.group.order(F.size**m))


@pytest.mark.property
@pytest.mark.parametrize("q,reps", [(3, [[1]]), (5, [[1], [-1]]), (7, [[1], [-1]]), (7, [[2], [-1]]),
                                    (5, [[1, 0], [0, 1], [-1, -1]]), (3, [[1, 1], [0, -1]])])
def test_galois_consistency(q, reps):
    n = len(reps[0])
    rng = np.random.default_rng(q)
    A = [[[int(rng.integers(1, q))]] for _ in reps]
    sc = parse_scenario({"group": {"kind": "torus", "n": n}, "q": q,
                         "reps": [{"torus_character": r} for r in reps], "A": A})
    F = sc.field
    S = hyp_sum(sc)
    units = [x for x in F.elements() if x]
    for a in range(1, q):
        total = CyclotomicInteger.zero(q)
        for pt in np.ndindex(*(len(units),) * n):
            ts = [units[i] for i in pt]
            phase = F.zero()
            for r, c in zip(reps, A):
                mono = F.one()
                for x, k in zip(ts, r):
                    mono = mono * (x**k if k >= 0 else x.inverse() ** (-k))
                phase = phase + mono * c[0][0]
            total = total + psi(phase, a)
        assert S.galois(a) == total


@pytest.mark.property
@pytest.mark.parametrize("name", ["kloosterman_f5", "sl2_std_f3", "torus2_kl3_f3", "sl3_std_f2"])
def test_partition_invariance(name):
    sc = fixture(name)
    base = trace_histogram(sc, 2 if name != "sl3_std_f2" else 1, workers=1)
    for workers, rows in [(2, None), (4, None), (3, 17), (1, 5)]:
        assert np.array_equal(trace_histogram(sc, 2 if name != "sl3_std_f2" else 1, workers, rows), base)


@pytest.mark.property
@given(st.lists(st.integers(-4, 4), min_size=1, max_size=3), st.lists(st.integers(-3, 3), min_size=1, max_size=3),
       st.integers(0, 4))
def test_recurrence_annihilates_whole_sequence(roots, mults, extra):
    k = min(len(roots), len(mults))
    roots, mults = roots[:k], mults[:k]
    M = 2 * k + 2 + extra
    vals = [sum(c * r**m for r, c in zip(roots, mults)) for m in range(1, M + 1)]
    rec = fit_recurrence(ints(3, vals), k + 1)
    L = rec.degree
    assert L <= k
    C = rec.char_poly
    from hyplab.cyclotomic import CyclotomicRational
    rats = [CyclotomicRational(v) for v in ints(3, vals)]
    for n in range(L, M):
        acc = rats[n]
        for i in range(1, L + 1):
            acc = acc + C[i] * rats[n - i]
        assert acc.is_zero()


@pytest.mark.property
def test_orthogonality_recurrence_for_single_character():
    rec = fit_recurrence(power_sums(fixture("torus_t_f3"), 4), 3)
    assert rec.degree == 1 and rec.reciprocal_roots[0].modulus.contains(1)
