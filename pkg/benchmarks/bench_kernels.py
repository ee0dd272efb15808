"""Compare the compiled and numpy backends on the hot loops.

    python benchmarks/bench_kernels.py [--repeat N]

Prints one row per workload with the best wall time under each backend
and checks that both backends return identical results.
"""
import argparse
import time

import numpy as np

from hyplab import _kernels
from hyplab.expsum import extension, hyp_sum, phase_polynomial
from hyplab.groups import coordinates, group_elements
from hyplab.nondeg import nondeg_sweep
from hyplab.scenario import fixture


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    if hasattr(a, "to_json"):
        return a.to_json() == b.to_json()
    return a == b


def workloads():
    sc = fixture("sl2_std_f5").with_A([[[1, 2], [3, 4]]])
    F = extension(sc, 2)
    t = F.tables
    pts = coordinates(sc.group, group_elements(sc.group, F, sc.caps.max_group_size), t)
    exps, coeffs = phase_polynomial(sc, F)
    rng = np.random.default_rng(0)
    K = rng.integers(0, t.Q, size=(400, 6, 8))
    qs = rng.integers(1, t.Q, size=(2000, 8))
    sp4 = fixture("sp4_gen_f3")
    return [
        (f"poly_values SL2(F25), {len(pts)} points", lambda: _kernels.poly_values(pts, exps, coeffs, t)),
        (f"trace_counts SL2(F25), {len(pts)} points", lambda: _kernels.trace_counts(pts, exps, coeffs, t)),
        ("first_critical 400 x 2000 over F25, no hit", lambda: _kernels.first_critical(K, qs, t)),
        ("hyp_sum Sp4(F3)", lambda: hyp_sum(sp4, 1)),
        ("nondeg_sweep SL2 over F5 and F25", lambda: nondeg_sweep(sc, 2).status),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = _kernels.available()
    print(f"{'workload':48s}" + "".join(f"{b:>12s}" for b in backends) + "   speedup  agree")
    for name, fn in workloads():
        times, outs = [], []
        for b in backends:
            with _kernels.use_backend(b):
                dt, out = best_of(fn, args.repeat)
            times.append(dt)
            outs.append(out)
        agree = all(_same(outs[0], o) for o in outs[1:])
        speed = f"{times[0] / times[-1]:9.1f}x" if len(times) > 1 else "        -"
        print(f"{name:48s}" + "".join(f"{dt * 1e3:10.1f}ms" for dt in times) + f" {speed}  {agree}")


if __name__ == "__main__":
    main()
