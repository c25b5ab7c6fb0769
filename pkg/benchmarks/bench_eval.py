"""Benchmark: compiled tape evaluator vs the pure-Python tree walker.

The workload is the realistic hot path: second-derivative trees of a
built extension's dilation defect, evaluated over grids of increasing
size.  Run with:  python benchmarks/bench_eval.py
"""

import time

import numpy as np

from phgkit.config import RunConfig
from phgkit.corpus import load_expansion, standard_grid
from phgkit.grading import Weights
from phgkit.phg.extension import build_extension, epsilon_schedule
from phgkit.symbols import backend
from phgkit.symbols.engine import MultiIndex
from phgkit.symbols.expr import node_count


def build_workload():
    cfg = RunConfig()
    w = Weights((1, 1))
    expn = load_expansion("expansion-order1")
    grid = standard_grid((1, 1), cfg)
    sched = epsilon_schedule(expn, w, grid)
    built = build_extension(expn, expn.m, sched, w)
    defect = built.b.defect(w.extended(), 1.5, expn.m)
    tree = defect.diff(MultiIndex(x=(), xi=(1, 1), t=0))
    return tree


def median_time(fn, repeats=5):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return sorted(times)[len(times) // 2]


def main():
    tree = build_workload()
    print(f"workload: defect second derivative, {node_count(tree.expr)} unique nodes")
    if backend.BACKEND != "compiled":
        print("compiled backend unavailable; benchmarking python only")
    rng = np.random.default_rng(0)
    header = f"{'points':>10} {'python (ms)':>14} {'compiled (ms)':>14} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for n in (100, 1000, 10000, 100000):
        pts = rng.normal(size=(n, 3)) * 10.0
        t_py = median_time(lambda: backend.evaluate_python(tree.expr, pts, tree.sig))
        if backend.BACKEND == "compiled":
            t_c = median_time(lambda: backend.evaluate_compiled(tree.expr, pts, tree.sig))
            a = backend.evaluate_python(tree.expr, pts, tree.sig)
            b = backend.evaluate_compiled(tree.expr, pts, tree.sig)
            scale = np.maximum(np.abs(a), 1.0)
            assert np.max(np.abs(a - b) / scale) < 1e-12, "backend mismatch"
            print(f"{n:>10} {t_py*1e3:>14.2f} {t_c*1e3:>14.2f} {t_py/t_c:>9.2f}x")
        else:
            print(f"{n:>10} {t_py*1e3:>14.2f} {'-':>14} {'-':>9}")


if __name__ == "__main__":
    main()
