"""Benchmark the compiled kernels against the pure-Python mirrors.

Run as ``python -m aelforge.benchmarks``.  Workloads are the three hot
loops: row reduction, minimum-weight scans, and the agreement-pattern
sweep.  The pure backend is always timed; the compiled one only when the
extension built.
"""

from __future__ import annotations

import random
import time

from ._core import pure
from .gf import GF
from .hypergraphs import all_edge_row_specs

try:
    from ._core import _kernels as compiled
except ImportError:
    compiled = None


def _timed(fn, repeat: int = 3) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads():
    rng = random.Random(2024)
    f4 = GF(4)
    mul, add, sub, inv = f4.kernel_tables()

    mats = [bytes(rng.randrange(4) for _ in range(12 * 16)) for _ in range(400)]

    def rank_load(impl):
        def run():
            for m in mats:
                impl.rank_of(m, 12, 16, 4, mul, inv, sub)
        return run

    gen = bytes(rng.randrange(4) for _ in range(3 * 14))

    def weight_load(impl):
        def run():
            for _ in range(40):
                impl.min_nonzero_weight(gen, 3, 14, 4, add)
        return run

    scan_gen = bytes(rng.randrange(4) for _ in range(2 * 4))
    specs = all_edge_row_specs(3)

    def scan_load(impl):
        def run():
            impl.rim_agreement_scan(scan_gen, 2, 4, 4, 3, mul, add, sub, specs)
        return run

    return [("rank 12x16 GF(4) x400", rank_load),
            ("min-weight [14,3] GF(4) x40", weight_load),
            ("agreement sweep k=2 n=4 t=3", scan_load)]


def main() -> None:
    rows = []
    for name, load in workloads():
        t_pure = _timed(load(pure))
        if compiled is not None:
            t_comp = _timed(load(compiled))
            rows.append((name, t_pure, t_comp, t_pure / t_comp))
        else:
            rows.append((name, t_pure, None, None))
    width = max(len(r[0]) for r in rows)
    print(f"{'workload':<{width}}  {'pure':>10}  {'compiled':>10}  {'speedup':>8}")
    for name, t_pure, t_comp, ratio in rows:
        comp = f"{t_comp * 1e3:9.2f}ms" if t_comp is not None else "  (absent)"
        rat = f"{ratio:7.1f}x" if ratio is not None else "       -"
        print(f"{name:<{width}}  {t_pure * 1e3:9.2f}ms  {comp}  {rat}")


if __name__ == "__main__":
    main()
