"""Benchmark the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Times the hot kernels on representative workloads: the exponential
subset-image scan, relation composition inside loop fixpoints, antichain
pruning, down-set expansion, and the family union-product.  Also times
one end-to-end workload (the theorem differential) under each backend by
re-executing in a subprocess with HYPERSEM_PURE set.
"""

import argparse
import os
import random
import statistics
import subprocess
import sys
import time

import hypersem._kernels as kernels
import hypersem._kernels.pure as pure

try:
    import hypersem._kernels._native as native
except ImportError:
    native = None


def timed(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads():
    rng = random.Random(0)
    n = 10
    rows_a = [rng.randrange(1 << n) for _ in range(n)]
    rows_b = [rng.randrange(1 << n) for _ in range(n)]

    # a partial function's image table: the scan's fast, passing case
    pf_rows = [1 << rng.randrange(n) for _ in range(n)]
    pf_table = [pure.dirimg_rows(pf_rows, p) for p in range(1 << n)]

    # a branching relation: the scan bails out early somewhere
    branching = list(pf_rows)
    branching[3] |= 1 << 7
    bad_table = [pure.dirimg_rows(branching, p) for p in range(1 << n)]

    sets = [rng.randrange(1 << 16) for _ in range(300)]
    anti = pure.maximal_sets(sets)
    fam_a = sorted({rng.randrange(1 << 12) for _ in range(200)})
    fam_b = sorted({rng.randrange(1 << 12) for _ in range(200)})
    members = pure.expand_downset(anti[:6], 1 << 20) or []

    return [
        ("psc_scan pass n=10", "psc_scan_table", (pf_table, n)),
        ("psc_scan fail n=10", "psc_scan_table", (bad_table, n)),
        ("compose_rows n=10 x2000", "compose_rows_loop", (rows_a, rows_b)),
        ("maximal_sets 300", "maximal_sets", (sets,)),
        ("expand_downset", "expand_downset", (anti[:6], 1 << 20)),
        ("union_product 200x200", "union_product", (fam_a, fam_b)),
        ("is_downclosed", "is_downclosed", (members,)),
    ]


def compose_loop(mod):
    def run(a, b):
        cur = a
        for _ in range(2000):
            cur = mod.compose_rows(cur, b)
    return run


def bench_kernels(repeat):
    rows = []
    for name, fn_name, args in workloads():
        if fn_name == "compose_rows_loop":
            t_pure = timed(compose_loop(pure), args, repeat)
            t_nat = timed(compose_loop(native), args, repeat) if native else None
        else:
            t_pure = timed(getattr(pure, fn_name), args, repeat)
            t_nat = (timed(getattr(native, fn_name), args, repeat)
                     if native else None)
        rows.append((name, t_pure, t_nat))
    return rows


def bench_end_to_end():
    code = ("import time; from hypersem.harness import GenConfig, diff_thm1; "
            "t0=time.perf_counter(); "
            "r=diff_thm1(GenConfig(seed=1, space_size=4, max_range=3), "
            "trials=30, samples=40); "
            "assert r.failures == 0; print(time.perf_counter()-t0)")
    out = []
    for label, env_extra in (("native", {}), ("pure", {"HYPERSEM_PURE": "1"})):
        env = dict(os.environ, **env_extra)
        res = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True, check=True)
        out.append((label, float(res.stdout.strip())))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    print(f"active backend: {kernels.backend()}")
    if native is None:
        print("native kernels not built; timing the pure backend only\n")

    print(f"{'kernel workload':<28}{'pure':>12}{'native':>12}{'speedup':>10}")
    for name, t_pure, t_nat in bench_kernels(args.repeat):
        if t_nat is not None:
            print(f"{name:<28}{t_pure * 1e3:>10.2f}ms{t_nat * 1e3:>10.2f}ms"
                  f"{t_pure / t_nat:>9.1f}x")
        else:
            print(f"{name:<28}{t_pure * 1e3:>10.2f}ms{'-':>12}{'-':>10}")

    print("\nend to end (theorem differential, 30 programs x 40 queries):")
    for label, seconds in bench_end_to_end():
        print(f"  {label:<8}{seconds:.2f}s")


if __name__ == "__main__":
    main()
