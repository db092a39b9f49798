"""Throughput comparison: compiled kernel vs pure-Python fallback.

Runs a few representative (policy, pattern) combos over one full refresh
window with the compiled kernel and a truncated window with the pure
kernel (which is ~3 orders of magnitude slower), reporting ns per
activation and the speedup.

    python benchmarks/bench_kernel.py [--full-python]
"""

import argparse
import time

from hammersim.dram import DramTimings, MitigationSchedule, derive_budgets
from hammersim.engine import HAVE_COMPILED_KERNEL, SimConfig, simulate
from hammersim.patterns import nonuniform_pattern, uniform_pattern
from hammersim.policies import Baseline, Graphene, Para, Pmss, Proteas

CASES = (
    ("baseline / uniform j=20", Baseline(), uniform_pattern(20, aligned=True)),
    ("proteas p=0.01 / uniform j=20", Proteas(sampling_p=0.01), uniform_pattern(20, aligned=True)),
    ("proteas p=0.01 / nonuniform j=8 x=3 k=20", Proteas(sampling_p=0.01),
     nonuniform_pattern(8, 3, 20, aligned=False)),
    ("pmss p=0.01 / uniform j=20", Pmss(sampling_p=0.01), uniform_pattern(20, aligned=True)),
    ("para p=0.006 / uniform j=20", Para(mitigate_p=0.006), uniform_pattern(20, aligned=True)),
    ("graphene trh=500 / uniform j=20", Graphene(trh=500), uniform_pattern(20, aligned=True)),
)


def time_once(cfg, use_compiled):
    t0 = time.perf_counter()
    simulate(cfg, use_compiled=use_compiled)
    return time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--full-python", action="store_true",
                    help="run the pure kernel over the full window too "
                         "(minutes per case) instead of a short window")
    args = ap.parse_args()

    full = DramTimings()
    short = DramTimings(refs_per_trefw=64)
    n_full = derive_budgets(full).acts_per_trefw
    n_short = derive_budgets(short).acts_per_trefw
    sched = MitigationSchedule()

    if not HAVE_COMPILED_KERNEL:
        print("compiled kernel unavailable; benchmarking the fallback only")

    print(f"{'case':45s} {'compiled':>12s} {'pure':>12s} {'speedup':>9s}")
    for label, policy, pattern in CASES:
        cfg_full = SimConfig(policy=policy, pattern=pattern, timings=full, schedule=sched)
        cfg_py = cfg_full if args.full_python else SimConfig(
            policy=policy, pattern=pattern, timings=short, schedule=sched)

        if HAVE_COMPILED_KERNEL:
            time_once(cfg_full, True)  # warm up
            c_ns = 1e9 * min(time_once(cfg_full, True) for _ in range(3)) / n_full
        else:
            c_ns = float("nan")
        n_py = n_full if args.full_python else n_short
        p_ns = 1e9 * time_once(cfg_py, False) / n_py
        print(f"{label:45s} {c_ns:9.1f} ns {p_ns:9.0f} ns {p_ns / c_ns:8.0f}x")


if __name__ == "__main__":
    main()
