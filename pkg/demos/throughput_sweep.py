# Fine-grained locking against one global lock on a read-heavy mix.
#
#     python3 demos/throughput_sweep.py [seconds]
#
# Under CPython's GIL the gap stays small; the numbers are for shape, not speed.

import sys

from congraph.bench import BenchConfig, emit_csv, hardware_threads, preset_workload, run_benchmark, thread_sweep

duration = float(sys.argv[1]) if len(sys.argv) > 1 else 1.0
mix = preset_workload("contains-dominated")
results = []
for threads in thread_sweep(max(4, hardware_threads())):
    for variant in ("fine-die", "coarse"):
        r = run_benchmark(BenchConfig(variant=variant, threads=threads, duration=duration, seed=1), mix)
        results.append(r)
        print(f"{variant:>9} x{threads}: {r.ops_per_sec:10,.0f} ops/s")

emit_csv(results, sys.stdout)
