"""Compare the compiled harmonic kernel against the numpy fallback.

Times both backends over a grid of (events, harmonics) sizes and checks
they emit the same sums.  Rates are harmonic-event pairs per second, the
unit the O(N*K) recurrence is judged in.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --events 200000 --harmonics 5000
"""

import argparse
import time

import numpy as np

from leadlag.kernels import active_backend, available_backends, harmonic_jump_sums


def time_backend(t, dp, harmonics, backend, repeats):
    best = np.inf
    sums = None
    for _ in range(repeats):
        start = time.perf_counter()
        sums = harmonic_jump_sums(t, dp, harmonics, backend=backend)
        best = min(best, time.perf_counter() - start)
    return best, sums


def run_case(rng, events, harmonics, repeats):
    t = np.sort(rng.uniform(0.0, 2.0 * np.pi, size=events))
    dp = rng.normal(size=events) * 1e-4
    pairs = events * harmonics

    rows = {}
    for backend in available_backends():
        seconds, sums = time_backend(t, dp, harmonics, backend, repeats)
        rows[backend] = (seconds, sums)

    reference = rows[active_backend()][1]
    worst = max(float(np.abs(sums - reference).max())
                for _, sums in rows.values())

    label = f"{events:>9,} x {harmonics:>5}"
    cells = []
    for backend, (seconds, _) in sorted(rows.items()):
        cells.append(f"{backend}: {seconds * 1e3:8.1f} ms "
                     f"({pairs / seconds / 1e6:7.0f} Mpair/s)")
    if "compiled" in rows and "numpy" in rows:
        speedup = rows["numpy"][0] / rows["compiled"][0]
        cells.append(f"speedup {speedup:4.1f}x")
    print(f"{label}  " + "  ".join(cells) + f"  max diff {worst:.1e}")
    return worst


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--events", type=int, default=None,
                        help="single case: number of jump events")
    parser.add_argument("--harmonics", type=int, default=None,
                        help="single case: number of harmonics")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repeats, best is kept (default 3)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"backends: {', '.join(available_backends())} "
          f"(default {active_backend()})")
    rng = np.random.default_rng(args.seed)

    if args.events or args.harmonics:
        cases = [(args.events or 100000, args.harmonics or 1000)]
    else:
        cases = [(1000, 100), (10000, 500), (100000, 1000),
                 (100000, 5000), (1000000, 1000)]

    worst = 0.0
    for events, harmonics in cases:
        worst = max(worst, run_case(rng, events, harmonics, args.repeats))
    if worst > 1e-12:
        raise SystemExit(f"backends disagree: max diff {worst:.1e}")


if __name__ == "__main__":
    main()
