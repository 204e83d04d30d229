"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--frames N] [--repeat R]
"""

import argparse
import time

import numpy as np

from courtactive import kernels
from courtactive.filters import FilterParams, filter_measurements
from courtactive.ground_truth import expand_activity
from courtactive.ingest import GridSpec
from courtactive.model import FIBA_COURT
from courtactive.possession import label_possessions
from courtactive.synth import generate, planted_script
from courtactive.tuning import tune


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--frames", type=int, default=505_291)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(0)
    n = args.frames
    t = np.arange(n, dtype=np.int64) * 20
    t[rng.random(n) < 0.001] += 40
    t = np.maximum.accumulate(t)
    cond = np.repeat(rng.random(n // 50 + 1) < 0.5, 50)[:n]
    codes = np.repeat(rng.integers(0, 3, n // 25 + 1), 25)[:n].astype(np.int8)
    starts, ends = kernels.run_spans(cond, t, 20)

    seconds = n // 50 + 1
    game = generate(planted_script(seconds=seconds, seed=0))
    x = game.tracking[:n]
    short = generate(planted_script(seconds=600, seed=0))
    truth = expand_activity(short.activity, 600)

    cases = {
        "run_spans": lambda: kernels.run_spans(cond, t, 20),
        "fill_spans": lambda: kernels.fill_spans(n, starts, ends),
        "mark_long_runs": lambda: kernels.mark_long_runs(cond, t, 20, 2000),
        "assign_ord": lambda: kernels.assign_ord(codes, 0),
        "filter+label": lambda: label_possessions(filter_measurements(x, FIBA_COURT, FilterParams())[0]),
        "tune (600 s game)": lambda: tune(short.tracking, FIBA_COURT, 10_000, truth, GridSpec(), workers=1),
    }

    backends = kernels.available_backends()
    previous = kernels.BACKEND
    results = {}
    for name in backends:
        kernels.use_backend(name)
        results[name] = {case: best_of(fn, args.repeat if "tune" not in case else 1) for case, fn in cases.items()}
    kernels.use_backend(previous)

    print(f"{n} frames, best of {args.repeat}")
    print(f"{'kernel':<20}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for case in cases:
        row = f"{case:<20}" + "".join(f"{results[b][case] * 1e3:>10.2f}ms" for b in backends)
        if len(backends) > 1:
            row += f"{results['python'][case] / results['cython'][case]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
