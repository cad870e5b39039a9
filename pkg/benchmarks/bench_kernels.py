"""Compare the compiled and pure-Python kernel backends.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 3] [--trials 2000]

Each kernel is run on the same inputs through both backends; the outputs are
checked for equality and the best-of-``repeat`` wall time is reported.
"""

from __future__ import annotations

import argparse
import sys
import time

from plbc import _pykernels, kernels, sim
from plbc.code import pbch_build, pbch_r0

try:
    from plbc import _kernels
except ImportError:  # extension not built
    _kernels = None


def best_time(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def masking_case(code, trials, u, scheme_code):
    cfg = sim.SimConfig(trials=trials, seed=1, u=u)
    layout = sim.layout_for(code, cfg)
    words = sim.trial_words(cfg.seed, 0, trials, layout)
    g0p, g1p = sim.packed_columns(code)
    zero_thr, zero_all = sim.probability_threshold(0)
    args = (
        g0p, g1p, code.n, code.k, code.d0, scheme_code, u, zero_thr, zero_all, zero_thr, zero_all,
        layout.msg, layout.pos, layout.stuck, layout.data, layout.noise_off, 0, words,
    )
    return lambda impl: impl.masking_trials(*args)


def cases(trials):
    n31 = pbch_build(pbch_r0(31, 5))
    n31_d7 = pbch_build(pbch_r0(31, 7))
    n255 = pbch_build(pbch_r0(255, 21))
    yield (
        "weight_histogram [31,15] code",
        lambda impl: impl.weight_histogram(kernels.pack(n31_d7.G0.rows, 31), 31),
    )
    yield (
        "subset_deficiency_counts n=31 u=6",
        lambda impl: impl.subset_deficiency_counts(kernels.pack(n31.g0_cols, n31.l), 6),
    )
    yield (
        f"masking_trials two-step n=31 u=7 x{trials}",
        masking_case(n31, trials, 7, kernels.SCHEME_TWO_STEP),
    )
    yield (
        f"masking_trials two-step n=255 u=24 x{trials}",
        masking_case(n255, trials, 24, kernels.SCHEME_TWO_STEP),
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--trials", type=int, default=2000)
    args = parser.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; nothing to compare", file=sys.stderr)
        return 1
    print(f"{'kernel':<46}{'python s':>10}{'cython s':>10}{'speedup':>9}")
    for name, run in cases(args.trials):
        t_py, r_py = best_time(lambda: run(_pykernels), args.repeat)
        t_cy, r_cy = best_time(lambda: run(_kernels), args.repeat)
        if not (r_py == r_cy).all():
            print(f"{name}: backends disagree", file=sys.stderr)
            return 1
        print(f"{name:<46}{t_py:>10.4f}{t_cy:>10.4f}{t_py / t_cy:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
