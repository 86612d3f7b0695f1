#!/usr/bin/env python3
"""Time the compiled rank-statistics kernels against the pure-Python twins.

Generates seeded score vectors (with ties), turns them into paired rank
vectors the same way the public API does, and reports per-call timings for
each kernel in both implementations.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 10,100,1000] [--repeats 200] [--seed 7]
"""

import argparse
import random
import statistics
import sys
import time

from gridfact import Ranking
from gridfact import _kernels_py


def load_compiled():
    try:
        from gridfact import _kernels
    except ImportError:
        return None
    return _kernels


def make_case(rng: random.Random, n: int):
    ids = [f"v{i}" for i in range(n)]

    def scores():
        vals = []
        for _ in range(n):
            if vals and rng.random() < 0.3:
                vals.append(rng.choice(vals))
            else:
                vals.append(round(rng.uniform(0.0, 5.0), 3))
        return vals

    a = Ranking.from_scores(ids, scores())
    b = Ranking.from_scores(ids, scores())
    ra = a.rank_vector()
    rb_map = b.ranks_by_id()
    rb = [rb_map[item] for item in a.items]
    pos_b = {item: i for i, item in enumerate(b.items)}
    pos = [pos_b[item] for item in a.items]
    return ra, rb, pos, list(a.scores)


def time_call(fn, args, repeats: int) -> float:
    """Median seconds per call over `repeats` timed calls."""
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="10,100,1000",
                        help="comma-separated ranking sizes")
    parser.add_argument("--repeats", type=int, default=200,
                        help="timed calls per measurement")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)

    compiled = load_compiled()
    if compiled is None:
        print("compiled extension not available; timing the pure kernels only",
              file=sys.stderr)

    sizes = [int(s) for s in args.sizes.split(",") if s]
    rng = random.Random(args.seed)

    header = f"{'kernel':<18} {'n':>6} {'pure (us)':>12}"
    if compiled:
        header += f" {'compiled (us)':>14} {'speedup':>8}"
    print(header)
    print("-" * len(header))

    for n in sizes:
        ra, rb, pos, scores = make_case(rng, n)
        kernels = [
            ("rho", (ra, rb)),
            ("tau_b", (ra, rb)),
            ("weighted_tau", (ra, rb)),
            ("footrule_sum", (ra, rb)),
            ("tie_pair_fraction", (scores,)),
            ("rbo_ext", (pos, 0.9)),
        ]
        for name, call_args in kernels:
            pure_s = time_call(getattr(_kernels_py, name), call_args, args.repeats)
            line = f"{name:<18} {n:>6} {pure_s * 1e6:>12.2f}"
            if compiled:
                comp_s = time_call(getattr(compiled, name), call_args, args.repeats)
                ratio = pure_s / comp_s if comp_s > 0 else float("inf")
                line += f" {comp_s * 1e6:>14.2f} {ratio:>7.1f}x"
            print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
