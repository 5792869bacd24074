"""Compare the numba kernels against the pure numpy/Python fallback.

The implementation is chosen at import time from AUDIENCESIM_NO_NUMBA, so
this script times each variant in a fresh subprocess and prints the
side-by-side.  JIT compilation happens during warmup and is excluded.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import json
import os
import random
import subprocess
import sys
import time


def build_workloads(seed=0):
    import numpy as np

    rng = random.Random(seed)
    np_rng = np.random.default_rng(seed)
    vocab = [f"w{i}" for i in range(400)]
    corpus = [
        " ".join(rng.choice(vocab) for _ in range(rng.randint(15, 30)))
        for _ in range(150)
    ]
    summary = " ".join(rng.choice(vocab) for _ in range(60))
    id_pairs = [
        (
            np_rng.integers(0, 400, size=600).astype(np.int64),
            np_rng.integers(0, 400, size=600).astype(np.int64),
        )
        for _ in range(8)
    ]
    return corpus, summary, id_pairs


def run_worker(repeats):
    from audiencesim.metrics import kernels
    from audiencesim.metrics.diversity import self_bleu
    from audiencesim.metrics.relevance import rouge_l_precision

    corpus, summary, id_pairs = build_workloads()

    def time_best(fn):
        fn()  # warmup; triggers JIT compilation on the numba path
        best = float("inf")
        for _ in range(repeats):
            started = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - started)
        return best

    results = {
        "variant": "numba" if kernels.USE_NUMBA else "fallback",
        "lcs_length_600x600_x8": time_best(
            lambda: [kernels.lcs_length(a, b) for a, b in id_pairs]
        ),
        "self_bleu_150_comments": time_best(lambda: self_bleu(corpus)),
        "rouge_l_150_comments": time_best(
            lambda: [rouge_l_precision(c, summary) for c in corpus]
        ),
    }
    print(json.dumps(results))


def time_variant(no_numba, repeats):
    env = dict(os.environ)
    env["AUDIENCESIM_NO_NUMBA"] = "1" if no_numba else ""
    output = subprocess.run(
        [sys.executable, __file__, "--worker", "--repeats", str(repeats)],
        env=env,
        check=True,
        capture_output=True,
        text=True,
    )
    return json.loads(output.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.worker:
        run_worker(args.repeats)
        return

    fallback = time_variant(no_numba=True, repeats=args.repeats)
    numba = time_variant(no_numba=False, repeats=args.repeats)
    if numba["variant"] != "numba":
        print("numba is not importable here; both rows use the fallback")

    names = [k for k in fallback if k != "variant"]
    width = max(len(n) for n in names)
    print(f"{'benchmark':<{width}}  {'fallback':>10}  {'numba':>10}  {'speedup':>8}")
    for name in names:
        slow, fast = fallback[name], numba[name]
        print(
            f"{name:<{width}}  {slow * 1e3:>8.1f}ms  {fast * 1e3:>8.1f}ms"
            f"  {slow / fast:>7.1f}x"
        )


if __name__ == "__main__":
    main()
