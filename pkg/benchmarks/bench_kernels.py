"""Timing of the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--samples 20000] [--states 8] [--length 40] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from mpabridge import _backend
from mpabridge.bridge import backward_table
from mpabridge.oracle import random_mixture


def best_time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--states", type=int, default=8)
    ap.add_argument("--letters", type=int, default=3)
    ap.add_argument("--length", type=int, default=40)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    mix = random_mixture(rng, args.letters, args.states, args.length, zero_frac=0.2)
    br = mix.bridge
    table = backward_table(br)
    init = br.g * table.hhat[0]
    u_path = rng.random((args.samples, br.length))
    u_letter = rng.random((args.samples, mix.N))
    mats = br.P[None] * np.moveaxis(mix.kernel.probs, 2, 0)
    words = rng.integers(0, args.letters, size=(args.samples, mix.N))

    paths = _backend.sample_bridge(br.P, table.hhat, init, u_path)
    cases = {
        "sample_bridge": lambda: _backend.sample_bridge(br.P, table.hhat, init, u_path),
        "sample_letters": lambda: _backend.sample_letters(mix.kernel.probs, paths, u_letter),
        "word_log_weights": lambda: _backend.word_log_weights(mats, br.g, br.f, words),
    }
    backends = _backend.available()
    print(f"samples={args.samples} states={args.states} letters={args.letters} length={args.length}")
    print("kernel,backend,seconds,speedup_vs_python")
    for name, fn in cases.items():
        times = {}
        for b in backends:
            with _backend.using(b):
                times[b] = best_time(fn, args.repeat)
        for b in backends:
            print(f"{name},{b},{times[b]:.6f},{times['python'] / times[b]:.2f}")
    if "cython" in backends:
        with _backend.using("python"):
            ref = cases["sample_bridge"]()
        with _backend.using("cython"):
            same = np.array_equal(ref, cases["sample_bridge"]())
        print(f"identical_bridge_samples,{same}")


if __name__ == "__main__":
    main()
