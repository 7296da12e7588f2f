#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Runs each workload twice, in subprocesses: once with the default backend
selection (the compiled extension when built) and once with
VCKIT_PURE_PYTHON=1. Reports best-of-N wall times and the speedup.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _best_of(fn, repeat: int) -> float:
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _child(repeat: int) -> None:
    from vckit.dsp import SAMPLE_RATE, Waveform, psdr_shift, resample
    from vckit.kernels import BACKEND, overlap_add

    t = np.arange(3 * SAMPLE_RATE) / SAMPLE_RATE
    tone = Waveform(0.5 * np.sin(2 * np.pi * 220.0 * t), SAMPLE_RATE)
    ratio = 2.0 ** (3 / 12)
    rng = np.random.default_rng(0)
    frames = rng.standard_normal((1000, 1024))
    out_len = 999 * 256 + 1024

    results = {
        "resample 3 s, ratio 1.189": _best_of(
            lambda: resample(tone, ratio), repeat
        ),
        "overlap_add 1000 x 1024": _best_of(
            lambda: overlap_add(frames, 256, out_len), repeat
        ),
        "psdr_shift 3 s, s=+3": _best_of(
            lambda: psdr_shift(tone, 3), repeat
        ),
    }
    json.dump({"backend": BACKEND, "results": results}, sys.stdout)


def _spawn(pure: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("VCKIT_PURE_PYTHON", None)
    if pure:
        env["VCKIT_PURE_PYTHON"] = "1"
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--child",
         "--repeat", str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5,
                        help="timed repetitions per workload (best is kept)")
    parser.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.child:
        _child(args.repeat)
        return 0

    fast = _spawn(pure=False, repeat=args.repeat)
    slow = _spawn(pure=True, repeat=args.repeat)
    if fast["backend"] == "numpy":
        print("note: compiled extension not built; comparing numpy to itself")

    width = max(len(k) for k in fast["results"])
    print(f"{'workload':<{width}}  {fast['backend']:>10}  "
          f"{slow['backend'] + ' (pure)':>12}  speedup")
    for name, t_fast in fast["results"].items():
        t_slow = slow["results"][name]
        print(f"{name:<{width}}  {t_fast * 1e3:8.2f} ms  "
              f"{t_slow * 1e3:10.2f} ms  {t_slow / t_fast:6.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
