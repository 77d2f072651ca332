#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Two workloads exercise the hot paths:

* a batch of Luxemburg-norm bisections over random step functions, and
* a detector-style sweep (norm + modular partials at 13 dyadic alphas
  per pair).

Run:

    python benchmarks/bench_backends.py [--cells 128] [--norms 2000] [--pairs 50]

The active default backend follows ORLICZ_BACKEND; this script times both
and reports the agreement between them.  Numba timings exclude the first
(compilation) call.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from orlicz import _kernels
from orlicz.core import power
from orlicz.differential import _Pair
from orlicz.suites import rng_from_seed, unit_pair


def bench_norms(backend: str, values: list, widths: np.ndarray,
                p: float) -> tuple[float, np.ndarray]:
    _kernels.set_backend(backend)
    kern = _kernels.get_backend()
    kern.norm_power(values[0], widths, p)  # compile / warm
    t0 = time.perf_counter()
    out = np.array([kern.norm_power(v, widths, p) for v in values])
    return time.perf_counter() - t0, out


def bench_sweep(backend: str, pairs: list, phi, alphas: np.ndarray) -> tuple[float, float]:
    _kernels.set_backend(backend)
    _kernels.warm_up()
    t0 = time.perf_counter()
    acc = 0.0
    for f, g in pairs:
        pair = _Pair(f, g, phi, checked=True)
        for a in alphas:
            n = pair.norm(a)
            part = pair.f_partials(a, n)
            nprime = -part.alpha / part.eta
            acc += (-part.alphaalpha - 2.0 * part.alphaeta * nprime
                    - part.etaeta * nprime ** 2) / part.eta
    return time.perf_counter() - t0, acc


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--cells", type=int, default=128)
    ap.add_argument("--norms", type=int, default=2000)
    ap.add_argument("--pairs", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = rng_from_seed(args.seed)
    default = _kernels.backend_name()
    backends = list(_kernels.available_backends())
    print(f"backends available: {backends} (default: {default})")

    p = 4.0
    phi = power(p)
    widths = np.full(args.cells, 1.0 / args.cells)
    values = [rng.uniform(-2.0, 2.0, size=args.cells) for _ in range(args.norms)]

    print(f"\n[1] {args.norms} Luxemburg-norm bisections "
          f"({args.cells} cells, p = {p:g})")
    results = {}
    for b in backends:
        dt, out = bench_norms(b, values, widths, p)
        results[b] = (dt, out)
        print(f"    {b:<6} {dt * 1e3:9.1f} ms "
              f"({dt / args.norms * 1e6:7.1f} us/norm)")
    if len(backends) == 2:
        dev = float(np.max(np.abs(results["numba"][1] - results["numpy"][1])))
        ratio = results["numpy"][0] / results["numba"][0]
        print(f"    agreement: max |numba - numpy| = {dev:.3e}; "
              f"numba speedup x{ratio:.1f}")

    alphas = 0.25 * 2.0 ** (-np.arange(13, dtype=np.float64))
    pairs = [unit_pair(rng, phi, "disjoint" if i % 2 == 0 else "overlap",
                       cells=args.cells, signs=True)
             for i in range(args.pairs)]
    print(f"\n[2] detector-style sweep: {args.pairs} pairs x "
          f"{len(alphas)} alphas (norm + partials + curvature)")
    sweep = {}
    for b in backends:
        dt, acc = bench_sweep(b, pairs, phi, alphas)
        sweep[b] = (dt, acc)
        print(f"    {b:<6} {dt * 1e3:9.1f} ms")
    if len(backends) == 2:
        dev = abs(sweep["numba"][1] - sweep["numpy"][1])
        scale = max(1.0, abs(sweep["numpy"][1]))
        ratio = sweep["numpy"][0] / sweep["numba"][0]
        print(f"    agreement: |sum dev| = {dev / scale:.3e} (relative); "
              f"numba speedup x{ratio:.1f}")

    _kernels.set_backend(default)


if __name__ == "__main__":
    main()
