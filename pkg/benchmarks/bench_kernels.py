"""Benchmark the compiled kernels against the numpy fallback.

Times the two hot inner loops -- the causal fractional convolution and the
companion-matrix RK4 stepper -- plus one end-to-end response through each
backend.  Run from the repository root:

    python benchmarks/bench_kernels.py [--sizes 1000,4000,16000]
"""

import argparse
import os
import time

import numpy as np


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_frac_conv(backends, sizes):
    print("\nfrac_conv (direct O(N^2) causal convolution, complex)")
    print(f"{'N':>8} " + " ".join(f"{name:>12}" for name, _ in backends) + f" {'speedup':>9}")
    rng = np.random.default_rng(0)
    for n in sizes:
        c = rng.normal(size=n) + 1j * rng.normal(size=n)
        d = rng.normal(size=n) + 1j * rng.normal(size=n)
        f = rng.normal(size=n) + 1j * rng.normal(size=n)
        times = [_time(lambda m=mod: m.frac_conv(c, d, f)) for _, mod in backends]
        ratio = times[0] / times[-1] if len(times) > 1 else float("nan")
        print(f"{n:>8} " + " ".join(f"{t * 1e3:>10.2f}ms" for t in times) + f" {ratio:>8.1f}x")


def bench_rk4(backends, sizes):
    print("\nrk4_companion (order-6 system, 4 substeps)")
    print(f"{'N':>8} " + " ".join(f"{name:>12}" for name, _ in backends) + f" {'speedup':>9}")
    coeffs = np.poly1d(np.convolve(np.convolve([1, 0.2, 1.01], [1, 0.2, 1.01]),
                                   [1, 0.2, 1.01])).coeffs[::-1][:-1]
    for n in sizes:
        t = 0.01 * np.arange(n)
        u = np.sin(t) * np.exp(-t / 50)
        times = [_time(lambda m=mod: m.rk4_companion(coeffs, u, 0.01, 4)) for _, mod in backends]
        ratio = times[0] / times[-1] if len(times) > 1 else float("nan")
        print(f"{n:>8} " + " ".join(f"{t_ * 1e3:>10.2f}ms" for t_ in times) + f" {ratio:>8.1f}x")


def bench_end_to_end(sizes):
    from gef.core import Domain, FilterParams, SampledSignal
    from gef.fractional_integral import default_imag_tol, gef_response_integral

    print("\ngef_response_integral, method='direct' (two kernel passes)")
    params = FilterParams(0.1, 1.0, B_u="5/2")
    for n in sizes:
        step = 60.0 / n
        t = step * np.arange(n)
        u = SampledSignal(np.sin(t) * np.exp(-t / 30), step, Domain.SCALED_TIME)
        results = {}
        for backend in ("python", "cython"):
            os.environ["GEF_BACKEND"] = backend
            import importlib

            import gef.fractional_integral
            import gef.numerics
            importlib.reload(gef.numerics)
            importlib.reload(gef.fractional_integral)
            fn = gef.fractional_integral.gef_response_integral
            try:
                results[backend] = _time(
                    lambda: fn(params, u, method="direct", imag_tol=default_imag_tol(step)),
                    repeats=2)
            except ImportError:
                results[backend] = float("nan")
        os.environ.pop("GEF_BACKEND", None)
        ratio = results["python"] / results["cython"]
        print(f"N={n:>6}: python {results['python'] * 1e3:8.1f}ms   "
              f"cython {results['cython'] * 1e3:8.1f}ms   {ratio:5.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="1000,4000,16000")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    from gef.numerics import pykernels
    backends = [("python", pykernels)]
    try:
        from gef.numerics import cykernels
        backends.append(("cython", cykernels))
    except ImportError:
        print("compiled extension not available; timing the fallback only")

    bench_frac_conv(backends, sizes)
    bench_rk4(backends, sizes)
    if len(backends) == 2:
        bench_end_to_end(sizes)


if __name__ == "__main__":
    main()
