"""Benchmark the compiled nonlinearity kernels against the numpy fallback.

The kernels sit in the innermost loop of every solve (pointwise catalog
evaluation over the quadrature grid plus the fused quadrature reduction of
the primitive), so this is the comparison that justifies shipping the
extension.  Run as

    python benchmarks/bench_backends.py [--sizes 4096 65536] [--repeat 200]
"""

import argparse
import time

import numpy as np

from polypass import _codes
from polypass.backend import available_backends

KINDS = [
    ("power", _codes.POWER, np.array([3.0])),
    ("linear", _codes.LINEAR, np.array([1.5])),
    ("linear-minus-power", _codes.LINEAR_MINUS_POWER, np.array([2.0, 0.5])),
    ("iterated-log", _codes.ITERATED_LOG, np.array([1.0, 2.0, 0.0, np.e])),
    ("log-damped-critical", _codes.LOG_DAMPED, np.array([4.0 / 3.0, 1.0])),
    ("oscillating", _codes.OSCILLATING, np.array([2.0, np.e**2 + 1.0])),
]


def _time(fn, repeat):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def bench_kernels(impls, size, repeat):
    rng = np.random.default_rng(0)
    s = np.ascontiguousarray(rng.uniform(-20.0, 20.0, size))
    w = np.ascontiguousarray(rng.uniform(0.5, 1.5, size))
    rows = []
    for name, code, params in KINDS:
        timings = {}
        for bname, impl in impls.items():
            timings[f"f/{bname}"] = _time(lambda: impl.nl_f(code, params, s),
                                          repeat)
            timings[f"fp/{bname}"] = _time(
                lambda: impl.nl_fprime(code, params, s), repeat)
            if code in _codes.CLOSED_F:
                timings[f"sumF/{bname}"] = _time(
                    lambda: impl.sum_F(code, params, s, 1e-3), repeat)
        rows.append((name, timings))
    for bname, impl in impls.items():
        dt = _time(lambda: impl.weighted_dot(s, w, s), repeat)
        rows.append((f"weighted_dot", {f"dot/{bname}": dt}))
    return rows


def bench_solver_gradient(impls, modes, repeat):
    """Whole Riesz-gradient evaluations with each backend patched in."""
    from polypass import Grid, backend, riesz_gradient, SpectralField
    from polypass import power, oscillating
    from polypass.grid import _eigenvalues

    g = Grid(1, modes)
    rng = np.random.default_rng(1)
    lam = np.asarray(_eigenvalues(g, 1))
    u = SpectralField(g, rng.standard_normal(g.mode_shape) / lam)
    out = {}
    saved = (backend.nl_f, backend.nl_F, backend.sum_F, backend.weighted_dot,
             backend.nl_fprime)
    try:
        for bname, impl in impls.items():
            backend.nl_f = impl.nl_f
            backend.nl_F = impl.nl_F
            backend.sum_F = impl.sum_F
            backend.weighted_dot = impl.weighted_dot
            backend.nl_fprime = impl.nl_fprime
            for spec, label in ((power(3.0), "power"),
                                (oscillating(2.0), "oscillating")):
                out[f"grad[{label}]/{bname}"] = _time(
                    lambda: riesz_gradient(u, spec, 1), repeat)
    finally:
        (backend.nl_f, backend.nl_F, backend.sum_F, backend.weighted_dot,
         backend.nl_fprime) = saved
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[4096, 65536])
    parser.add_argument("--repeat", type=int, default=200)
    parser.add_argument("--modes", type=int, default=128,
                        help="spectral size for the gradient benchmark")
    args = parser.parse_args()

    impls = available_backends()
    print(f"backends: {', '.join(impls)}")
    if len(impls) < 2:
        print("compiled extension not importable; nothing to compare")

    for size in args.sizes:
        print(f"\n=== elementwise kernels, n = {size} ===")
        rows = bench_kernels(impls, size, args.repeat)
        for name, timings in rows:
            parts = []
            for key in sorted(timings):
                parts.append(f"{key}: {timings[key] * 1e6:8.1f} us")
            speedups = ""
            if "f/numpy" in timings and "f/cython" in timings:
                speedups = f"   [f speedup {timings['f/numpy'] / timings['f/cython']:.1f}x]"
            print(f"{name:22s} " + "  ".join(parts) + speedups)

    print(f"\n=== riesz gradient, modes = {args.modes} (d = 1) ===")
    grad = bench_solver_gradient(impls, args.modes, max(20, args.repeat // 10))
    for key in sorted(grad):
        print(f"{key:26s} {grad[key] * 1e6:8.1f} us")
    for label in ("power", "oscillating"):
        a, b = f"grad[{label}]/numpy", f"grad[{label}]/cython"
        if a in grad and b in grad:
            print(f"gradient speedup [{label}]: {grad[a] / grad[b]:.2f}x")


if __name__ == "__main__":
    main()
