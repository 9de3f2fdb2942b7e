"""Compare the compiled and pure-Python quadrature kernels.

    python benchmarks/bench_kernels.py [--repeat N] [--rel-tol T]
"""
import argparse
import statistics
import time

from feigel import _core
from feigel.vacuum import QuadratureConfig, closed_form_coefficient
from feigel.material import MaterialParams


def bench(kernel, cfg, a, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = kernel.polar_integral(a, cfg.kappa_a_max / a, cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions)
        times.append(time.perf_counter() - t0)
    return out, statistics.median(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--rel-tol", type=float, default=1e-9)
    args = ap.parse_args(argv)
    cfg = QuadratureConfig(rel_tol=args.rel_tol)
    ref = closed_form_coefficient(MaterialParams(), 1.0)
    results = {}
    print(f"{'backend':8s} {'median [ms]':>12s} {'n_evals':>9s} {'rel. error':>11s}")
    for name, kernel in sorted(_core.available_backends().items()):
        (yz, zy, err, n, ok), t = bench(kernel, cfg, 1.0, args.repeat)
        coeff = zy / 3.141592653589793**2
        results[name] = t
        print(f"{name:8s} {1e3 * t:12.3f} {n:9d} {abs(coeff / ref - 1):11.2e}")
    if len(results) == 2:
        print(f"speed-up: {results['python'] / results['cython']:.1f}x")


if __name__ == "__main__":
    main()
