"""Time the numba and pure-numpy paths of each hot kernel.

    python3 benchmarks/bench_kernels.py [--repeat N]

Both paths are imported directly from ``photon_condensate.kernels`` so the
``PHOTON_CONDENSATE_NUMBA`` flag does not matter here. The first numba call
(compilation) is timed separately and excluded from the per-call figure.
"""
import argparse
import time

import numpy as np

from photon_condensate import kernels
from photon_condensate._accel import NUMBA_AVAILABLE


def _time(func, repeat):
    t0 = time.perf_counter()
    func()
    first = time.perf_counter() - t0
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        func()
        best = min(best, time.perf_counter() - t0)
    return first, best


def cases():
    # one condensate curve worth of level sums (x = 0.05 -> 1000 levels)
    mus = -np.logspace(-12, 1, 200)

    def bose(impl):
        return lambda: [impl(0.05, m, 1000) for m in mus]

    samples = np.linspace(0.0, 50.0, 201)

    def rate(impl):
        return lambda: impl(1.0, 0.1, 1.0, 5.0, 0.0, 0.0, samples, 1.0, 1e-10, 1e-12, 100000)

    rng = np.random.default_rng(0)
    psi = rng.standard_normal((256, 256)) + 1j * rng.standard_normal((256, 256))
    pot = rng.random((256, 256))
    damp = np.zeros((256, 256))

    def local(impl):
        return lambda: impl(psi, pot, damp, 1.0, 0.5, 0.1, 1e-3, 1.0)

    yield "bose_sums x200", bose(kernels.bose_sums_numba), bose(kernels.bose_sums_numpy)
    yield ("rate equations t=50", rate(kernels.integrate_rate_equations_numba),
           rate(kernels.integrate_rate_equations_py))
    yield ("gpe local step 256^2", local(kernels.gpe_local_step_numba),
           local(kernels.gpe_local_step_numpy))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not NUMBA_AVAILABLE:
        print("numba is not installed: both columns time the numpy path")
    print(f"{'kernel':<24}{'numba first':>14}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for name, fast, slow in cases():
        first, t_fast = _time(fast, args.repeat)
        _, t_slow = _time(slow, args.repeat)
        print(f"{name:<24}{first:>13.4f}s{t_fast:>11.5f}s{t_slow:>11.5f}s"
              f"{t_slow / t_fast:>9.1f}x")


if __name__ == "__main__":
    main()
