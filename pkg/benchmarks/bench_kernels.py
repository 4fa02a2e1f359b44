"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat N]

The first numba call (compilation or cache load) is reported separately.
"""

import argparse
import time

import numpy as np

from bcsgap import _accel, _kernels
from bcsgap.gap_solver import make_grid
from bcsgap.potentials import angular_rule, make_potential


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    deltas = np.linspace(0.0, 4.0, 2000)
    yield "universal_half (2000 deltas)", lambda nb: _kernels.universal_half(deltas, 0.6, nb)

    k = np.linspace(0.0, 12.0, 200_000)
    for name in ("gaussian3d", "ring2d"):
        pot = make_potential(name)
        c = np.array(pot.coeffs)
        yield f"vhat_array {name} (2e5 points)", \
            lambda nb, pot=pot, c=c: _kernels.vhat_array(pot.kind, c, k, nb)

    p = make_grid(1.0, n_core=128, n_tail=48).nodes
    for name in ("gaussian3d", "ring2d"):
        pot = make_potential(name)
        c = np.array(pot.coeffs)
        cosv, aw = angular_rule(pot.dim, 0, 256)
        yield f"assemble {name} ({p.size}x{p.size}, 256 angles)", \
            lambda nb, pot=pot, c=c, cosv=cosv, aw=aw: _kernels.assemble(
                pot.kind, c, pot.dim, p, p, cosv, aw, True, nb)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed")
    print(f"{'kernel':<42} {'first':>9} {'numba':>9} {'numpy':>9} {'speedup':>8}")
    for label, fn in cases():
        t0 = time.perf_counter()
        a = fn(True)
        first = time.perf_counter() - t0
        b = fn(False)
        scale = max(float(np.max(np.abs(b))), 1e-300)
        if not np.allclose(a, b, rtol=1e-12, atol=1e-14 * scale):
            raise SystemExit(f"{label}: numba and numpy results differ")
        t_nb = best_of(lambda: fn(True), args.repeat)
        t_np = best_of(lambda: fn(False), args.repeat)
        print(f"{label:<42} {first:9.4f} {t_nb:9.4f} {t_np:9.4f} {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
