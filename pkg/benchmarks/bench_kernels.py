"""Compare the compiled kernels with the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``.
"""
import argparse
import time

import numpy as np

from measure_blotto import _fallback
from measure_blotto.kernels import BACKEND

try:
    from measure_blotto import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=20_000, help="profiles per call")
    ap.add_argument("--k", type=int, default=5, help="players")
    ap.add_argument("--m", type=int, default=64, help="grid pieces")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args(argv)

    gen = np.random.default_rng(0)
    vals = gen.exponential(size=(args.n, args.k, args.m))
    vals[:, :, ::7] = 1.0  # force exact ties on some pieces
    masses = np.full(args.m, 1.0 / args.m)
    psi = np.ascontiguousarray(vals[0, 0])
    opp = np.ascontiguousarray(vals[:, 1:])

    impls = {"python": _fallback}
    if _kernels is not None:
        impls["cython"] = _kernels
    print(f"default backend: {BACKEND}; n={args.n} k={args.k} m={args.m}")
    ref = {}
    for name, mod in impls.items():
        tg = best_of(lambda: mod.grid_utilities(vals, masses), args.repeats)
        td = best_of(lambda: mod.deviator_utility(psi, opp, masses), args.repeats)
        out = (mod.grid_utilities(vals, masses), mod.deviator_utility(psi, opp, masses))
        if ref:
            diff = max(np.max(np.abs(a - b)) for a, b in zip(out, ref["out"]))
            print(f"{name:>7}: grid_utilities {tg * 1e3:8.2f} ms  deviator_utility {td * 1e3:8.2f} ms  "
                  f"speedup {ref['tg'] / tg:5.1f}x / {ref['td'] / td:5.1f}x  max diff {diff:.1e}")
        else:
            ref = {"tg": tg, "td": td, "out": out}
            print(f"{name:>7}: grid_utilities {tg * 1e3:8.2f} ms  deviator_utility {td * 1e3:8.2f} ms")


if __name__ == "__main__":
    main()
