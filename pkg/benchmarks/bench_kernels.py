"""Row reduction over GF(p): numba kernel against the pure numpy fallback.

Also times one end-to-end stable End computation with whichever backend the
environment selects (set BRAUER_UDR_DISABLE_NUMBA=1 to force numpy).

    python3 benchmarks/bench_kernels.py [--sizes 32 64 128] [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from brauer_udr import _kernels
from brauer_udr.homalg import stable_end_dim
from brauer_udr.repbuild import parse_module_spec


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[32, 64, 128, 256])
    ap.add_argument("--prime", type=int, default=7)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    p = args.prime
    print(f"backend: {_kernels.BACKEND}")
    print(f"{'n':>6} {'numpy (s)':>12} {'numba (s)':>12} {'speedup':>8}")
    for n in args.sizes:
        A = rng.integers(0, p, (n, n + n // 2))
        t_np = best_of(lambda: _kernels.rref_numpy(A, p), args.repeat)
        if _kernels.HAVE_NUMBA:
            _kernels.rref_jit(A, p)  # compile outside the timed region
            R1, piv1 = _kernels.rref_numpy(A, p)
            R2, piv2 = _kernels.rref_jit(A, p)
            assert np.array_equal(R1, R2) and np.array_equal(piv1, piv2)
            t_jit = best_of(lambda: _kernels.rref_jit(A, p), args.repeat)
            print(f"{n:>6} {t_np:>12.5f} {t_jit:>12.5f} {t_np / t_jit:>8.1f}")
        else:
            print(f"{n:>6} {t_np:>12.5f} {'-':>12} {'-':>8}")

    for spec, e in (("band:3,2", 3), ("str:a1*a3*a2*a1*a3", 3), ("S(4)", 4)):
        M = parse_module_spec(spec, e, p)
        stable_end_dim(M)  # warm caches and jit
        t = best_of(lambda: stable_end_dim(M), args.repeat)
        print(f"stable End of {spec} (e={e}, dim {M.total_dim}): {t:.4f} s")


if __name__ == "__main__":
    main()
