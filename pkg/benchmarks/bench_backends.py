"""Time the numba kernels against the numpy fallback.

Run with ``python3 benchmarks/bench_backends.py [--repeat N]``.  The backend
is switched through ``CGPKIT_BACKEND`` between runs; results of the two
backends are also compared for agreement.
"""

import argparse
import os
import time

import numpy as np

from cgpkit import _accel


def _problem(k, seed=0):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((k, k))
    C = M @ M.T + k * np.eye(k)
    return C, np.linalg.cholesky(C), rng


def _time(fn, repeat):
    fn()  # warm-up, includes numba compilation
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(k=8, n_points=8192, shifts=25, n_keep=5000):
    C, L, rng = _problem(k)
    b = np.abs(rng.standard_normal(k)) + 0.5
    alpha = np.sqrt(np.array([2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31][: k - 1], dtype=float)) % 1
    sh = rng.random((shifts, k - 1))
    prec = np.linalg.inv(C)
    lower = np.full(k, -0.5)
    x0 = np.zeros(k)
    burn, thin = 200, 2
    U = rng.random((burn + n_keep * thin, k))
    return {
        f"genz_shift_means k={k} n={n_points}x{shifts}":
            lambda: _accel.genz_shift_means(L, b, alpha, sh, n_points),
        f"gibbs_tmvn k={k} keep={n_keep}":
            lambda: _accel.gibbs_tmvn(prec, lower, x0, U, burn, thin, n_keep),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not _accel.HAS_NUMBA:
        print("numba is not importable; only the numpy backend is available")
    results = {}
    for name in ("numpy", "numba") if _accel.HAS_NUMBA else ("numpy",):
        os.environ["CGPKIT_BACKEND"] = name
        for label, fn in cases().items():
            results[(label, name)] = _time(fn, args.repeat)
    os.environ.pop("CGPKIT_BACKEND", None)
    print(f"{'kernel':42s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s} {'max |diff|':>11s}")
    for label in cases():
        t_np, out_np = results[(label, "numpy")]
        if (label, "numba") in results:
            t_nb, out_nb = results[(label, "numba")]
            diff = float(np.max(np.abs(np.asarray(out_np) - np.asarray(out_nb))))
            print(f"{label:42s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f} {diff:11.2e}")
        else:
            print(f"{label:42s} {t_np:10.4f} {'-':>10s}")


if __name__ == "__main__":
    main()
