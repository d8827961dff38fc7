"""Compare the compiled kernels against the numpy/scipy fallback.

    python3 benchmarks/bench_backends.py [--n 300] [--p 5000] [--repeats 7]

Times each kernel stage plus an end-to-end rpc_fast call and prints medians
in milliseconds. The compiled column loop is timed both with its own
triangular solve and with the BLAS dtrsm path.
"""

import argparse
import statistics
import time

import numpy as np

from rpcscreen import _backend
from rpcscreen.screening import rpc_fast, standardize


def median_ms(fn, repeats):
    fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return 1e3 * statistics.median(times)


def stages(k, x, y, lam, threads, repeats, use_blas=None):
    n = x.shape[0]
    w = k.gram_upper(x, lam)
    s, _ = k.cholesky_upper(w, 1e-12 * w.diagonal().max())
    theta = k.solve_upper_t(s, y)
    if use_blas is None:
        loop = lambda: k.column_quadratics(s, x, theta, threads)
    else:
        loop = lambda: k.column_quadratics(s, x, theta, threads, use_blas)
    return {
        "gram": median_ms(lambda: k.gram_upper(x, lam), repeats),
        "cholesky": median_ms(lambda: k.cholesky_upper(w, 1e-12), repeats),
        "columns": median_ms(loop, repeats),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--p", type=int, default=5000)
    ap.add_argument("--lam", type=float, default=None, help="default p/n")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--repeats", type=int, default=7)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    r = np.random.default_rng(args.seed)
    data = standardize(r.standard_normal((args.n, args.p)), r.standard_normal(args.n))
    lam = args.lam if args.lam is not None else args.p / args.n
    rows = {}
    variants = [("python", None)]
    if "compiled" in _backend.available_backends():
        variants += [("compiled", False), ("compiled/dtrsm", True)]
    for label, use_blas in variants:
        k = _backend.get_kernels(label.split("/")[0])
        row = stages(k, data.x, data.y_tilde, lam, args.threads, args.repeats, use_blas)
        if use_blas is not True:
            def full():
                fresh = standardize(data.x, data.y_tilde)
                rpc_fast(fresh, lam, threads=args.threads, kernels=k)
            row["rpc_fast"] = median_ms(full, args.repeats)
        rows[label] = row

    print(f"n={args.n} p={args.p} lambda={lam:.4g} threads={args.threads} "
          f"(median of {args.repeats}, ms)")
    cols = ["gram", "cholesky", "columns", "rpc_fast"]
    print(f"{'backend':<16}" + "".join(f"{c:>11}" for c in cols))
    for label, row in rows.items():
        cells = "".join(f"{row[c]:>11.2f}" if c in row else f"{'-':>11}" for c in cols)
        print(f"{label:<16}{cells}")
    if "compiled" in rows:
        print(f"speed-up of compiled rpc_fast: "
              f"{rows['python']['rpc_fast'] / rows['compiled']['rpc_fast']:.2f}x")


if __name__ == "__main__":
    main()
