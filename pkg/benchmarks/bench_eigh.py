#!/usr/bin/env python3
"""Benchmark the compiled eigensolver kernel against the pure-Python backend.

The workloads are the matrices the library actually spends its time on:
dense symmetric spectral squares of circulant and box-compression models.

    python benchmarks/bench_eigh.py [--sizes 200,500,1000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from l2approx import eigh


def circulant_laplacian(n: int) -> np.ndarray:
    a = 2.0 * np.eye(n)
    idx = np.arange(n)
    a[idx, (idx + 1) % n] = -1.0
    a[idx, (idx - 1) % n] = -1.0
    return a


def grid_laplacian(side: int) -> np.ndarray:
    n = side * side
    a = 4.0 * np.eye(n)
    for i in range(side):
        for j in range(side):
            p = i * side + j
            for di, dj in ((0, 1), (0, -1), (1, 0), (-1, 0)):
                ii, jj = i + di, j + dj
                if 0 <= ii < side and 0 <= jj < side:
                    a[p, ii * side + jj] = -1.0
    return a


def bench_one(matrix: np.ndarray, backend: str, repeat: int) -> tuple[float, np.ndarray]:
    best = float("inf")
    vals = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        vals = eigh.symmetric_eigenvalues(matrix, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, vals


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="200,500,1000,2000")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--python-cap", type=int, default=1200,
                    help="skip the pure backend above this size")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = ["python"]
    if eigh.backend_name() == "compiled":
        backends.insert(0, "compiled")
    else:
        print("note: compiled kernel unavailable; timing the fallback only")

    print(f"{'workload':>24} {'n':>6} " + "".join(f"{b:>12}" for b in backends)
          + f"{'speedup':>10}{'max |diff|':>12}")
    for n in sizes:
        for name, mat in (("circulant laplacian", circulant_laplacian(n)),
                          ("grid laplacian", grid_laplacian(max(2, int(n ** 0.5))))):
            times = {}
            results = {}
            for b in backends:
                if b == "python" and mat.shape[0] > args.python_cap:
                    times[b] = float("nan")
                    continue
                times[b], results[b] = bench_one(mat, b, args.repeat)
            cols = "".join(f"{times[b]:>11.3f}s" if times[b] == times[b] else
                           f"{'skipped':>12}" for b in backends)
            if len(results) == 2:
                diff = float(np.max(np.abs(results["compiled"] - results["python"])))
                speed = times["python"] / times["compiled"]
                print(f"{name:>24} {mat.shape[0]:>6} {cols}{speed:>9.1f}x{diff:>12.2e}")
            else:
                print(f"{name:>24} {mat.shape[0]:>6} {cols}{'':>10}{'':>12}")


if __name__ == "__main__":
    main()
