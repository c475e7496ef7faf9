"""Pure-Python backend for the symmetric eigensolver.

Same algorithm as the compiled kernel (Householder tridiagonalization +
implicit-shift QL, eigenvalues only), with the O(n^3) tridiagonalization
vectorized through numpy.  Selected automatically when the compiled
module is unavailable; expect roughly an order of magnitude slowdown on
the QL stage for large matrices.
"""

from __future__ import annotations

import math

import numpy as np


def tridiagonalize(a: np.ndarray, d: np.ndarray, e: np.ndarray) -> None:
    """In-place Householder reduction; fills d (diagonal) and e (e[i] couples i-1,i)."""
    n = a.shape[0]
    for i in range(n - 1, 0, -1):
        l = i - 1
        if l > 0:
            row = a[i, :i]
            scale = float(np.sum(np.abs(row)))
            if scale == 0.0:
                e[i] = a[i, l]
            else:
                row /= scale
                h = float(row @ row)
                f = row[l]
                g = -math.sqrt(h) if f >= 0.0 else math.sqrt(h)
                e[i] = scale * g
                h -= f * g
                row[l] = f - g
                sub = a[:i, :i]
                # p = A_sub . u / h  using the stored lower triangle
                lower = np.tril(sub)
                sym = lower + lower.T - np.diag(np.diag(sub))
                p = (sym @ row) / h
                k = float(row @ p) / (2.0 * h)
                q = p - k * row
                sub -= np.outer(q, row) + np.outer(row, q)
        else:
            e[i] = a[i, l]
    e[0] = 0.0
    d[:] = np.diag(a)


def ql_implicit(d: np.ndarray, e: np.ndarray, max_sweeps: int = 64) -> None:
    """Implicit-shift QL on the tridiagonal (d, e); d becomes the eigenvalues."""
    n = d.shape[0]
    if n == 0:
        return
    e[:-1] = e[1:]
    e[-1] = 0.0
    eps = 2.3e-16
    for l in range(n):
        iters = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            iters += 1
            if iters > max_sweeps:
                raise RuntimeError("QL iteration failed to converge")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = c = 1.0
            p = 0.0
            broke = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    broke = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            if not broke:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
