# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernel: real-symmetric eigenvalues.

Householder reduction to tridiagonal form followed by the implicit-shift
QL iteration, eigenvalues only.  The Python wrapper (`l2approx.eigh`)
owns validation, the complex-Hermitian embedding, and the pure-Python
fallback with the same contract.
"""

from libc.math cimport fabs, sqrt, hypot


def tridiagonalize(double[:, ::1] a, double[::1] d, double[::1] e):
    """In-place Householder reduction of symmetric a; fills d (diag) and e (offdiag).

    e[0] is unused padding; e[i] couples rows i-1 and i.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j, k, l
    cdef double scale, h, f, g, hh
    for i in range(n - 1, 0, -1):
        l = i - 1
        h = 0.0
        scale = 0.0
        if l > 0:
            for k in range(i):
                scale += fabs(a[i, k])
            if scale == 0.0:
                e[i] = a[i, l]
            else:
                for k in range(i):
                    a[i, k] /= scale
                    h += a[i, k] * a[i, k]
                f = a[i, l]
                g = -sqrt(h) if f >= 0.0 else sqrt(h)
                e[i] = scale * g
                h -= f * g
                a[i, l] = f - g
                f = 0.0
                for j in range(i):
                    g = 0.0
                    for k in range(j + 1):
                        g += a[j, k] * a[i, k]
                    for k in range(j + 1, i):
                        g += a[k, j] * a[i, k]
                    e[j] = g / h
                    f += e[j] * a[i, j]
                hh = f / (h + h)
                for j in range(i):
                    f = a[i, j]
                    e[j] = g = e[j] - hh * f
                    for k in range(j + 1):
                        a[j, k] -= f * e[k] + g * a[i, k]
        else:
            e[i] = a[i, l]
        d[i] = h
    e[0] = 0.0
    for i in range(n):
        d[i] = a[i, i]


def ql_implicit(double[::1] d, double[::1] e, int max_sweeps=64):
    """Implicit-shift QL on a symmetric tridiagonal (d, e); d becomes eigenvalues.

    e[i] couples rows i-1 and i (e[0] unused).  Raises RuntimeError when a
    diagonal entry fails to converge.
    """
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i, l, m
    cdef int iters
    cdef double dd, g, r, s, c, p, f, b
    if n == 0:
        return
    for i in range(1, n):
        e[i - 1] = e[i]
    e[n - 1] = 0.0
    for l in range(n):
        iters = 0
        while True:
            m = l
            while m < n - 1:
                dd = fabs(d[m]) + fabs(d[m + 1])
                if fabs(e[m]) <= 2.3e-16 * dd:
                    break
                m += 1
            if m == l:
                break
            iters += 1
            if iters > max_sweeps:
                raise RuntimeError("QL iteration failed to converge")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
