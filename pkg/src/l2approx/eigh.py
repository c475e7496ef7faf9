"""Hermitian eigensolver facade: compiled kernel with pure-Python fallback.

The backend is chosen once at import: the Cython extension when its
build succeeded, else the numpy-assisted pure-Python implementation of
the identical algorithm.  Complex Hermitian input is handled through the
standard 2m x 2m real-symmetric embedding with de-duplicated pairs.
"""

from __future__ import annotations

import numpy as np

try:
    from . import _eigh_kernel as _backend
    BACKEND = "compiled"
except ImportError:                      # pure fallback
    from . import _eigh_python as _backend
    BACKEND = "python"

from . import _eigh_python as _python_backend


def backend_name() -> str:
    return BACKEND


class EigenError(ValueError):
    pass


def _symmetric_eigenvalues_with(backend, a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    if n == 0:
        return np.zeros(0)
    work = np.array(a, dtype=np.float64, order="C", copy=True)
    d = np.zeros(n)
    e = np.zeros(n)
    backend.tridiagonalize(work, d, e)
    backend.ql_implicit(d, e)
    d.sort()
    return d


def symmetric_eigenvalues(a: np.ndarray, backend=None) -> np.ndarray:
    """Ascending eigenvalues of a real symmetric matrix."""
    b = _backend if backend is None else (
        _python_backend if backend == "python" else _backend)
    return _symmetric_eigenvalues_with(b, a)


def hermitian_eigenvalues(a: np.ndarray, backend=None) -> np.ndarray:
    """Ascending eigenvalues of a real-symmetric or complex Hermitian matrix.

    Symmetry is validated to 1e-12 * max|entry|; complex matrices go
    through the doubled real-symmetric embedding [[A, -B], [B, A]].
    """
    a = np.asarray(a)
    n = a.shape[0]
    if a.shape != (n, n):
        raise EigenError("matrix must be square")
    if n and not np.all(np.isfinite(a)):
        raise EigenError("matrix contains non-finite entries")
    scale = float(np.max(np.abs(a))) if n else 0.0
    if float(np.max(np.abs(a - a.conj().T))) > 1e-12 * max(scale, 1.0):
        raise EigenError("matrix is not Hermitian within tolerance")
    a = 0.5 * (a + a.conj().T)
    if not np.iscomplexobj(a) or np.all(a.imag == 0.0):
        return symmetric_eigenvalues(a.real.astype(np.float64), backend)
    re, im = a.real, a.imag
    big = np.block([[re, -im], [im, re]])
    doubled = symmetric_eigenvalues(big, backend)
    return 0.5 * (doubled[0::2] + doubled[1::2])
