"""Spectral analysis of finite models.

Exact kernel dimensions, eigenvalue lists, spectral density step
functions, normalized log-determinants, the density bound
(C + d ln K)/(-ln(lambda/K)), step-sandwich polynomials, and level
envelopes with limsup/liminf queries.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field as _field
from fractions import Fraction

import numpy as np

from . import eigh
from .exactrank import kernel_dimension
from .finitize import FiniteModel

EIG_THRESHOLD = 1e-10


class SpectraError(ValueError):
    pass


# -- exact kernel dimension -----------------------------------------------------

def exact_kernel_dim(model: FiniteModel) -> Fraction:
    """(cols - rank)/N by exact rank; refuses float-tagged models."""
    if not model.exact:
        raise SpectraError(
            "exact rank needs exact coefficients; use density() thresholding instead")
    field = model.field if model.tag == "algebraic" else None
    if model.cyclic_poly is not None:
        z = kernel_dimension(None, field=field, cyclic=model.cyclic_poly,
                             cyclic_order=model.normalization)
        return Fraction(z, model.normalization)
    z = kernel_dimension(None, field=field, sparse=(model.entries, model.shape))
    return Fraction(z, model.normalization)


# -- eigenvalues ------------------------------------------------------------------

def eigenvalues(model: FiniteModel) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian model (floats)."""
    if not model.is_square():
        raise SpectraError("eigenvalues need a square model")
    return eigh.hermitian_eigenvalues(model.to_dense())


def norm_lower_bound(model: FiniteModel, iterations: int = 100, seed: int = 0) -> float:
    """Power-method lower bound for the operator norm of a Hermitian model."""
    a = model.to_dense()
    n = a.shape[0]
    if n == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.normal(size=n)
    if np.iscomplexobj(a):
        v = v + 1j * rng.normal(size=n)
    v /= np.linalg.norm(v)
    best = 0.0
    for _ in range(max(1, iterations)):
        w = a @ v
        nw = float(np.linalg.norm(w))
        best = max(best, nw)
        if nw == 0.0:
            break
        v = w / nw
    return best


# -- spectral density -------------------------------------------------------------

@dataclass
class SpectralDensity:
    """Right-continuous eigenvalue counting function F(x) = #{eig <= x}/N."""

    normalization: int
    blocks: int                      # d: F(inf) = d
    zero_count: int
    zero_exact: bool
    eigs: np.ndarray                 # ascending, with the zero_count smallest pinned to 0

    @staticmethod
    def from_eigenvalues(eigs, normalization: int, blocks: int,
                         zero_count: int | None = None,
                         zero_exact: bool = False) -> "SpectralDensity":
        eigs = np.sort(np.asarray(eigs, dtype=float))
        scale = max(1.0, float(np.max(np.abs(eigs))) if eigs.size else 1.0)
        if zero_count is None:
            zero_count = int(np.sum(np.abs(eigs) <= normalization * scale * EIG_THRESHOLD))
            zero_exact = False
        eigs = eigs.copy()
        eigs[:zero_count] = 0.0
        return SpectralDensity(normalization, blocks, zero_count, zero_exact, eigs)

    def value(self, lam: float) -> float:
        return bisect.bisect_right(self.eigs.tolist(), lam) / self.normalization

    __call__ = value

    def value_exclusive(self, lam: float) -> float:
        """#{eig < lam}/N (left limit)."""
        return bisect.bisect_left(self.eigs.tolist(), lam) / self.normalization

    def kernel_fraction(self) -> Fraction | float:
        if self.zero_exact:
            return Fraction(self.zero_count, self.normalization)
        return self.zero_count / self.normalization

    def jumps(self) -> list[float]:
        return sorted(set(self.eigs.tolist()))

    def count_in(self, lo: float, hi: float) -> int:
        """Number of eigenvalues in the open interval (lo, hi)."""
        e = self.eigs.tolist()
        return bisect.bisect_left(e, hi) - bisect.bisect_right(e, lo)

    def log_det(self) -> tuple[float, bool]:
        """(1/N) sum of ln over the nonzero eigenvalues; flag when empty."""
        nz = self.eigs[self.zero_count:]
        if nz.size == 0:
            return 0.0, True
        if float(nz[0]) <= 0.0:
            raise SpectraError("positive part of the spectrum contains a nonpositive value; "
                               "zero multiplicity too small?")
        return float(np.sum(np.log(nz)) / self.normalization), False

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("lambda,F\n")
            for lam in self.jumps():
                fh.write(f"{lam:.12e},{self.value(lam):.12e}\n")


def density(model: FiniteModel, zero_count: int | None = None,
            zero_exact: bool | None = None) -> SpectralDensity:
    """Spectral density of a PSD Hermitian model.

    The zero multiplicity comes from exact rank whenever the model is
    exact; floating-point thresholding is used otherwise and flagged via
    ``zero_exact=False``.
    """
    eigs = eigenvalues(model)
    scale = max(1.0, float(np.max(np.abs(eigs))) if eigs.size else 1.0)
    if eigs.size and float(eigs[0]) < -1e-9 * scale:
        raise SpectraError(f"model is not positive semidefinite (min eigenvalue {eigs[0]:g})")
    if zero_count is None:
        if model.exact:
            zero_count = int(exact_kernel_dim(model) * model.normalization)
            zero_exact = True
        else:
            zero_count = int(np.sum(np.abs(eigs) <= model.dim * scale * EIG_THRESHOLD))
            zero_exact = False
    eigs = np.clip(eigs, 0.0, None)
    d = model.block_shape[1]
    return SpectralDensity.from_eigenvalues(eigs, model.normalization, d,
                                            zero_count, bool(zero_exact))


def log_det(model: FiniteModel) -> float:
    """Normalized log-determinant of a PSD model (zeros dropped exactly)."""
    return density(model).log_det()[0]


# -- the density bound -------------------------------------------------------------

def density_bound(lam: float, norm_bound: float, blocks: int, det_bound: float = 0.0) -> float:
    """(C + d ln K)/(-ln(lambda/K)) for 0 < lambda < K, K >= 1."""
    if not (0 < lam < norm_bound):
        raise SpectraError("need 0 < lambda < K")
    if norm_bound < 1.0:
        raise SpectraError("need K >= 1")
    return (det_bound + blocks * math.log(norm_bound)) / (-math.log(lam / norm_bound))


# -- step sandwich polynomials -----------------------------------------------------

@dataclass
class SandwichPolynomial:
    """Polynomial wedged between the step at lam and its 1/n relaxation on [0, K]."""

    lam: float
    n_requested: int
    n_achieved: int
    upper: float                     # K
    cheb_coeffs: np.ndarray          # Chebyshev basis on [0, K]
    certificate: dict

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        t = 2.0 * x / self.upper - 1.0
        return np.polynomial.chebyshev.chebval(t, self.cheb_coeffs)

    @property
    def degree(self) -> int:
        return len(self.cheb_coeffs) - 1

    def lower_ok(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        p = self(x)
        chi = (x <= self.lam).astype(float)
        return bool(np.all(p >= chi))

    def upper_ok(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        p = self(x)
        bound = 1.0 / self.n_achieved + (x <= self.lam + 1.0 / self.n_achieved).astype(float)
        return bool(np.all(p <= bound))


def _cheb_fit(fvals: np.ndarray) -> np.ndarray:
    m = fvals.size - 1
    k = np.arange(m + 1)
    theta = np.pi * k / m
    coeffs = np.zeros(m + 1)
    for j in range(m + 1):
        w = np.ones(m + 1)
        w[0] = w[-1] = 0.5
        coeffs[j] = (2.0 / m) * np.sum(w * fvals * np.cos(j * theta))
    coeffs[0] *= 0.5
    coeffs[-1] *= 0.5 if m > 0 else 1.0
    return coeffs


def sandwich_poly(lam: float, n: int, upper: float, witnesses=(),
                  grid_size: int = 10_001, max_degree: int = 4096) -> SandwichPolynomial:
    """Construct p with chi_[0,lam] <= p <= (1/n) chi_[0,K] + chi_[0,lam+1/n] on [0,K].

    A Chebyshev interpolant of the half-step ramp is corrected by the
    constant needed to dominate the step, then certified with zero
    tolerance on a uniform grid (plus any witness points).  When the
    requested n is out of reach at the degree cap, the largest achievable
    n' < n is returned with its certificate.
    """
    if n < 1:
        raise SpectraError("n must be >= 1")
    K = float(upper)
    if K <= 0:
        raise SpectraError("K must be positive")
    for n_try in range(n, 0, -1):
        poly = _try_sandwich(lam, n_try, K, witnesses, grid_size, max_degree)
        if poly is not None:
            poly.n_requested = n
            return poly
    raise SpectraError("sandwich construction failed even for n = 1")


def _try_sandwich(lam, n, K, witnesses, grid_size, max_degree):
    grid = np.linspace(0.0, K, grid_size)
    extra = [x for x in (lam, lam + 1.0 / n, np.nextafter(lam, K),
                         np.nextafter(lam + 1.0 / n, K)) if 0.0 <= x <= K]
    checkpoints = np.unique(np.concatenate([grid, np.asarray(extra, dtype=float),
                                            np.asarray(list(witnesses), dtype=float)]))
    if lam >= K or n == 1:
        coeffs = np.array([1.0])
        poly = SandwichPolynomial(lam, n, n, K, coeffs,
                                  {"grid": len(checkpoints), "margin": 1.0 / n if n > 1 else 0.0,
                                   "degree": 0})
        if poly.lower_ok(checkpoints) and poly.upper_ok(checkpoints):
            return poly
        return None

    a = lam + 1.0 / n
    half = 0.5 / n

    def ramp(x):
        x = np.asarray(x, dtype=float)
        t = np.clip((a - x) / (a - lam) if a > lam else 0.0, 0.0, 1.0)
        return half + t

    degree = 64
    while degree <= max_degree:
        nodes = 0.5 * K * (1.0 + np.cos(np.pi * np.arange(degree + 1) / degree))
        coeffs = _cheb_fit(ramp(nodes[::-1])[::-1])
        poly = SandwichPolynomial(lam, n, n, K, coeffs, {})
        err = float(np.max(np.abs(poly(checkpoints) - ramp(checkpoints))))
        if err < half * 0.98:
            # lift to dominate the step exactly, then re-check the roof
            low_pts = checkpoints[checkpoints <= lam]
            lift = 0.0
            if low_pts.size:
                lift = max(0.0, float(np.max(1.0 - poly(low_pts)))) * (1 + 1e-12) + 1e-15
            coeffs = coeffs.copy()
            coeffs[0] += lift
            poly = SandwichPolynomial(lam, n, n, K, coeffs,
                                      {"grid": int(len(checkpoints)), "degree": int(degree),
                                       "interp_error": err, "lift": lift})
            if poly.lower_ok(checkpoints) and poly.upper_ok(checkpoints):
                margin = float(np.min(
                    (1.0 / n + (checkpoints <= a).astype(float)) - poly(checkpoints)))
                poly.certificate["margin"] = margin
                return poly
        degree *= 2
    return None


def check_sandwich_conclusion(dens: SpectralDensity, poly: SandwichPolynomial):
    """F(lam) <= tr p(M)/N <= d/n + F(lam + 1/n), evaluated on the step data."""
    n = poly.n_achieved
    tr = float(np.sum(poly(dens.eigs))) / dens.normalization
    left = dens.value(poly.lam)
    right = dens.blocks / n + dens.value(poly.lam + 1.0 / n)
    return left, tr, right


# -- envelopes ----------------------------------------------------------------------

@dataclass
class DensityEnvelope:
    """Family of level densities with limsup/liminf queries over the tail."""

    levels: list[SpectralDensity]
    tail: int = 0                    # number of trailing levels used; 0 = half

    def __post_init__(self):
        if len(self.levels) < 2:
            raise SpectraError("an envelope needs at least two levels")
        if self.tail <= 0:
            self.tail = max(1, len(self.levels) // 2)

    def _tail(self) -> list[SpectralDensity]:
        return self.levels[len(self.levels) - self.tail:]

    def values(self, lam: float) -> list[float]:
        return [d.value(lam) for d in self.levels]

    def limsup(self, lam: float) -> float:
        return max(d.value(lam) for d in self._tail())

    def liminf(self, lam: float) -> float:
        return min(d.value(lam) for d in self._tail())

    def limsup_right(self, lam: float) -> float:
        """Right limit of the limsup envelope at lam."""
        nxt = self._next_jump(lam)
        return self.limsup(lam if nxt is None else 0.5 * (lam + nxt))

    def liminf_right(self, lam: float) -> float:
        nxt = self._next_jump(lam)
        return self.liminf(lam if nxt is None else 0.5 * (lam + nxt))

    def _next_jump(self, lam: float) -> float | None:
        candidates = []
        for d in self._tail():
            e = d.eigs.tolist()
            k = bisect.bisect_right(e, lam)
            if k < len(e):
                candidates.append(e[k])
        return min(candidates) if candidates else None

    def gap_is_empty(self, lo: float, hi: float) -> bool:
        """No level spectrum intersects the open interval (lo, hi)."""
        return all(d.count_in(lo, hi) == 0 for d in self.levels)
