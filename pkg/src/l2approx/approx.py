"""Approximation pipelines and executable inequality checks.

Given a group-ring matrix B and a finitization scheme (quotient chain or
Folner exhaustion), the runner forms the spectral square Delta = B* B,
realizes each level, and records exact kernel dimensions, normalized
log-determinants, level kappas, and Folner error terms.  On top of the
runs sit the integrality verdict, the determinant lower bound, Galois
continuity of kernel dimensions, spectrum-gap witnesses, and the
Liouville eigenvalue-exclusion certificate.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as _field
from fractions import Fraction

import numpy as np

from .finitize import FiniteModel, amenable_error_term, folner_model, quotient_model
from .groupring import GroupRingMatrix, clear_matrix_denominators
from .groups import FolnerExhaustion, QuotientChain, build_folner
from .spectra import (DensityEnvelope, SpectralDensity, density, exact_kernel_dim,
                      eigenvalues)

DEFAULT_TOL = Fraction(1, 1000)


class ApproxError(ValueError):
    pass


@dataclass
class LevelRecord:
    level: int
    normalization: int
    dim_kernel: Fraction
    log_det: float | None
    kappa_level: float
    error_term: Fraction | None
    seconds: float
    density: SpectralDensity | None = None
    dim_exact: bool = True

    def as_json(self) -> dict:
        return {
            "level": self.level, "N": self.normalization,
            "dim": str(self.dim_kernel), "dim_float": float(self.dim_kernel),
            "logdet": None if self.log_det is None else self.log_det,
            "kappa": self.kappa_level,
            "error_term": None if self.error_term is None else str(self.error_term),
            "seconds": round(self.seconds, 6),
            "provenance": "exact" if self.dim_exact else "float-threshold",
        }


@dataclass
class ApproximationRun:
    matrix_hash: str
    scheme: str                       # "quotient" | "folner"
    levels: list[LevelRecord]
    declared_limit: Fraction | float | None = None
    kappa_source: float = 0.0

    def last_dim(self) -> Fraction:
        return self.levels[-1].dim_kernel

    def cauchy_delta(self) -> Fraction:
        if len(self.levels) < 2:
            return Fraction(0)
        return abs(self.levels[-1].dim_kernel - self.levels[-2].dim_kernel)

    def tail_bound(self) -> Fraction:
        return Fraction(1, self.levels[-1].normalization)

    def converged(self, tol: Fraction = DEFAULT_TOL) -> bool:
        return len(self.levels) >= 2 and self.cauchy_delta() <= tol \
            and self.tail_bound() <= tol

    def dims(self) -> list[Fraction]:
        return [r.dim_kernel for r in self.levels]

    def limsup_dim(self, tail: int = 0) -> Fraction:
        t = tail or max(1, len(self.levels) // 2)
        return max(r.dim_kernel for r in self.levels[-t:])

    def liminf_dim(self, tail: int = 0) -> Fraction:
        t = tail or max(1, len(self.levels) // 2)
        return min(r.dim_kernel for r in self.levels[-t:])

    def folner_brackets(self) -> list[tuple[Fraction, Fraction]]:
        """Per-level interval [dim_i, dim_i + error_term_i]."""
        if self.scheme != "folner":
            raise ApproxError("brackets are a Folner-scheme report")
        return [(r.dim_kernel, r.dim_kernel + r.error_term) for r in self.levels]

    def envelope(self, tail: int = 0) -> DensityEnvelope:
        dens = [r.density for r in self.levels if r.density is not None]
        return DensityEnvelope(dens, tail=tail)

    def as_json(self) -> dict:
        return {"matrix": self.matrix_hash, "scheme": self.scheme,
                "kappa": self.kappa_source,
                "levels": [r.as_json() for r in self.levels]}

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("level,N,dim,logdet,kappa,error_term,seconds\n")
            for r in self.levels:
                logdet = "" if r.log_det is None else f"{r.log_det:.12e}"
                err = "" if r.error_term is None else str(r.error_term)
                fh.write(f"{r.level},{r.normalization},{r.dim_kernel},{logdet},"
                         f"{r.kappa_level:.12e},{err},{r.seconds:.6f}\n")


def _level_models(B: GroupRingMatrix, scheme):
    """Yield (level_index, model of B, error_term or None)."""
    if isinstance(scheme, QuotientChain):
        for idx, qmap in enumerate(scheme):
            yield idx, quotient_model(B, qmap), None
    elif isinstance(scheme, FolnerExhaustion):
        for k in scheme.levels:
            lv = build_folner(B.group, k)
            yield k, folner_model(B, lv), amenable_error_term(B, lv)
    else:
        raise ApproxError("scheme must be a QuotientChain or FolnerExhaustion")


def _analyze_level(args):
    idx, model, err, want_density, want_spectra = args
    t0 = time.perf_counter()
    dim = exact_kernel_dim(model) if model.exact else None
    if not want_spectra and dim is not None:
        return LevelRecord(level=idx, normalization=model.normalization,
                           dim_kernel=dim, log_det=None,
                           kappa_level=model.kappa().kappa, error_term=err,
                           seconds=time.perf_counter() - t0)
    delta = model.spectral_square()
    if dim is None:
        dens = density(delta)
        dim = Fraction(dens.zero_count, dens.normalization)
    else:
        zero = int(dim * model.normalization)
        dens = density(delta, zero_count=zero, zero_exact=True)
    logdet, _empty = dens.log_det()
    kap = delta.kappa().kappa
    rec = LevelRecord(level=idx, normalization=model.normalization,
                      dim_kernel=dim, log_det=logdet, kappa_level=kap,
                      error_term=err, seconds=time.perf_counter() - t0,
                      density=dens if want_density else None,
                      dim_exact=dens.zero_exact)
    return rec


def approximate_kernel_dim(B: GroupRingMatrix, scheme, tol: Fraction = DEFAULT_TOL,
                           jobs: int | None = None, keep_densities: bool = False,
                           want_spectra: bool = True,
                           declared_limit=None) -> ApproximationRun:
    """Per-level exact kernel dimensions of Delta = B* B along the scheme.

    Quotient chains require exact coefficients; Folner schemes require an
    amenable group model.  Levels are analyzed concurrently (bounded by
    ``jobs``) and assembled in level order.  ``want_spectra=False`` skips
    the eigensolves (no log-determinants or densities), which keeps large
    kernel-only runs cheap.
    """
    if isinstance(scheme, QuotientChain) and B.tag == "float":
        raise ApproxError("quotient pipelines need exact coefficients")
    if isinstance(scheme, FolnerExhaustion) and not B.group.amenable_model:
        raise ApproxError("Folner pipelines need an amenable group model")
    work = [(idx, model, err, keep_densities, want_spectra)
            for idx, model, err in _level_models(B, scheme)]
    if jobs is None or jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_analyze_level, work))
    else:
        records = [_analyze_level(w) for w in work]
    kind = "quotient" if isinstance(scheme, QuotientChain) else "folner"
    run = ApproximationRun(matrix_hash=B.stable_hash(), scheme=kind,
                           levels=records, declared_limit=declared_limit,
                           kappa_source=B.delta().kappa().kappa)
    return run


# -- integrality ------------------------------------------------------------------

@dataclass
class IntegralityVerdict:
    converged: bool
    nearest_integer: int | None
    distance: Fraction | None
    passed: bool

    def as_json(self) -> dict:
        return {"converged": self.converged,
                "integer": self.nearest_integer,
                "distance": None if self.distance is None else str(self.distance),
                "pass": self.passed}


def check_atiyah_integrality(run: ApproximationRun, tol: Fraction = DEFAULT_TOL) -> IntegralityVerdict:
    """Nearest-integer verdict for the run limit; indeterminate when unconverged."""
    tol = Fraction(tol)
    if not run.converged(tol):
        return IntegralityVerdict(False, None, None, False)
    value = run.last_dim()
    nearest = int(value + Fraction(1, 2)) if value >= 0 else -int(-value + Fraction(1, 2))
    distance = abs(value - nearest)
    return IntegralityVerdict(True, nearest, distance, distance <= tol)


# -- determinant bound --------------------------------------------------------------

@dataclass
class DetBoundReport:
    rhs: float
    conjugate_kappas: list[float]
    scale: int
    levels: list[tuple[int, float]]     # (N, logdet)
    margins: list[float]
    field_normal_known: bool

    @property
    def holds(self) -> bool:
        return all(m >= -1e-12 for m in self.margins)

    def as_json(self) -> dict:
        return {"rhs": self.rhs, "kappas": self.conjugate_kappas,
                "denominator_scale": self.scale,
                "levels": [{"N": n, "logdet": v} for n, v in self.levels],
                "margins": self.margins, "holds": self.holds,
                "field_normal_known": self.field_normal_known}


def verify_det_bound(B: GroupRingMatrix, scheme, jobs: int | None = None) -> DetBoundReport:
    """Check ln det_i >= -d * sum_{k>=2} ln kappa(sigma_k(Delta)) at every level.

    Entries are first scaled to algebraic integers (the kernel is
    unchanged; the bound applies to the scaled matrix).
    """
    scale = 1
    if B.tag in ("rational", "algebraic"):
        scale, B = clear_matrix_denominators(B)
    delta = B.delta()
    d = delta.rows
    kappas = []
    for k in range(2, B.embedding_count() + 1):
        kappas.append(delta.galois_conjugate(k).kappa().kappa)
    rhs = -d * sum(math.log(k) for k in kappas) if kappas else 0.0
    run = approximate_kernel_dim(B, scheme, jobs=jobs)
    levels = [(r.normalization, r.log_det) for r in run.levels]
    margins = [v - rhs for _, v in levels]
    normal_known = B.tag != "algebraic" or B.field.is_normal_known()
    return DetBoundReport(rhs, kappas, scale, levels, margins, normal_known)


# -- Galois continuity ---------------------------------------------------------------

@dataclass
class ContinuityReport:
    dims_per_embedding: list[list[Fraction]]
    limits: list[Fraction]

    @property
    def equal(self) -> bool:
        return len(set(self.limits)) <= 1

    def as_json(self) -> dict:
        return {"limits": [str(x) for x in self.limits], "equal": self.equal,
                "levels": [[str(x) for x in dims] for dims in self.dims_per_embedding]}


def verify_algebraic_continuity(B: GroupRingMatrix, scheme,
                                jobs: int | None = None) -> ContinuityReport:
    """Kernel-dimension runs for every Galois conjugate of B; limits must agree."""
    dims = []
    limits = []
    for k in range(1, B.embedding_count() + 1):
        run = approximate_kernel_dim(B.galois_conjugate(k), scheme, jobs=jobs)
        dims.append(run.dims())
        limits.append(run.last_dim())
    return ContinuityReport(dims, limits)


# -- spectrum gaps ----------------------------------------------------------------------

@dataclass
class GapReport:
    interval: tuple[float, float]
    margin: float
    envelope_mass: float

    @property
    def gap_confirmed(self) -> bool:
        return self.margin > 0 and self.envelope_mass == 0.0

    def as_json(self) -> dict:
        return {"interval": list(self.interval), "margin": self.margin,
                "envelope_mass": self.envelope_mass, "gap": self.gap_confirmed}


def spectrum_gap_check(B: GroupRingMatrix, scheme, lo: float, hi: float) -> GapReport:
    """Empirical spectrum-gap witness: no level eigenvalue meets [lo, hi]."""
    if not B.is_self_adjoint():
        raise ApproxError("gap checks need a self-adjoint matrix")
    if not (lo < hi):
        raise ApproxError("empty interval")
    margin = math.inf
    mass = 0.0
    count = 0
    for _, model, _err in _level_models(B, scheme):
        eigs = eigenvalues(model)
        count += 1
        inside = eigs[(eigs >= lo) & (eigs <= hi)]
        if inside.size:
            raise ApproxError(
                f"interval touches the level spectrum at {float(inside[0]):g}")
        below = eigs[eigs < lo]
        above = eigs[eigs > hi]
        gap_margin = min(lo - float(below[-1]) if below.size else math.inf,
                         float(above[0]) - hi if above.size else math.inf)
        margin = min(margin, gap_margin)
        mass += float(np.sum((eigs > lo) & (eigs < hi)))
    if count < 1:
        raise ApproxError("no levels in scheme")
    return GapReport((lo, hi), min(margin, 1e300), mass)


# -- Liouville exclusion ------------------------------------------------------------------

@dataclass
class LiouvilleStep:
    n: int
    p: int
    q: int
    gap_log: float                   # -ln eps_n, certified from the interval
    s_log_upper: float               # ln of the certified upper bound on s_n
    norm_bound: float                # (q*kappa(A) + |p|)^2, eq-style coarse bound
    kappas: list[float]              # kappa(sigma_k(V_n)), exact coefficients
    poly_factor: float               # P(q_n) = max(q^2, 2|p|q, p^2)
    big_c: float                     # max_k C_k
    bound: float                     # reported dimension bound
    bound_weak: float                # same with the weaker ln q_n denominator

    def as_json(self) -> dict:
        return {"n": self.n, "p": self.p, "q": self.q,
                "minus_ln_eps": self.gap_log, "ln_s_upper": self.s_log_upper,
                "norm_bound_log": self.norm_bound, "kappas_log": self.kappas,
                "P_log": self.poly_factor, "C": self.big_c,
                "bound": self.bound, "bound_weak": self.bound_weak}


@dataclass
class LiouvilleCertificate:
    target: str
    steps: list[LiouvilleStep]
    decreasing: bool

    def bounds(self) -> list[float]:
        return [s.bound for s in self.steps]

    def as_json(self) -> dict:
        return {"target": self.target, "decreasing": self.decreasing,
                "steps": [s.as_json() for s in self.steps]}


def liouville_constant(terms: int) -> tuple[Fraction, Fraction]:
    """Certified interval [lo, hi] containing sum 10^(-j!) with `terms` terms."""
    lo = sum((Fraction(1, 10 ** math.factorial(j)) for j in range(1, terms + 1)), Fraction(0))
    hi = lo + Fraction(2, 10 ** math.factorial(terms + 1))
    return lo, hi


def liouville_constant_approximants(n_max: int) -> list[tuple[int, int, int]]:
    """(n, p_n, q_n) with q_n = 10^(n!) and p_n/q_n the n-term partial sum."""
    out = []
    for n in range(1, n_max + 1):
        q = 10 ** math.factorial(n)
        p = sum(10 ** (math.factorial(n) - math.factorial(j)) for j in range(1, n + 1))
        out.append((n, p, q))
    return out


def liouville_exclusion(A: GroupRingMatrix, target_interval: tuple[Fraction, Fraction],
                        approximants: list[tuple[int, int, int]],
                        target_name: str = "liouville") -> LiouvilleCertificate:
    """Eigenvalue-exclusion bound sequence for a Liouville-approximable target.

    Every approximant must satisfy 0 < |lambda - p/q| <= q^-n with q >= 2,
    checked in exact rational interval arithmetic.  Per admissible step
    (n >= 2) the certificate records the exact spectral square
    V_n = (q A - p)* (q A - p), its conjugate kappas, the polynomial
    factor P(q) and constant C, and the reported bound

        d*r/(2n-2) * ln(P(q_n) C) / (-ln|lambda - p_n/q_n|),

    together with the coarser variant using ln q_n in the denominator.
    """
    if not A.is_self_adjoint():
        raise ApproxError("exclusion bounds need a self-adjoint matrix")
    if A.tag == "float":
        raise ApproxError("exact coefficients required")
    scale, A = clear_matrix_denominators(A)
    if scale != 1:
        target_interval = (target_interval[0] * scale, target_interval[1] * scale)
        approximants = [(n, p * scale, q) for n, p, q in approximants]
    lo, hi = target_interval
    d = A.rows
    r = A.embedding_count()
    Asq = A @ A
    s_a = A.kappa().s_row
    s_a2 = Asq.kappa().s_row
    c_vals = []
    for k in range(1, r + 1):
        ka = A.galois_conjugate(k).kappa()
        ka2 = Asq.galois_conjugate(k).kappa()
        c_vals.append((s_a2 + s_a + 1) * (float(ka2.coeff_sup) + float(ka.coeff_sup) + 1.0))
    big_c = max(c_vals)
    steps = []
    for n, p, q in approximants:
        if q < 2:
            raise ApproxError(f"approximant q={q} violates q >= 2")
        eps_lo = lo - Fraction(p, q)
        eps_hi = hi - Fraction(p, q)
        if eps_lo < 0 and eps_hi <= 0:
            eps_lo, eps_hi = -eps_hi, -eps_lo
        if eps_lo <= 0:
            raise ApproxError(f"cannot certify lambda != p/q at n={n}; "
                              "narrow the target interval")
        if eps_hi > Fraction(1, q ** n):
            raise ApproxError(f"approximant at n={n} violates |lambda - p/q| <= q^-n "
                              f"(gap {float(eps_hi):g})")
        if n < 2:
            continue
        gap_log = -_ln_fraction(eps_hi)
        ident = GroupRingMatrix.identity(A.group, d, A.tag, A.field)
        W = A.scale(q) - ident.scale(p)
        V = W.delta()
        kappas = [math.log(V.galois_conjugate(k).kappa().kappa) for k in range(1, r + 1)]
        poly_factor = math.log(max(q * q, 2 * abs(p) * q, p * p))
        kap_a = A.kappa().kappa
        norm_bound = 2.0 * math.log(q * kap_a + abs(p))
        s_log_upper = 2.0 * (math.log(q) + _ln_fraction(eps_hi))
        num = d * r * (poly_factor + math.log(big_c))
        bound = num / ((2 * n - 2) * gap_log)
        bound_weak = num / ((2 * n - 2) * math.log(q))
        steps.append(LiouvilleStep(n, p, q, gap_log, s_log_upper, norm_bound,
                                   kappas, poly_factor, big_c, bound, bound_weak))
    if not steps:
        raise ApproxError("no admissible n >= 2")
    decreasing = all(b.bound > a.bound for b, a in zip(steps, steps[1:]))
    return LiouvilleCertificate(target_name, steps, decreasing)


def _ln_fraction(x: Fraction) -> float:
    """ln of a positive rational, safe for values far outside float range."""
    if x <= 0:
        raise ApproxError("logarithm of a nonpositive rational")
    return math.log(x.numerator) - math.log(x.denominator)
