"""Certified exact rank and nullspace computations.

Fraction-free (Bareiss) elimination is the reference path.  For larger
matrices two certified accelerations are used, both of which only ever
*propose* and then verify exactly:

* a full-rank certificate from elimination modulo a prime (rank mod p is
  always a lower bound, so full rank mod p proves full rank over the
  field);
* kernel vectors lifted by CRT + rational reconstruction from several
  primes and verified exactly, which certifies the matching upper bound.

Quotient models of 1x1 matrices over Z are circulant; their kernel
dimension is deg gcd(f(x), x^N - 1) over the coefficient field, which is
computed directly.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .coefficients import (AlgebraicNumber, NumberField, coeff_is_zero,
                           poly_trim)

SMALL_DIM = 140          # plain exact elimination below this
FIELD_SMALL_DIM = 72
PRIMES = [33554393, 33554383, 33554371, 33554347, 33554341, 33554317,
          33554291, 33554281, 33554239, 33554221, 33554201, 33554167,
          33554159, 33554137, 33554123, 33554093, 33554083, 33554077]


class RankError(ValueError):
    pass


# -- reference paths ---------------------------------------------------------

def bareiss_rank(rows: list[list[int]]) -> int:
    """Fraction-free integer elimination; exact rank."""
    m = [list(r) for r in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    rank = 0
    prev = 1
    pr = 0
    for pc in range(nc):
        piv = None
        for r in range(pr, nr):
            if m[r][pc] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[pr], m[piv] = m[piv], m[pr]
        p = m[pr][pc]
        for r in range(pr + 1, nr):
            mr = m[r]
            factor = mr[pc]
            row_p = m[pr]
            for c in range(pc, nc):
                mr[c] = (p * mr[c] - factor * row_p[c]) // prev
        prev = p
        pr += 1
        rank += 1
        if pr == nr:
            break
    return rank


def rational_rank(rows) -> int:
    """Exact rank of a Fraction matrix via denominator clearing + Bareiss."""
    ints = []
    for r in rows:
        lcm = 1
        fr = [Fraction(x) for x in r]
        for x in fr:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        ints.append([int(x * lcm) for x in fr])
    return bareiss_rank(ints)


def field_rank(rows, field: NumberField) -> int:
    """Exact Gaussian elimination with number-field arithmetic."""
    m = [[x if isinstance(x, AlgebraicNumber) else field.from_rational(x) for x in r]
         for r in rows]
    nr, nc = len(m), len(m[0]) if m else 0
    rank = 0
    pr = 0
    for pc in range(nc):
        piv = None
        for r in range(pr, nr):
            if not m[r][pc].is_zero():
                piv = r
                break
        if piv is None:
            continue
        m[pr], m[piv] = m[piv], m[pr]
        inv = field.one() / m[pr][pc]
        for r in range(pr + 1, nr):
            if m[r][pc].is_zero():
                continue
            f = m[r][pc] * inv
            m[r] = [a - f * b for a, b in zip(m[r], m[pr])]
        pr += 1
        rank += 1
        if pr == nr:
            break
    return rank


# -- mod-p machinery ----------------------------------------------------------

def _coeff_mod_p(x, root: int | None, p: int) -> int | None:
    if isinstance(x, AlgebraicNumber):
        acc = 0
        power = 1
        for c in x.coords:
            if c.denominator % p == 0:
                return None
            acc = (acc + c.numerator * pow(c.denominator, -1, p) * power) % p
            power = (power * root) % p
        return acc
    c = Fraction(x)
    if c.denominator % p == 0:
        return None
    return c.numerator * pow(c.denominator, -1, p) % p


def _to_int_matrix(rows, field: NumberField | None, p: int) -> np.ndarray | None:
    """Reduce a rational or number-field matrix mod p (None if p is unusable)."""
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    root = None
    if field is not None:
        root = _find_root_mod_p(field, p)
        if root is None:
            return None
    out = np.zeros((nr, nc), dtype=np.int64)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            if isinstance(x, (int, Fraction)) and not isinstance(x, bool) and x == 0:
                continue
            v = _coeff_mod_p(x, root, p)
            if v is None:
                return None
            out[i, j] = v
    return out


def _sparse_to_int_matrix(entries: dict, shape, field: NumberField | None,
                          p: int) -> np.ndarray | None:
    root = None
    if field is not None:
        root = _find_root_mod_p(field, p)
        if root is None:
            return None
    out = np.zeros(shape, dtype=np.int64)
    for (i, j), x in entries.items():
        v = _coeff_mod_p(x, root, p)
        if v is None:
            return None
        out[i, j] = v
    return out


def _find_root_mod_p(field: NumberField, p: int) -> int | None:
    """A root of the minimal polynomial mod p, or None when it has none."""
    coeffs = []
    for c in field.minpoly:
        if c.denominator % p == 0:
            return None
        coeffs.append(c.numerator * pow(c.denominator, -1, p) % p)
    # gcd(x^p - x, minpoly) collects exactly the linear factors mod p
    zp = _polymod_pow_x(coeffs, p)
    lin = _poly_gcd_mod(_poly_sub_mod(zp, [0, 1], p), coeffs, p)
    if len(lin) - 1 < 1:
        return None
    return _roots_of_small_poly_mod(lin, p)


def _poly_mulmod(a: list[int], b: list[int], modpoly: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    d = len(modpoly) - 1
    inv_lead = pow(modpoly[-1], -1, p)
    for k in range(len(out) - 1, d - 1, -1):
        c = out[k] % p
        if c:
            c = c * inv_lead % p
            for j in range(d + 1):
                out[k - d + j] = (out[k - d + j] - c * modpoly[j]) % p
        out.pop()
    while len(out) < d:
        out.append(0)
    return out


def _poly_powmod(base: list[int], e: int, modpoly: list[int], p: int) -> list[int]:
    d = len(modpoly) - 1
    result = [1] + [0] * (d - 1)
    base = (list(base) + [0] * d)[:max(d, 1)]
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, modpoly, p)
        base = _poly_mulmod(base, base, modpoly, p)
        e >>= 1
    return result


def _polymod_pow_x(minpoly: list[int], p: int) -> list[int]:
    """x^p mod (minpoly, p)."""
    d = len(minpoly) - 1
    if d == 1:
        return [(-minpoly[0]) * pow(minpoly[1], -1, p) % p]
    return _poly_powmod([0, 1], p, minpoly, p)


def _poly_sub_mod(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    out = [(x - y) % p for x, y in zip(a, b)]
    while out and out[-1] == 0:
        out.pop()
    return out


def _poly_gcd_mod(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = list(a), list(b)
    while b:
        # a mod b
        inv = pow(b[-1], -1, p)
        while len(a) >= len(b) and a:
            c = a[-1] * inv % p
            k = len(a) - len(b)
            for i in range(len(b)):
                a[k + i] = (a[k + i] - c * b[i]) % p
            while a and a[-1] == 0:
                a.pop()
        a, b = b, a
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def _roots_of_small_poly_mod(poly: list[int], p: int) -> int | None:
    """One root of a monic product of distinct linear factors mod p."""
    import random

    poly = list(poly)
    rng = random.Random(0x5EED ^ p)
    for _ in range(80):
        deg = len(poly) - 1
        if deg < 1:
            return None
        if deg == 1:
            return (-poly[0]) * pow(poly[1], -1, p) % p
        # split with gcd((x+a)^((p-1)/2) - 1, poly)
        a = rng.randrange(p)
        h = _poly_powmod([a, 1], (p - 1) // 2, poly, p)
        h = _poly_sub_mod(h, [1], p)
        g = _poly_gcd_mod(h, poly, p)
        if 1 <= len(g) - 1 < deg:
            poly = g
    return None


def rank_mod_p(mat: np.ndarray, p: int) -> tuple[int, list[int]]:
    """Row echelon mod p; returns (rank, pivot column list).

    Uses a moving active window when the matrix is banded, which keeps
    the large structured models (grid Laplacians) cheap.
    """
    m = np.mod(mat.astype(object) if mat.dtype == object else mat, p).astype(np.int64)
    nr, nc = m.shape
    bw = _bandwidth(m)
    pivots = []
    pr = 0
    for pc in range(nc):
        limit = nr if bw is None else min(nr, pr + bw + 1)
        col = m[pr:limit, pc] % p
        nz = np.nonzero(col)[0]
        if nz.size == 0 and bw is not None:
            col = m[pr:nr, pc] % p
            nz = np.nonzero(col)[0]
            limit = nr
        if nz.size == 0:
            continue
        piv = pr + int(nz[0])
        if piv != pr:
            m[[pr, piv]] = m[[piv, pr]]
        inv = pow(int(m[pr, pc]) % p, -1, p)
        hi_r = nr if bw is None else min(nr, pr + 2 * bw + 2)
        hi_c = nc if bw is None else min(nc, pc + 2 * bw + 2)
        m[pr, pc:hi_c] = (m[pr, pc:hi_c] * inv) % p
        block = m[pr + 1:hi_r, pc:hi_c]
        factors = block[:, 0].copy() % p
        if factors.any():
            block -= factors[:, None] * m[pr, pc:hi_c][None, :]
            np.mod(block, p, out=block)
        pivots.append(pc)
        pr += 1
        if pr == nr:
            break
    return len(pivots), pivots


def _bandwidth(m: np.ndarray) -> int | None:
    nr, nc = m.shape
    if nr * nc < 250_000:
        return None
    rows, cols = np.nonzero(m)
    if rows.size == 0:
        return None
    bw = int(np.max(np.abs(rows - cols)))
    return bw if bw < min(nr, nc) // 4 else None


# -- rational reconstruction ---------------------------------------------------

def rational_reconstruct(r: int, m: int) -> Fraction | None:
    """a/b with r*b = a mod m, |a|, b <= sqrt(m/2), via half-extended Euclid."""
    bound = math.isqrt(m // 2)
    r0, r1 = m, r % m
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if r1 > bound or abs(t1) > bound or t1 == 0:
        return None
    if math.gcd(r1, t1) != 1 and math.gcd(abs(t1), m) != 1:
        return None
    return Fraction(r1, t1) if t1 > 0 else Fraction(-r1, -t1)


def crt_pair(a1: int, m1: int, a2: int, m2: int) -> tuple[int, int]:
    g, x, _ = _egcd(m1, m2)
    assert g == 1
    m = m1 * m2
    return ((a1 + (a2 - a1) * x % m2 * m1) % m, m)


def _egcd(a, b):
    if b == 0:
        return a, 1, 0
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


# -- certified kernel dimension --------------------------------------------------

def kernel_dimension(rows, field: NumberField | None = None,
                     cyclic: dict | None = None, cyclic_order: int | None = None,
                     sparse: tuple[dict, tuple[int, int]] | None = None) -> int:
    """Exact kernel dimension (number of columns minus rank), certified.

    ``cyclic``/``cyclic_order`` enable the circulant fast path: kernel of
    the N x N circulant of f equals deg gcd(f, x^N - 1).  Large matrices
    may be passed as ``sparse=(entries, shape)`` to keep the modular
    full-rank certificate cheap.
    """
    if cyclic is not None and cyclic_order is not None:
        return circulant_kernel_dim(cyclic, cyclic_order, field)
    if sparse is not None:
        entries, (nr, nc) = sparse
    else:
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        entries = None
    if nr == 0 or nc == 0:
        return nc

    def densify():
        nonlocal rows
        if rows is None:
            zero = Fraction(0) if field is None else field.zero()
            rows = [[zero] * nc for _ in range(nr)]
            for (i, j), c in entries.items():
                rows[i][j] = c
        return rows

    if field is None and max(nr, nc) <= SMALL_DIM:
        return nc - rational_rank(densify() if sparse else rows)
    if field is not None and max(nr, nc) <= FIELD_SMALL_DIM:
        return nc - field_rank(densify() if sparse else rows, field)
    # modular lower bound on the rank
    best = -1
    for p in PRIMES[:3]:
        if entries is not None:
            mat = _sparse_to_int_matrix(entries, (nr, nc), field, p)
        else:
            mat = _to_int_matrix(rows, field, p)
        if mat is None:
            continue
        r, _ = rank_mod_p(mat, p)
        best = max(best, r)
        if best == min(nr, nc):
            return nc - best       # full rank mod p certifies full rank
    if best < 0:
        raise RankError("no usable prime for modular rank")
    deficiency = nc - best
    # try to certify the upper bound rank <= best with exact kernel vectors
    vecs = _kernel_vectors_multimodular(densify() if sparse else rows, field,
                                        want=deficiency)
    if vecs is not None and len(vecs) == deficiency:
        return deficiency
    # fall back to the reference path
    if field is None:
        return nc - rational_rank(densify() if sparse else rows)
    return nc - field_rank(densify() if sparse else rows, field)


def circulant_kernel_dim(poly: dict, order: int, field: NumberField | None) -> int:
    """deg gcd(f(x), x^order - 1) over Q or the number field."""
    if field is None:
        f = [Fraction(0)] * (max(poly) + 1) if poly else []
        for e, c in poly.items():
            f[e] = Fraction(c)
        xn = [Fraction(0)] * (order + 1)
        xn[0], xn[-1] = Fraction(-1), Fraction(1)
        from .coefficients import poly_gcd
        g = poly_gcd(xn, f)
        return len(g) - 1 if g else order
    one, zero = field.one(), field.zero()
    f = [zero] * (max(poly) + 1) if poly else []
    for e, c in poly.items():
        f[e] = c if isinstance(c, AlgebraicNumber) else field.from_rational(c)
    xn = [zero] * (order + 1)
    xn[0], xn[-1] = zero - one, one
    g = _field_poly_gcd(xn, f, field)
    return len(g) - 1 if g else order


def _field_poly_trim(p):
    while p and p[-1].is_zero():
        p.pop()
    return p


def _field_poly_gcd(a, b, field: NumberField):
    a, b = _field_poly_trim(list(a)), _field_poly_trim(list(b))
    while b:
        # a mod b
        inv = field.one() / b[-1]
        while len(a) >= len(b) and a:
            c = a[-1] * inv
            k = len(a) - len(b)
            for i in range(len(b)):
                a[k + i] = a[k + i] - c * b[i]
            a = _field_poly_trim(a)
        a, b = b, a
    return a


def _kernel_vectors_multimodular(rows, field, want: int,
                                 max_primes: int = 16) -> list[list[Fraction]] | None:
    """Exact kernel vectors found modularly and verified; None on failure.

    Only the rational case is attempted; number-field deficiencies large
    enough to reach this path fall back to exact elimination.
    """
    if field is not None or want > 8:
        return None
    nc = len(rows[0])
    frac_rows = [[Fraction(x) for x in r] for r in rows]
    p0 = PRIMES[0]
    mat = _to_int_matrix(rows, None, p0)
    if mat is None:
        return None
    _, pivots = rank_mod_p(mat.copy(), p0)
    free_cols = [c for c in range(nc) if c not in pivots][:want]
    if len(free_cols) < want:
        return None
    vecs = []
    for free in free_cols:
        residues = {}
        modulus = 1
        acc = None
        found = None
        for p in PRIMES[:max_primes]:
            sol = _solve_free_column_mod(rows, free, p)
            if sol is None:
                continue
            if acc is None:
                acc, modulus = sol, p
            else:
                acc = [crt_pair(a, modulus, b, p)[0] for a, b in zip(acc, sol)]
                modulus *= p
            cand = [rational_reconstruct(a, modulus) for a in acc]
            if all(c is not None for c in cand):
                if _verify_kernel(frac_rows, cand):
                    found = cand
                    break
        if found is None:
            return None
        vecs.append(found)
    return vecs


def _solve_free_column_mod(rows, free: int, p: int) -> list[int] | None:
    mat = _to_int_matrix(rows, None, p)
    if mat is None:
        return None
    nr, nc = mat.shape
    m = mat % p
    # eliminate, treating `free` as the inhomogeneous column with value 1
    x = np.zeros(nc, dtype=object)
    x[free] = 1
    rhs = (-m[:, free]) % p
    cols = [c for c in range(nc) if c != free]
    a = m[:, cols]
    sol = _solve_mod(a, rhs, p)
    if sol is None:
        return None
    for c, v in zip(cols, sol):
        x[c] = int(v)
    return [int(v) for v in x]


def _solve_mod(a: np.ndarray, b: np.ndarray, p: int) -> list[int] | None:
    a = a.copy() % p
    b = b.copy() % p
    nr, nc = a.shape
    pivots = []
    pr = 0
    for pc in range(nc):
        nz = np.nonzero(a[pr:, pc])[0]
        if nz.size == 0:
            continue
        piv = pr + int(nz[0])
        a[[pr, piv]] = a[[piv, pr]]
        b[pr], b[piv] = b[piv], b[pr]
        inv = pow(int(a[pr, pc]), -1, p)
        a[pr] = a[pr] * inv % p
        b[pr] = b[pr] * inv % p
        factors = a[pr + 1:, pc].copy()
        mask = factors != 0
        if mask.any():
            a[pr + 1:][mask] = (a[pr + 1:][mask] - factors[mask, None] * a[pr][None, :]) % p
            b[pr + 1:][mask] = (b[pr + 1:][mask] - factors[mask] * b[pr]) % p
        pivots.append(pc)
        pr += 1
        if pr == nr:
            break
    if np.any(b[pr:] % p):
        return None
    x = [0] * nc
    for r in range(len(pivots) - 1, -1, -1):
        pc = pivots[r]
        s = int(b[r])
        for c in range(pc + 1, nc):
            if a[r, c]:
                s -= int(a[r, c]) * x[c]
        x[pc] = s % p
    return x


def _verify_kernel(frac_rows, vec) -> bool:
    for row in frac_rows:
        s = Fraction(0)
        for a, v in zip(row, vec):
            if a and v:
                s += a * v
        if s != 0:
            return False
    return True


def nullspace_vector(rows, prefer_cols=None, max_primes: int = 40):
    """One exact rational nullspace vector of an integer/rational system.

    ``prefer_cols``: columns tried first as the free variable (used to
    favor solutions with a nonzero component in a designated block).
    Deterministic for a fixed prime list; returns None if reconstruction
    fails for every candidate free column.
    """
    frac_rows = [[Fraction(x) for x in r] for r in rows]
    nc = len(rows[0])
    p0 = PRIMES[0]
    mat = _to_int_matrix(rows, None, p0)
    if mat is None:
        raise RankError("prime collides with denominators")
    _, pivots = rank_mod_p(mat.copy(), p0)
    free_cols = [c for c in range(nc) if c not in pivots]
    if prefer_cols is not None:
        free_cols.sort(key=lambda c: (c not in prefer_cols, c))
    for free in free_cols:
        acc = None
        modulus = 1
        for i, p in enumerate(PRIMES[:max_primes]):
            sol = _solve_free_column_mod(rows, free, p)
            if sol is None:
                continue
            if acc is None:
                acc, modulus = sol, p
            else:
                acc = [crt_pair(a, modulus, b, p)[0] for a, b in zip(acc, sol)]
                modulus *= p
            if i % 2 == 0 or i < 4:
                cand = [rational_reconstruct(a, modulus) for a in acc]
                if all(c is not None for c in cand) and _verify_kernel(frac_rows, cand):
                    return cand
        if acc is not None:
            cand = [rational_reconstruct(a, modulus) for a in acc]
            if all(c is not None for c in cand) and _verify_kernel(frac_rows, cand):
                return cand
    return None
