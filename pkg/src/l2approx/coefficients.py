"""Exact coefficient arithmetic: rationals, number fields, complex floats.

A matrix carries exactly one coefficient tag:

* ``"rational"``  -- ``fractions.Fraction``
* ``"algebraic"`` -- :class:`AlgebraicNumber` over a shared :class:`NumberField`
* ``"float"``     -- ``complex``

Number fields are given by a monic squarefree minimal polynomial of
degree <= 8 over Q (irreducibility is the caller's responsibility).  All
complex roots are isolated with certified radii, so every embedding
sigma_1..sigma_r can be evaluated with an explicit error bound.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

DEFAULT_PRECISION_BITS = 128
TARGET_RADIUS = 1e-14


class CoefficientError(ValueError):
    pass


class PrecisionError(CoefficientError):
    """Requested certification radius could not be achieved."""


def precision_bits() -> int:
    try:
        return max(64, int(os.environ.get("L2_PRECISION_BITS", DEFAULT_PRECISION_BITS)))
    except ValueError:
        return DEFAULT_PRECISION_BITS


# -- polynomial helpers over Q ------------------------------------------------

def poly_trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_mul(p: Sequence[Fraction], q: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1) if p and q else []
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return poly_trim(out)


def poly_sub(p: Sequence[Fraction], q: Sequence[Fraction]) -> list[Fraction]:
    n = max(len(p), len(q))
    p = list(p) + [Fraction(0)] * (n - len(p))
    q = list(q) + [Fraction(0)] * (n - len(q))
    return poly_trim([a - b for a, b in zip(p, q)])


def poly_divmod(p: Sequence[Fraction], q: Sequence[Fraction]):
    q = list(q)
    if not poly_trim(list(q)):
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    d = len(q) - 1
    lead = q[-1]
    quo = [Fraction(0)] * max(0, len(r) - d)
    while len(poly_trim(r)) - 1 >= d and r:
        r = poly_trim(r)
        if len(r) - 1 < d:
            break
        c = r[-1] / lead
        k = len(r) - 1 - d
        quo[k] = c
        for i in range(d + 1):
            r[k + i] -= c * q[i]
        r.pop()
    return poly_trim(quo), poly_trim(r)


def poly_gcd(p: Sequence[Fraction], q: Sequence[Fraction]) -> list[Fraction]:
    a, b = poly_trim(list(p)), poly_trim(list(q))
    while b:
        _, r = poly_divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def poly_deriv(p: Sequence[Fraction]) -> list[Fraction]:
    return poly_trim([i * c for i, c in enumerate(p)][1:])


# -- number fields -------------------------------------------------------------

class NumberField:
    """Q[z]/(p(z)) with all complex roots isolated at working precision.

    Embeddings are indexed 1..r following the root order: real roots in
    descending order first, then complex roots sorted by (re desc, im
    desc).  ``distinguished`` selects which root realizes sigma_1; views
    with a different distinguished root share all exact data.
    """

    def __init__(self, minpoly: Sequence, distinguished: int = 0, _shared=None):
        coeffs = [Fraction(c) for c in minpoly]
        coeffs = poly_trim(coeffs)
        if len(coeffs) < 2:
            raise CoefficientError("minimal polynomial must have degree >= 1")
        if coeffs[-1] != 1:
            raise CoefficientError("minimal polynomial must be monic")
        if len(coeffs) - 1 > 8:
            raise CoefficientError("number field degree is capped at 8")
        g = poly_gcd(coeffs, poly_deriv(coeffs))
        if len(g) > 1:
            raise CoefficientError("minimal polynomial must be squarefree")
        self.minpoly = tuple(coeffs)
        self.degree = len(coeffs) - 1
        if _shared is not None:
            self._roots = _shared
        else:
            self._roots = _isolate_roots(self.minpoly)
        if not (0 <= distinguished < self.degree):
            raise CoefficientError("distinguished embedding out of range")
        self.distinguished = distinguished
        self._conj_map = None

    # views -------------------------------------------------------------

    def with_distinguished(self, k: int) -> "NumberField":
        """Same abstract field, with sigma_1 realized by the k-th root (1-based)."""
        if not (1 <= k <= self.degree):
            raise CoefficientError(f"embedding index {k} out of range 1..{self.degree}")
        view = NumberField(self.minpoly, distinguished=k - 1, _shared=self._roots)
        return view

    @property
    def embedding_count(self) -> int:
        return self.degree

    def is_normal_known(self) -> bool:
        # degree <= 2 extensions are always normal; beyond that we do not decide
        return self.degree <= 2

    # elements ------------------------------------------------------------

    def element(self, coords) -> "AlgebraicNumber":
        coords = [Fraction(c) for c in coords]
        if len(coords) > self.degree:
            raise CoefficientError("coordinate vector longer than the field degree")
        coords += [Fraction(0)] * (self.degree - len(coords))
        return AlgebraicNumber(self, tuple(coords))

    def zero(self) -> "AlgebraicNumber":
        return self.element([])

    def one(self) -> "AlgebraicNumber":
        return self.element([1])

    def generator(self) -> "AlgebraicNumber":
        return self.element([0, 1])

    def from_rational(self, c) -> "AlgebraicNumber":
        return self.element([Fraction(c)])

    # arithmetic ------------------------------------------------------------

    def _mod_reduce(self, coords: list[Fraction]) -> tuple[Fraction, ...]:
        p = self.minpoly
        d = self.degree
        for i in range(len(coords) - 1, d - 1, -1):
            c = coords[i]
            if c:
                for j in range(d):
                    coords[i - d + j] -= c * p[j]
            coords.pop()
        while len(coords) < d:
            coords.append(Fraction(0))
        return tuple(coords)

    def mul_coords(self, a, b) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * (2 * self.degree - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return self._mod_reduce(out)

    def inv_coords(self, a) -> tuple[Fraction, ...]:
        # extended Euclid in Q[z] against the minimal polynomial
        if all(c == 0 for c in a):
            raise ZeroDivisionError("division by the zero algebraic number")
        r0, r1 = list(self.minpoly), poly_trim(list(a))
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, poly_sub(s0, poly_mul(q, s1))
        if not r1:
            raise CoefficientError("element is a zero divisor; minimal polynomial not irreducible?")
        c = r1[0]
        inv = [x / c for x in s1]
        return self._mod_reduce(inv)

    # embeddings ------------------------------------------------------------

    def embed_coords(self, coords, k: int | None = None) -> tuple[complex, float]:
        """Value and certified radius of sigma_k applied to the element."""
        if k is None:
            k = self.distinguished + 1
        if not (1 <= k <= self.degree):
            raise CoefficientError(f"embedding index {k} out of range 1..{self.degree}")
        root, rad = self._roots[k - 1]
        prec = precision_bits()
        with mpmath.workprec(prec + 16):
            z = mpmath.mpc(root)
            val = mpmath.mpc(0)
            err = mpmath.mpf(0)
            zpow = mpmath.mpc(1)
            zabs = abs(z) + rad
            for j, c in enumerate(coords):
                if c:
                    cm = mpmath.mpf(c.numerator) / c.denominator
                    val += cm * zpow
                    if j > 0:
                        err += abs(cm) * j * (zabs ** (j - 1)) * rad
                zpow *= z
            out = complex(val)
            radius = float(err) + abs(out) * 2.0 ** (8 - prec) + 2.0 ** (8 - prec)
        if not math.isfinite(radius) or radius > 1e-6:
            raise PrecisionError("embedding radius exceeds tolerance; raise L2_PRECISION_BITS")
        return out, radius

    def conj_coords(self, coords) -> tuple[Fraction, ...]:
        """Coordinates of the complex conjugate under the distinguished embedding.

        Supported when sigma_1 is real (identity) or when the generator is
        sent to a purely imaginary root of an even/odd-symmetric minimal
        polynomial (conjugation is then z -> -z).
        """
        kind = self._conjugation_kind()
        if kind == "real":
            return tuple(coords)
        if kind == "negate":
            return tuple(c if j % 2 == 0 else -c for j, c in enumerate(coords))
        raise CoefficientError(
            "field is not closed under complex conjugation in a supported form")

    def _conjugation_kind(self) -> str:
        if self._conj_map is None:
            root, rad = self._roots[self.distinguished]
            if abs(root.imag) <= rad:
                kind = "real"
            else:
                even = all(c == 0 for c in self.minpoly[1::2])
                odd = all(c == 0 for c in self.minpoly[0::2])
                if (even or odd) and abs(root.real) <= rad:
                    kind = "negate"
                else:
                    kind = "unsupported"
            self._conj_map = kind
        return self._conj_map

    # misc --------------------------------------------------------------------

    def field_norm(self, a: "AlgebraicNumber") -> Fraction:
        """Product of all embeddings, computed exactly as a resultant."""
        r0, r1 = list(self.minpoly), poly_trim(list(a.coords))
        if not r1:
            return Fraction(0)
        res = Fraction(1)
        while len(r1) > 1:
            _, r = poly_divmod(r0, r1)
            res *= r1[-1] ** (len(r0) - len(r))
            if ((len(r0) - 1) * (len(r1) - 1)) % 2 == 1:
                res = -res
            r0, r1 = r1, poly_trim(r)
            if not r1:
                return Fraction(0)
        res *= r1[0] ** (len(r0) - 1)
        return res

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.minpoly == other.minpoly \
            and self.distinguished == other.distinguished

    def __hash__(self):
        return hash((self.minpoly, self.distinguished))

    def __repr__(self):
        return f"NumberField({[str(c) for c in self.minpoly]}, sigma_{self.distinguished + 1})"

    def to_json(self) -> dict:
        return {"minpoly": [{"num": c.numerator, "den": c.denominator} for c in self.minpoly]}

    @staticmethod
    def from_json(d: dict) -> "NumberField":
        coeffs = []
        for c in d["minpoly"]:
            if isinstance(c, dict):
                coeffs.append(Fraction(c["num"], c["den"]))
            else:
                coeffs.append(Fraction(c))
        return NumberField(coeffs)


def _isolate_roots(minpoly: tuple[Fraction, ...]) -> list[tuple[complex, float]]:
    import numpy as np

    deg = len(minpoly) - 1
    coeffs_float = [float(c) for c in minpoly]
    companion = np.zeros((deg, deg))
    for i in range(deg - 1):
        companion[i + 1, i] = 1.0
    companion[:, -1] = [-c for c in coeffs_float[:-1]]
    approx = np.linalg.eigvals(companion)

    bits = precision_bits()
    for attempt in range(4):
        prec = bits * (2 ** attempt)
        roots = []
        ok = True
        with mpmath.workprec(prec):
            p = [mpmath.mpf(c.numerator) / c.denominator for c in minpoly]
            dp = [i * c for i, c in enumerate(p)][1:]

            def ev(cs, z):
                out = mpmath.mpc(0)
                for c in reversed(cs):
                    out = out * z + c
                return out

            for a in approx:
                z = mpmath.mpc(complex(a))
                for _ in range(80):
                    fz = ev(p, z)
                    dfz = ev(dp, z)
                    if dfz == 0:
                        ok = False
                        break
                    step = fz / dfz
                    z = z - step
                    if abs(step) < mpmath.mpf(2) ** (-prec + 8):
                        break
                fz, dfz = ev(p, z), ev(dp, z)
                if dfz == 0:
                    ok = False
                    break
                radius = float(deg * abs(fz / dfz)) * (1 + 1e-9) + 2.0 ** (16 - prec)
                val = complex(z)
                if abs(val.imag) <= radius:
                    val = complex(val.real, 0.0)
                roots.append((val, radius))
        if not ok:
            continue
        scale = max(1.0, max(abs(v) for v, _ in roots))
        if any(r > TARGET_RADIUS * scale for _, r in roots):
            continue
        if _disjoint(roots):
            roots.sort(key=_root_order)
            return roots
    raise PrecisionError("could not certify disjoint root enclosures; "
                         "raise L2_PRECISION_BITS")


def _disjoint(roots) -> bool:
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            (a, ra), (b, rb) = roots[i], roots[j]
            if abs(a - b) <= ra + rb:
                return False
    return True


def _root_order(item):
    v, _ = item
    if v.imag == 0:
        return (0, -v.real, 0.0)
    return (1, -v.real, -v.imag)


@dataclass(frozen=True)
class AlgebraicNumber:
    """Element of a NumberField in the power basis 1, v, ..., v^(d-1)."""

    field: NumberField
    coords: tuple[Fraction, ...]

    def _check(self, other):
        if self.field.minpoly != other.field.minpoly:
            raise CoefficientError("mixed number fields")

    def __add__(self, other):
        other = self._coerce(other)
        self._check(other)
        return AlgebraicNumber(self.field,
                               tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        other = self._coerce(other)
        self._check(other)
        return AlgebraicNumber(self.field,
                               tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return AlgebraicNumber(self.field, tuple(-a for a in self.coords))

    def __mul__(self, other):
        other = self._coerce(other)
        self._check(other)
        return AlgebraicNumber(self.field, self.field.mul_coords(self.coords, other.coords))

    def __truediv__(self, other):
        other = self._coerce(other)
        self._check(other)
        return self * AlgebraicNumber(self.field, self.field.inv_coords(other.coords))

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return self._coerce(other) - self

    def _coerce(self, other):
        if isinstance(other, AlgebraicNumber):
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        raise CoefficientError(f"cannot mix {type(other).__name__} with an algebraic number")

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __bool__(self):
        return not self.is_zero()

    def conjugate(self) -> "AlgebraicNumber":
        return AlgebraicNumber(self.field, self.field.conj_coords(self.coords))

    def embed(self, k: int | None = None) -> tuple[complex, float]:
        return self.field.embed_coords(self.coords, k)

    def __complex__(self):
        return self.embed()[0]

    def magnitude_upper(self) -> float:
        v, r = self.embed()
        return abs(v) + r

    def __repr__(self):
        return "AlgebraicNumber(" + ", ".join(str(c) for c in self.coords) + ")"


# -- tagged-coefficient helpers ------------------------------------------------

TAGS = ("rational", "algebraic", "float")


def coeff_tag(c) -> str:
    if isinstance(c, Fraction) or isinstance(c, int):
        return "rational"
    if isinstance(c, AlgebraicNumber):
        return "algebraic"
    if isinstance(c, complex) or isinstance(c, float):
        return "float"
    raise CoefficientError(f"unsupported coefficient type {type(c).__name__}")


def field_arith(a, b, op: str):
    """Exact +,-,*,/ on same-tag coefficients; IEEE semantics for floats."""
    ta, tb = coeff_tag(a), coeff_tag(b)
    if ta != tb:
        raise CoefficientError(f"mixed coefficient tags {ta}/{tb}")
    if ta == "rational":
        a, b = Fraction(a), Fraction(b)
    elif ta == "float":
        a, b = complex(a), complex(b)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if ta != "float" and (b == 0 if ta == "rational" else b.is_zero()):
            raise ZeroDivisionError("division by zero coefficient")
        return a / b
    raise CoefficientError(f"unknown operation {op!r}")


def coeff_conjugate(c):
    if isinstance(c, (Fraction, int)):
        return Fraction(c)
    if isinstance(c, AlgebraicNumber):
        return c.conjugate()
    return complex(c).conjugate()


def coeff_is_zero(c) -> bool:
    if isinstance(c, AlgebraicNumber):
        return c.is_zero()
    return c == 0


def coeff_magnitude_upper(c) -> float | Fraction:
    """Upper bound for |c|; exact for rationals, certified for algebraics."""
    if isinstance(c, (Fraction, int)):
        return abs(Fraction(c))
    if isinstance(c, AlgebraicNumber):
        return c.magnitude_upper()
    return abs(complex(c))


def coeff_to_complex(c) -> complex:
    if isinstance(c, (Fraction, int)):
        return complex(Fraction(c))
    if isinstance(c, AlgebraicNumber):
        return complex(c)
    return complex(c)


def embed(field: NumberField, k: int, a: AlgebraicNumber) -> tuple[complex, float]:
    """sigma_k(a) with a propagated interval radius."""
    return field.embed_coords(a.coords, k)


def clear_denominators(entries) -> int:
    """lcm of all coordinate denominators in a nested iterable of coefficients."""
    lcm = 1
    stack = [entries]
    while stack:
        item = stack.pop()
        if isinstance(item, (list, tuple)):
            stack.extend(item)
        elif isinstance(item, AlgebraicNumber):
            for c in item.coords:
                lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
        elif isinstance(item, (Fraction, int)):
            d = Fraction(item).denominator
            lcm = lcm * d // math.gcd(lcm, d)
        else:
            raise CoefficientError("clear_denominators needs exact coefficients")
    return lcm
