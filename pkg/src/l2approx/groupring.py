"""Group-ring elements and matrices: adjoint, convolution, traces, kappa.

Matrices act on l2(G)^cols by left convolution per entry, so a d_r x d_c
matrix maps l2(G)^{d_c} -> l2(G)^{d_r}.  The kappa report packages the
row/column support counts and the sup of coefficient magnitudes into the
explicit operator-norm bound sqrt(S * S_adj) * sup.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .coefficients import (AlgebraicNumber, CoefficientError, NumberField,
                           coeff_conjugate, coeff_is_zero, coeff_magnitude_upper,
                           coeff_tag, coeff_to_complex)
from .groups import Element, GroupSpec


class GroupRingError(ValueError):
    pass


def _zero_for(tag: str, field: NumberField | None):
    if tag == "rational":
        return Fraction(0)
    if tag == "algebraic":
        return field.zero()
    return 0j


def _lift_scalar(c, tag: str, field: NumberField | None):
    if tag == "rational":
        return Fraction(c)
    if tag == "algebraic":
        if isinstance(c, AlgebraicNumber):
            return c
        return field.from_rational(Fraction(c))
    return complex(c)


@dataclass(frozen=True)
class GroupRingElement:
    """Finite formal sum of group elements with same-tag coefficients."""

    group: GroupSpec
    tag: str
    field: NumberField | None
    terms: tuple  # sorted tuple of (element, coefficient)

    @staticmethod
    def make(group: GroupSpec, terms: dict, tag: str | None = None,
             field: NumberField | None = None) -> "GroupRingElement":
        pruned = {}
        for g, c in terms.items():
            group.check_element(g)
            if tag is None:
                tag = coeff_tag(c)
                if tag == "algebraic" and field is None:
                    field = c.field
            c = _lift_scalar(c, tag, field)
            if not coeff_is_zero(c):
                pruned[g] = pruned.get(g, _zero_for(tag, field)) + c
        pruned = {g: c for g, c in pruned.items() if not coeff_is_zero(c)}
        if tag is None:
            tag = "rational"
        return GroupRingElement(group, tag, field,
                                tuple(sorted(pruned.items(), key=lambda t: _key(t[0]))))

    def as_dict(self) -> dict:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> list[Element]:
        return [g for g, _ in self.terms]

    def support_radius(self) -> int:
        return max((self.group.word_length(g) for g, _ in self.terms), default=0)

    def coefficient(self, g: Element):
        for h, c in self.terms:
            if h == g:
                return c
        return _zero_for(self.tag, self.field)

    def identity_coefficient(self):
        return self.coefficient(self.group.identity())

    def __add__(self, other):
        self._compat(other)
        out = dict(self.terms)
        for g, c in other.terms:
            out[g] = out.get(g, _zero_for(self.tag, self.field)) + c
        return GroupRingElement.make(self.group, out, self.tag, self.field)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return GroupRingElement(self.group, self.tag, self.field,
                                tuple((g, -c) for g, c in self.terms))

    def __mul__(self, other):
        """Convolution product."""
        self._compat(other)
        out: dict = {}
        zero = _zero_for(self.tag, self.field)
        for g, a in self.terms:
            for h, b in other.terms:
                k = self.group.op(g, h)
                out[k] = out.get(k, zero) + a * b
        return GroupRingElement.make(self.group, out, self.tag, self.field)

    def scale(self, c):
        c = _lift_scalar(c, self.tag, self.field)
        return GroupRingElement.make(self.group,
                                     {g: a * c for g, a in self.terms},
                                     self.tag, self.field)

    def adjoint(self) -> "GroupRingElement":
        """Coefficient conj(c) at g^-1 for each term c at g."""
        return GroupRingElement.make(
            self.group,
            {self.group.inv(g): coeff_conjugate(c) for g, c in self.terms},
            self.tag, self.field)

    def _compat(self, other):
        if self.group != other.group:
            raise GroupRingError("mismatched group specs")
        if self.tag != other.tag:
            raise GroupRingError(f"mixed coefficient tags {self.tag}/{other.tag}")

    def __eq__(self, other):
        return isinstance(other, GroupRingElement) and self.group == other.group \
            and self.tag == other.tag and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash((self.group.kind, self.tag, self.terms))


def _key(g: Element):
    return (0, g) if isinstance(g, int) else (len(g), g)


@dataclass(frozen=True)
class KappaReport:
    """Support counts, coefficient sup, and the norm bound they certify."""

    s_row: int
    s_col: int
    coeff_sup: Fraction | float
    kappa_exact: Fraction | None

    @property
    def kappa(self) -> float:
        if self.kappa_exact is not None:
            return float(self.kappa_exact)
        return math.sqrt(self.s_row * self.s_col) * float(self.coeff_sup)

    def as_json(self) -> dict:
        def num(x):
            if isinstance(x, Fraction):
                return int(x) if x.denominator == 1 else float(x)
            return x
        return {"S": self.s_row, "Sstar": self.s_col,
                "inf": num(self.coeff_sup), "kappa": num(self.kappa_exact)
                if self.kappa_exact is not None else self.kappa}


class GroupRingMatrix:
    """d_r x d_c matrix of group-ring elements over one group and tag."""

    def __init__(self, group: GroupSpec, entries, tag: str | None = None,
                 field: NumberField | None = None):
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        if any(len(r) != cols for r in entries):
            raise GroupRingError("ragged entry rows")
        for row in entries:
            for e in row:
                if e.group != group:
                    raise GroupRingError("entry over a different group")
                if tag is None and not e.is_zero():
                    tag, field = e.tag, e.field
        self.group = group
        self.tag = tag or entries[0][0].tag
        self.field = field if field is not None else entries[0][0].field
        for row in entries:
            for e in row:
                if e.tag != self.tag and not e.is_zero():
                    raise GroupRingError("mixed coefficient tags in one matrix")
        self.entries = tuple(tuple(row) for row in entries)
        self.rows = rows
        self.cols = cols

    # -- constructors -----------------------------------------------------

    @staticmethod
    def from_dicts(group: GroupSpec, entry_dicts, tag=None, field=None) -> "GroupRingMatrix":
        ents = [[GroupRingElement.make(group, d, tag, field) for d in row]
                for row in entry_dicts]
        return GroupRingMatrix(group, ents, tag, field)

    @staticmethod
    def identity(group: GroupSpec, d: int, tag="rational", field=None) -> "GroupRingMatrix":
        e = group.identity()
        ents = [[GroupRingElement.make(group, {e: 1} if i == j else {}, tag, field)
                 for j in range(d)] for i in range(d)]
        return GroupRingMatrix(group, ents, tag, field)

    def zero_like(self, rows, cols) -> "GroupRingMatrix":
        z = GroupRingElement.make(self.group, {}, self.tag, self.field)
        return GroupRingMatrix(self.group, [[z] * cols for _ in range(rows)],
                               self.tag, self.field)

    # -- algebra ----------------------------------------------------------

    def __add__(self, other):
        self._compat(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise GroupRingError("shape mismatch in addition")
        return GroupRingMatrix(
            self.group,
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
            self.tag, self.field)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __matmul__(self, other):
        self._compat(other)
        if self.cols != other.rows:
            raise GroupRingError("shape mismatch in product")
        zero = GroupRingElement.make(self.group, {}, self.tag, self.field)
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = zero
                for k in range(self.cols):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return GroupRingMatrix(self.group, out, self.tag, self.field)

    def scale(self, c):
        return GroupRingMatrix(self.group,
                               [[e.scale(c) for e in row] for row in self.entries],
                               self.tag, self.field)

    def adjoint(self) -> "GroupRingMatrix":
        out = [[self.entries[i][j].adjoint() for i in range(self.rows)]
               for j in range(self.cols)]
        return GroupRingMatrix(self.group, out, self.tag, self.field)

    def is_self_adjoint(self) -> bool:
        if self.rows != self.cols:
            return False
        return self == self.adjoint()

    def delta(self) -> "GroupRingMatrix":
        """B* B, the positive square used by every spectral pipeline."""
        return self.adjoint() @ self

    def poly_eval(self, coeffs) -> "GroupRingMatrix":
        """p(A) for a square A; coeffs c_0..c_n, rational or matching tag."""
        if self.rows != self.cols:
            raise GroupRingError("polynomial evaluation needs a square matrix")
        out = self.zero_like(self.rows, self.cols)
        for c in reversed(list(coeffs)):
            out = out @ self
            ident = GroupRingMatrix.identity(self.group, self.rows, self.tag, self.field)
            out = out + ident.scale(c)
        return out

    def __eq__(self, other):
        return isinstance(other, GroupRingMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def _compat(self, other):
        if self.group != other.group or self.tag != other.tag:
            raise GroupRingError("mismatched group or tag")

    # -- invariants ---------------------------------------------------------

    def support_radius(self) -> int:
        return max((e.support_radius() for row in self.entries for e in row), default=0)

    def trace(self):
        """tr_G: sum of identity coefficients down the diagonal (exact)."""
        if self.rows != self.cols:
            raise GroupRingError("trace needs a square matrix")
        acc = _zero_for(self.tag, self.field)
        for i in range(self.rows):
            acc = acc + self.entries[i][i].identity_coefficient()
        return acc

    def kappa(self) -> KappaReport:
        """Norm bound data; S counts collapse the l2(G) index by equivariance."""
        s_row = max((sum(len(self.entries[i][j].terms) for j in range(self.cols))
                     for i in range(self.rows)), default=0)
        s_col = max((sum(len(self.entries[i][j].terms) for i in range(self.rows))
                     for j in range(self.cols)), default=0)
        sups = [coeff_magnitude_upper(c)
                for row in self.entries for e in row for _, c in e.terms]
        if not sups:
            return KappaReport(0, 0, Fraction(0), Fraction(0))
        sup = max(sups)
        exact = None
        if isinstance(sup, Fraction):
            root = math.isqrt(s_row * s_col)
            if root * root == s_row * s_col:
                exact = root * sup
        return KappaReport(s_row, s_col, sup, exact)

    # -- field conjugation -----------------------------------------------

    def galois_conjugate(self, k: int) -> "GroupRingMatrix":
        """sigma_k applied coefficient-wise (exactly, by re-distinguishing the root)."""
        if self.tag == "float":
            raise GroupRingError("galois conjugation needs exact algebraic coefficients")
        if self.tag == "rational":
            if k != 1:
                raise GroupRingError("rational matrices only have sigma_1")
            return self
        view = self.field.with_distinguished(k)
        ents = [[GroupRingElement.make(
            self.group,
            {g: AlgebraicNumber(view, c.coords) for g, c in e.terms},
            "algebraic", view) for e in row] for row in self.entries]
        return GroupRingMatrix(self.group, ents, "algebraic", view)

    def embedding_count(self) -> int:
        if self.tag == "algebraic":
            return self.field.embedding_count
        return 1

    # -- induction to a supergroup -----------------------------------------

    def induce(self, target: GroupSpec, element_map) -> "GroupRingMatrix":
        """Push the matrix along an injective homomorphism given elementwise."""
        ents = [[GroupRingElement.make(target,
                                       {element_map(g): c for g, c in e.terms},
                                       self.tag, self.field)
                 for e in row] for row in self.entries]
        return GroupRingMatrix(target, ents, self.tag, self.field)

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        ents = []
        for i, row in enumerate(self.entries):
            for j, e in enumerate(row):
                if e.is_zero():
                    continue
                ents.append({"r": i, "c": j,
                             "terms": [{"g": GroupSpec.element_to_json(g),
                                        "coeff": _coeff_to_json(c)} for g, c in e.terms]})
        d = {"group": self.group.to_json(), "tag": self.tag,
             "rows": self.rows, "cols": self.cols, "entries": ents}
        if self.tag == "algebraic":
            d["field"] = self.field.to_json()
        return d

    @staticmethod
    def from_json(d: dict) -> "GroupRingMatrix":
        group = GroupSpec.from_json(d["group"])
        tag = d["tag"]
        field = NumberField.from_json(d["field"]) if tag == "algebraic" else None
        dicts = [[{} for _ in range(d["cols"])] for _ in range(d["rows"])]
        for ent in d["entries"]:
            cell = dicts[ent["r"]][ent["c"]]
            for t in ent["terms"]:
                g = group.element_from_json(t["g"])
                cell[g] = _coeff_from_json(t["coeff"], tag, field)
        return GroupRingMatrix.from_dicts(group, dicts, tag, field)

    def stable_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _coeff_to_json(c):
    if isinstance(c, Fraction):
        return {"num": c.numerator, "den": c.denominator}
    if isinstance(c, AlgebraicNumber):
        return {"coords": [{"num": x.numerator, "den": x.denominator} for x in c.coords]}
    c = complex(c)
    return [c.real, c.imag]


def _coeff_from_json(v, tag, field):
    if tag == "rational":
        return Fraction(v["num"], v["den"])
    if tag == "algebraic":
        return field.element([Fraction(x["num"], x["den"]) for x in v["coords"]])
    return complex(v[0], v[1])


def clear_matrix_denominators(M: GroupRingMatrix) -> tuple[int, GroupRingMatrix]:
    """(N, N*M) with N the lcm of all coefficient denominators.

    The scaled matrix has integer (or algebraic-integer-coordinate)
    entries; kernels are unchanged.
    """
    from .coefficients import clear_denominators
    if M.tag == "float":
        raise GroupRingError("denominator clearing needs exact coefficients")
    n = clear_denominators([[c for _, c in e.terms] for row in M.entries for e in row])
    return n, (M if n == 1 else M.scale(n))


# -- convenience builders ----------------------------------------------------

def element(group: GroupSpec, terms: dict, tag=None, field=None) -> GroupRingElement:
    return GroupRingElement.make(group, terms, tag, field)


def single(group: GroupSpec, e: GroupRingElement) -> GroupRingMatrix:
    return GroupRingMatrix(group, [[e]], e.tag, e.field)


def laurent(group: GroupSpec, coeffs: dict, tag=None, field=None) -> GroupRingMatrix:
    """1x1 matrix over Z from {exponent: coefficient}."""
    if group.kind != "free-abelian" or group.rank != 1:
        raise GroupRingError("laurent() expects Z")
    return single(group, element(group, {(e,): c for e, c in coeffs.items()}, tag, field))
