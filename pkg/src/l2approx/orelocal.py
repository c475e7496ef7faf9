"""Constructive Ore condition for amenable group algebras, and
specialization of polynomial-coefficient zero divisors to rational ones.

The Ore solver follows the counting argument: pick a Folner set X with
sum_{g in Z} |Xg - X| < |X| (Z the union of the two supports), set up
the homogeneous linear system for beta sigma = tau alpha with beta, tau
supported on X, and return an exact nullspace vector with tau != 0.  The
returned identity is always re-verified by exact multiplication.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .exactrank import nullspace_vector, rational_rank
from .groupring import GroupRingElement, GroupRingError, element
from .groups import GroupSpec, build_folner


class OreError(ValueError):
    pass


@dataclass
class OreSolution:
    beta: GroupRingElement
    tau: GroupRingElement
    support: frozenset                 # the Folner set X used
    level: int
    counting_lhs: int                  # sum over Z of |Xg - X|
    equations: int
    unknowns: int

    def residual(self, alpha: GroupRingElement, sigma: GroupRingElement) -> GroupRingElement:
        return self.beta * sigma - self.tau * alpha

    @property
    def counting_ok(self) -> bool:
        return self.counting_lhs < len(self.support)


def _right_translate_defect(group: GroupSpec, members: frozenset, g) -> int:
    """|X g - X| by enumeration."""
    return sum(1 for x in members if group.op(x, g) not in members)


def _folner_candidates(group: GroupSpec):
    if group.kind == "finite":
        yield 1, frozenset(group.elements())
        return
    for k in itertools.count(1):
        yield k, build_folner(group, k).members


def ore_solve(alpha: GroupRingElement, sigma: GroupRingElement,
              max_grow: int = 6) -> OreSolution:
    """Find beta, tau with beta sigma = tau alpha, tau != 0, exactly.

    Requires an amenable group model and exact coefficients; free-group
    input is rejected.  When every nullspace vector found at the accepted
    Folner level has tau = 0, the set is grown (a bounded number of
    times) before failing loudly.
    """
    group = alpha.group
    if group != sigma.group:
        raise OreError("alpha and sigma live over different groups")
    if not group.amenable_model:
        raise OreError("no Folner exhaustion for a free group")
    if alpha.tag == "float" or sigma.tag == "float":
        raise OreError("exact coefficients required")
    if sigma.is_zero():
        raise OreError("sigma must be nonzero")
    support_z = sorted(set(alpha.support()) | set(sigma.support()), key=_sort_key)
    grown = 0
    for level, members in _folner_candidates(group):
        lhs = sum(_right_translate_defect(group, members, g) for g in support_z)
        if lhs >= len(members):
            continue
        sol = _solve_at_level(alpha, sigma, group, members, level, lhs)
        if sol is not None:
            return sol
        grown += 1
        if grown >= max_grow:
            raise OreError("no solution with tau != 0 found within the retry budget")
        if group.kind == "finite":
            raise OreError("no solution with tau != 0 over the finite group algebra")
    raise OreError("unreachable")


def _sort_key(g):
    return (0, g) if isinstance(g, int) else (len(g), g)


def _solve_at_level(alpha, sigma, group, members, level, lhs):
    X = sorted(members, key=_sort_key)
    pos = {x: i for i, x in enumerate(X)}
    nx = len(X)
    # unknowns: b_x (columns 0..nx-1), t_x (columns nx..2nx-1)
    rows_index: dict = {}

    def row_of(h):
        if h not in rows_index:
            rows_index[h] = len(rows_index)
        return rows_index[h]

    coeffs: dict = {}
    for x in X:
        for g, c in sigma.terms:
            r = row_of(group.op(x, g))
            coeffs[(r, pos[x])] = coeffs.get((r, pos[x]), Fraction(0)) + Fraction(c)
        for g, c in alpha.terms:
            r = row_of(group.op(x, g))
            key = (r, nx + pos[x])
            coeffs[key] = coeffs.get(key, Fraction(0)) - Fraction(c)
    n_rows = len(rows_index)
    mat = [[Fraction(0)] * (2 * nx) for _ in range(n_rows)]
    for (r, c), v in coeffs.items():
        mat[r][c] = v
    vec = nullspace_vector(mat, prefer_cols=set(range(nx, 2 * nx)))
    if vec is None:
        return None
    beta = element(group, {x: vec[pos[x]] for x in X}, "rational")
    tau = element(group, {x: vec[nx + pos[x]] for x in X}, "rational")
    if tau.is_zero():
        return None
    sol = OreSolution(beta=beta, tau=tau, support=frozenset(members), level=level,
                      counting_lhs=lhs, equations=n_rows, unknowns=2 * nx)
    if not sol.residual(alpha, sigma).is_zero():
        raise OreError("internal error: reconstructed solution failed exact verification")
    return sol


# -- polynomial-coefficient group-ring elements ---------------------------------

@dataclass(frozen=True)
class PolyGroupRingElement:
    """Group-ring element whose coefficients are polynomials in Q[x1..xn].

    Coefficients are {exponent tuple: Fraction} dictionaries.
    """

    group: GroupSpec
    nvars: int
    terms: tuple            # sorted ((group element, poly-dict-as-tuple), ...)

    @staticmethod
    def make(group: GroupSpec, nvars: int, terms: dict) -> "PolyGroupRingElement":
        norm = {}
        for g, poly in terms.items():
            group.check_element(g)
            clean = _poly_clean(poly, nvars)
            if clean:
                norm[g] = clean
        packed = tuple(sorted(
            (g, tuple(sorted(clean.items()))) for g, clean in norm.items()))
        return PolyGroupRingElement(group, nvars, packed)

    def as_dict(self) -> dict:
        return {g: dict(poly) for g, poly in self.terms}

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, g) -> dict:
        for h, poly in self.terms:
            if h == g:
                return dict(poly)
        return {}

    def __mul__(self, other: "PolyGroupRingElement") -> "PolyGroupRingElement":
        if self.group != other.group or self.nvars != other.nvars:
            raise OreError("mismatched polynomial group-ring elements")
        out: dict = {}
        for g, pa in self.terms:
            for h, pb in other.terms:
                k = self.group.op(g, h)
                acc = out.setdefault(k, {})
                for ea, ca in pa:
                    for eb, cb in pb:
                        e = tuple(x + y for x, y in zip(ea, eb))
                        acc[e] = acc.get(e, Fraction(0)) + ca * cb
        return PolyGroupRingElement.make(self.group, self.nvars, out)

    def substitute(self, point) -> GroupRingElement:
        """Evaluate every coefficient polynomial at the rational point."""
        point = [Fraction(p) for p in point]
        if len(point) != self.nvars:
            raise OreError("substitution point has the wrong arity")
        vals = {}
        for g, poly in self.terms:
            acc = Fraction(0)
            for e, c in poly:
                term = c
                for x, k in zip(point, e):
                    term *= x ** k
                acc += term
            vals[g] = acc
        return element(self.group, vals, "rational")

    def to_json(self) -> dict:
        """Group-ring schema with {"poly": {"(e1,...,en)": "p/q"}} coefficients."""
        from .groups import GroupSpec
        terms = []
        for g, poly in self.terms:
            enc = {",".join(str(v) for v in e): str(c) for e, c in poly}
            terms.append({"g": GroupSpec.element_to_json(g), "poly": enc})
        return {"group": self.group.to_json(), "nvars": self.nvars, "terms": terms}

    @staticmethod
    def from_json(d: dict) -> "PolyGroupRingElement":
        from .groups import GroupSpec
        group = GroupSpec.from_json(d["group"])
        nvars = int(d["nvars"])
        terms = {}
        for t in d["terms"]:
            g = group.element_from_json(t["g"])
            poly = {tuple(int(v) for v in e.split(",")): Fraction(c)
                    for e, c in t["poly"].items()}
            terms[g] = poly
        return PolyGroupRingElement.make(group, nvars, terms)


def _poly_clean(poly: dict, nvars: int) -> dict:
    out = {}
    for e, c in poly.items():
        e = tuple(int(v) for v in e)
        if len(e) != nvars:
            raise OreError("exponent arity mismatch")
        c = Fraction(c)
        if c:
            out[e] = out.get(e, Fraction(0)) + c
    return {e: c for e, c in out.items() if c}


def _poly_substitute_partial(poly: dict, var: int, value: Fraction, nvars: int) -> dict:
    out = {}
    for e, c in poly.items():
        scaled = c * value ** e[var]
        e2 = e[:var] + (0,) + e[var + 1:]
        out[e2] = out.get(e2, Fraction(0)) + scaled
    return {e: c for e, c in out.items() if c}


def specialize_zero_divisor(a: PolyGroupRingElement, b: PolyGroupRingElement,
                            g, g_prime) -> tuple[GroupRingElement, GroupRingElement, list[Fraction]]:
    """From a*b = 0 over Q[x1..xn]G, produce rational A*B = 0 with A, B != 0.

    The substitution point is found variable by variable over 0, 1, 2, ...
    keeping the designated coefficients a_g and b_{g'} nonzero; a nonzero
    polynomial has only finitely many roots, so the scan terminates.
    """
    prod = a * b
    if not prod.is_zero():
        raise OreError(f"precondition a*b = 0 fails; product has support "
                       f"{[g for g, _ in prod.terms]}")
    pa = a.coefficient(g)
    pb = b.coefficient(g_prime)
    if not pa or not pb:
        raise OreError("designated coefficients must be nonzero polynomials")
    nvars = a.nvars
    point: list[Fraction] = []
    for var in range(nvars):
        deg = max([e[var] for e in pa] + [e[var] for e in pb], default=0)
        for cand in range(deg * 2 + 2):
            val = Fraction(cand)
            qa = _poly_substitute_partial(pa, var, val, nvars)
            qb = _poly_substitute_partial(pb, var, val, nvars)
            if qa and qb:
                pa, pb = qa, qb
                point.append(val)
                break
        else:
            raise OreError("no substitution value kept the designated coefficients nonzero")
    A = a.substitute(point)
    B = b.substitute(point)
    if A.is_zero() or B.is_zero():
        raise OreError("internal error: specialization killed a factor")
    if not (A * B).is_zero():
        raise OreError("internal error: specialization is not a ring homomorphism")
    return A, B, point
