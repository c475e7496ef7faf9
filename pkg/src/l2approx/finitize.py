"""Finite realizations of group-ring matrices.

Two schemes:

* quotient models -- each entry sum c_g * g is replaced by the left
  regular representation of its image in the finite quotient Q, giving a
  (d_r*|Q|) x (d_c*|Q|) block matrix;
* Folner models   -- the compression P B P* to a Folner set X, with
  entry at (x, y) equal to the coefficient of x y^-1.

Quotient realization is a ring *-homomorphism; Folner compression is
not, so the spectral square of a Folner model is always formed as
B[i]* B[i] from the compressed matrix itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as _field
from fractions import Fraction

import numpy as np

from .coefficients import coeff_conjugate, coeff_is_zero, coeff_magnitude_upper, coeff_to_complex
from .groupring import GroupRingError, GroupRingMatrix, KappaReport
from .groups import FolnerLevel, GroupSpec, QuotientMap

MAX_MODEL_DIM = 6000


class ModelError(ValueError):
    pass


@dataclass
class FiniteModel:
    """Sparse exact (or dense float) realization of a matrix at one level."""

    shape: tuple[int, int]
    block_shape: tuple[int, int]            # (d_r, d_c)
    normalization: int                       # N = |Q| or |X_k|
    tag: str
    field: object
    entries: dict                            # (row, col) -> coefficient
    provenance: dict
    exact: bool
    cyclic_poly: dict | None = None          # {exponent mod N: coeff} when 1x1 over Z/N
    _dense: np.ndarray | None = _field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.shape[0]

    def is_square(self) -> bool:
        return self.shape[0] == self.shape[1]

    def to_dense(self) -> np.ndarray:
        """Complex dense copy (real dtype when all entries are real)."""
        if self._dense is None:
            arr = np.zeros(self.shape, dtype=complex)
            for (i, j), c in self.entries.items():
                arr[i, j] = coeff_to_complex(c)
            if np.all(arr.imag == 0.0):
                arr = arr.real.copy()
            self._dense = arr
        return self._dense

    def conjugate_transpose_entries(self) -> dict:
        return {(j, i): coeff_conjugate(c) for (i, j), c in self.entries.items()}

    def hermitian_defect(self) -> float:
        if not self.is_square():
            raise ModelError("hermitian defect of a rectangular model")
        a = self.to_dense()
        return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0

    def check_hermitian_exact(self, sample_cap: int = 1500) -> bool:
        """Exact Hermitian check (entrywise) for exact tags; full below the cap."""
        if not self.is_square():
            return False
        if not self.exact:
            scale = max(1.0, float(np.max(np.abs(self.to_dense()))) if self.entries else 1.0)
            return self.hermitian_defect() <= 1e-12 * scale
        if self.dim <= sample_cap:
            other = self.conjugate_transpose_entries()
            mine = {k: v for k, v in self.entries.items() if not coeff_is_zero(v)}
            other = {k: v for k, v in other.items() if not coeff_is_zero(v)}
            if mine.keys() != other.keys():
                return False
            return all(coeff_is_zero(mine[k] - other[k]) for k in mine)
        for (i, j), c in list(self.entries.items())[:20000]:
            d = self.entries.get((j, i))
            if d is None or not coeff_is_zero(coeff_conjugate(d) - c):
                return False
        return True

    def kappa(self) -> KappaReport:
        """Entrywise kappa of the concrete finite matrix."""
        row_counts: dict[int, int] = {}
        col_counts: dict[int, int] = {}
        sup = Fraction(0)
        for (i, j), c in self.entries.items():
            if coeff_is_zero(c):
                continue
            row_counts[i] = row_counts.get(i, 0) + 1
            col_counts[j] = col_counts.get(j, 0) + 1
            m = coeff_magnitude_upper(c)
            sup = m if m > sup else sup
        s_row = max(row_counts.values(), default=0)
        s_col = max(col_counts.values(), default=0)
        exact = None
        if isinstance(sup, Fraction):
            root = math.isqrt(s_row * s_col)
            if root * root == s_row * s_col:
                exact = root * sup
        return KappaReport(s_row, s_col, sup, exact)

    def product_with_adjoint_of(self, other: "FiniteModel") -> "FiniteModel":
        """other^* @ self, exact sparse product (the Folner spectral square)."""
        if other.shape[0] != self.shape[0]:
            raise ModelError("shape mismatch")
        by_row: dict[int, list] = {}
        for (i, j), c in self.entries.items():
            by_row.setdefault(i, []).append((j, c))
        out: dict = {}
        for (i, k), c in other.entries.items():
            cc = coeff_conjugate(c)
            for j, d in by_row.get(i, []):
                key = (k, j)
                prev = out.get(key)
                out[key] = cc * d if prev is None else prev + cc * d
        out = {k: v for k, v in out.items() if not coeff_is_zero(v)}
        return FiniteModel(
            shape=(other.shape[1], self.shape[1]),
            block_shape=(other.block_shape[1], self.block_shape[1]),
            normalization=self.normalization, tag=self.tag, field=self.field,
            entries=out, provenance={**self.provenance, "product": "adjoint-square"},
            exact=self.exact)

    def spectral_square(self) -> "FiniteModel":
        """B[i]* B[i] for this model."""
        return self.product_with_adjoint_of(self)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("row,col,re,im\n")
            for (i, j) in sorted(self.entries):
                z = coeff_to_complex(self.entries[(i, j)])
                fh.write(f"{i},{j},{z.real:.12e},{z.imag:.12e}\n")


def _check_cap(rows: int, cols: int):
    if max(rows, cols) > MAX_MODEL_DIM:
        raise ModelError(
            f"model dimension {max(rows, cols)} exceeds the dense cap {MAX_MODEL_DIM}; "
            "use a smaller quotient or fewer Folner levels")


def quotient_model(B: GroupRingMatrix, q: QuotientMap) -> FiniteModel:
    """Image of B under the quotient, in the left regular representation of Q."""
    if q.source != B.group:
        raise ModelError("quotient map is for a different group")
    Q = q.image_group
    n = Q.order
    d_r, d_c = B.rows, B.cols
    _check_cap(d_r * n, d_c * n)
    entries: dict = {}
    for i in range(d_r):
        for j in range(d_c):
            for g, c in B.entries[i][j].terms:
                h = q.apply(g)
                for y in range(n):
                    x = Q.op(h, y)
                    key = (i * n + x, j * n + y)
                    prev = entries.get(key)
                    entries[key] = c if prev is None else prev + c
    entries = {k: v for k, v in entries.items() if not coeff_is_zero(v)}
    cyc = None
    if d_r == d_c == 1 and B.group.kind == "free-abelian" and B.group.rank == 1 \
            and q.moduli is not None:
        cyc = {}
        m = q.moduli[0]
        for g, c in B.entries[0][0].terms:
            e = g[0] % m
            if e in cyc:
                cyc[e] = cyc[e] + c
            else:
                cyc[e] = c
        cyc = {e: c for e, c in cyc.items() if not coeff_is_zero(c)}
    model = FiniteModel(
        shape=(d_r * n, d_c * n), block_shape=(d_r, d_c), normalization=n,
        tag=B.tag, field=B.field, entries=entries,
        provenance={"scheme": "quotient", "size": n, "matrix": B.stable_hash()},
        exact=B.tag != "float", cyclic_poly=cyc)
    if B.is_self_adjoint() and not model.check_hermitian_exact():
        raise ModelError("quotient model of a self-adjoint matrix is not Hermitian")
    return model


def folner_model(B: GroupRingMatrix, level: FolnerLevel) -> FiniteModel:
    """Compression P_i B P_i* to the Folner set: entry (x,y) = coeff of x y^-1."""
    if not B.group.amenable_model:
        raise ModelError("no Folner exhaustion for a free group")
    if level.group != B.group:
        raise ModelError("Folner level is for a different group")
    ordered = level.ordered()
    pos = {g: idx for idx, g in enumerate(ordered)}
    n = len(ordered)
    d_r, d_c = B.rows, B.cols
    _check_cap(d_r * n, d_c * n)
    entries: dict = {}
    for i in range(d_r):
        for j in range(d_c):
            for g, c in B.entries[i][j].terms:
                for y_idx, y in enumerate(ordered):
                    x = B.group.op(g, y)
                    x_idx = pos.get(x)
                    if x_idx is not None:
                        entries[(i * n + x_idx, j * n + y_idx)] = c
    model = FiniteModel(
        shape=(d_r * n, d_c * n), block_shape=(d_r, d_c), normalization=n,
        tag=B.tag, field=B.field, entries=entries,
        provenance={"scheme": "folner", "level": level.index, "size": n,
                    "matrix": B.stable_hash()},
        exact=B.tag != "float")
    if B.is_self_adjoint() and not model.check_hermitian_exact():
        raise ModelError("Folner compression of a self-adjoint matrix is not Hermitian")
    return model


def amenable_error_term(B: GroupRingMatrix, level: FolnerLevel) -> Fraction:
    """d * |N_r(X_k)| / |X_k| with r the support radius of B (exact rational)."""
    from .groups import boundary_neighborhood
    if not B.group.amenable_model:
        raise ModelError("no Folner exhaustion for a free group")
    r = B.support_radius()
    if r == 0:
        return Fraction(0)
    nbhd = boundary_neighborhood(B.group, level.members, r)
    return Fraction(B.cols * len(nbhd), level.size)
