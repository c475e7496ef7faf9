"""Supported groups, quotient maps, and Folner exhaustions.

Three group families are modelled, each with a trivially verifiable
canonical form:

* free abelian Z^n   -- elements are integer exponent tuples,
* free F_k           -- elements are reduced words (tuples of signed
                        letters, letter i > 0 is the i-th generator,
                        -i its inverse),
* explicit finite    -- elements are indices into a multiplication
                        table; index 0 must be the identity.

The generating set S is always symmetric (closed under inversion).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

Element = tuple | int


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class GroupSpec:
    """One of the supported group families, with its generating set."""

    kind: str                                  # "free-abelian" | "free" | "finite"
    rank: int = 0
    table: tuple[tuple[int, ...], ...] | None = None
    gen_indices: tuple[int, ...] | None = None  # finite groups only
    _inverse: tuple[int, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind in ("free-abelian", "free"):
            if self.rank < 1:
                raise GroupError(f"{self.kind} rank must be >= 1")
        elif self.kind == "finite":
            self._validate_table()
        else:
            raise GroupError(f"unknown group kind {self.kind!r}")

    # -- finite-table validation ------------------------------------------

    def _validate_table(self):
        t = self.table
        if not t:
            raise GroupError("finite group needs a multiplication table")
        m = len(t)
        if any(len(row) != m for row in t):
            raise GroupError("multiplication table must be square")
        if any(not (0 <= v < m) for row in t for v in row):
            raise GroupError("table entries must be element indices")
        if any(t[0][a] != a or t[a][0] != a for a in range(m)):
            raise GroupError("index 0 must be the identity")
        inv = [None] * m
        for a in range(m):
            for b in range(m):
                if t[a][b] == 0:
                    inv[a] = b
            if inv[a] is None or t[inv[a]][a] != 0:
                raise GroupError(f"element {a} has no two-sided inverse")
        self._check_associative(t, m)
        object.__setattr__(self, "_inverse", tuple(inv))
        gens = self.gen_indices
        if gens is None:
            gens = tuple(range(1, m))
        gens = tuple(sorted(set(gens)))
        if any(g == 0 for g in gens):
            gens = tuple(g for g in gens if g != 0)
        for g in gens:
            if inv[g] not in gens:
                raise GroupError(f"generator set not symmetric: {g} lacks its inverse")
        if self._closure(gens) != set(range(m)):
            raise GroupError("generators do not generate the group")
        object.__setattr__(self, "gen_indices", gens)

    @staticmethod
    def _check_associative(t, m: int) -> None:
        """Light's test: associativity on a generating set implies it everywhere."""
        def closure(gens):
            seen = {0}
            frontier = [0]
            while frontier:
                a = frontier.pop()
                for g in gens:
                    b = t[a][g]
                    if b not in seen:
                        seen.add(b)
                        frontier.append(b)
            return seen

        gens: list[int] = []
        seen = {0}
        for a in range(m):
            if a not in seen:
                gens.append(a)
                seen = closure(gens)
                if len(seen) == m:
                    break
        for g in gens:
            for a in range(m):
                row = t[a]
                tg = t[g]
                tag = t[row[g]]
                for b in range(m):
                    if row[tg[b]] != tag[b]:
                        raise GroupError("multiplication table is not associative")

    def _closure(self, gens: Iterable[int]) -> set[int]:
        t = self.table
        seen = {0}
        frontier = [0]
        while frontier:
            a = frontier.pop()
            for g in gens:
                b = t[a][g]
                if b not in seen:
                    seen.add(b)
                    frontier.append(b)
        return seen

    # -- basic structure ---------------------------------------------------

    @property
    def order(self) -> int:
        if self.kind != "finite":
            raise GroupError("infinite group")
        return len(self.table)

    def identity(self) -> Element:
        if self.kind == "free-abelian":
            return (0,) * self.rank
        if self.kind == "free":
            return ()
        return 0

    def elements(self) -> list[Element]:
        if self.kind != "finite":
            raise GroupError("cannot enumerate an infinite group")
        return list(range(self.order))

    def check_element(self, g: Element) -> None:
        if self.kind == "free-abelian":
            if not (isinstance(g, tuple) and len(g) == self.rank
                    and all(isinstance(v, int) for v in g)):
                raise GroupError(f"{g!r} is not a Z^{self.rank} element")
        elif self.kind == "free":
            if not (isinstance(g, tuple)
                    and all(isinstance(v, int) and v != 0 and abs(v) <= self.rank for v in g)):
                raise GroupError(f"{g!r} is not an F_{self.rank} word")
            if any(g[i] == -g[i + 1] for i in range(len(g) - 1)):
                raise GroupError(f"word {g!r} is not reduced")
        else:
            if not (isinstance(g, int) and 0 <= g < self.order):
                raise GroupError(f"{g!r} is not a valid element index")

    def op(self, a: Element, b: Element) -> Element:
        if self.kind == "free-abelian":
            return tuple(x + y for x, y in zip(a, b))
        if self.kind == "free":
            return _reduce_concat(a, b)
        return self.table[a][b]

    def inv(self, a: Element) -> Element:
        if self.kind == "free-abelian":
            return tuple(-x for x in a)
        if self.kind == "free":
            return tuple(-v for v in reversed(a))
        return self._inverse[a]

    def generators(self) -> list[Element]:
        """The symmetric generating set S."""
        if self.kind == "free-abelian":
            gens = []
            for i in range(self.rank):
                e = [0] * self.rank
                e[i] = 1
                gens.append(tuple(e))
                e[i] = -1
                gens.append(tuple(e))
            return gens
        if self.kind == "free":
            return [(i,) for i in range(1, self.rank + 1)] + \
                   [(-i,) for i in range(1, self.rank + 1)]
        return [g for g in self.gen_indices]

    def word_length(self, g: Element) -> int:
        """Distance to the identity in the word metric of S."""
        if self.kind == "free-abelian":
            return sum(abs(v) for v in g)
        if self.kind == "free":
            return len(g)
        return self._finite_lengths()[g]

    def _finite_lengths(self) -> dict[int, int]:
        dist = {0: 0}
        frontier = [0]
        while frontier:
            nxt = []
            for a in frontier:
                for s in self.gen_indices:
                    b = self.table[a][s]
                    if b not in dist:
                        dist[b] = dist[a] + 1
                        nxt.append(b)
            frontier = nxt
        return dist

    def ball(self, r: int) -> set[Element]:
        """All elements of word length <= r (finite for the supported kinds)."""
        if self.kind == "free-abelian":
            out = set()
            rng = range(-r, r + 1)
            for v in itertools.product(rng, repeat=self.rank):
                if sum(abs(x) for x in v) <= r:
                    out.add(v)
            return out
        if self.kind == "finite":
            return {g for g, d in self._finite_lengths().items() if d <= r}
        out = {()}
        frontier = {()}
        for _ in range(r):
            frontier = {self.op(w, s) for w in frontier for s in self.generators()}
            out |= frontier
        return out

    @property
    def amenable_model(self) -> bool:
        """Whether a Folner exhaustion is available for this family."""
        return self.kind in ("free-abelian", "finite")

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        if self.kind == "finite":
            d = {"kind": "finite", "table": [list(r) for r in self.table]}
            if self.gen_indices != tuple(range(1, self.order)):
                d["generators"] = list(self.gen_indices)
            return d
        return {"kind": self.kind, "rank": self.rank}

    @staticmethod
    def from_json(d: dict) -> "GroupSpec":
        kind = d.get("kind")
        if kind == "finite":
            table = tuple(tuple(r) for r in d["table"])
            gens = tuple(d["generators"]) if "generators" in d else None
            return GroupSpec("finite", table=table, gen_indices=gens)
        if kind in ("free-abelian", "free"):
            return GroupSpec(kind, rank=int(d["rank"]))
        raise GroupError(f"unknown group kind {kind!r}")

    def element_from_json(self, v) -> Element:
        g = tuple(v) if isinstance(v, list) else v
        self.check_element(g)
        return g

    @staticmethod
    def element_to_json(g: Element):
        return list(g) if isinstance(g, tuple) else g


def _reduce_concat(a: tuple, b: tuple) -> tuple:
    a = list(a)
    i = 0
    while a and i < len(b) and a[-1] == -b[i]:
        a.pop()
        i += 1
    return tuple(a) + b[i:]


# -- standard constructors --------------------------------------------------

def free_abelian(n: int) -> GroupSpec:
    return GroupSpec("free-abelian", rank=n)


def free_group(k: int) -> GroupSpec:
    return GroupSpec("free", rank=k)


def finite_group(table, generators=None) -> GroupSpec:
    return GroupSpec("finite", table=tuple(tuple(r) for r in table),
                     gen_indices=tuple(generators) if generators else None)


def cyclic_group(n: int) -> GroupSpec:
    table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
    return GroupSpec("finite", table=table)


def product_cyclic_group(moduli: Iterable[int]) -> GroupSpec:
    """Z/m1 x ... x Z/mn with mixed-radix element indexing."""
    moduli = list(moduli)
    if any(m < 1 for m in moduli):
        raise GroupError("moduli must be positive")
    size = 1
    for m in moduli:
        size *= m

    def decode(i):
        out = []
        for m in reversed(moduli):
            out.append(i % m)
            i //= m
        return list(reversed(out))

    def encode(v):
        i = 0
        for x, m in zip(v, moduli):
            i = i * m + (x % m)
        return i

    table = tuple(
        tuple(encode([x + y for x, y in zip(decode(a), decode(b))]) for b in range(size))
        for a in range(size)
    )
    return GroupSpec("finite", table=table)


def permutation_group(perms: list[tuple[int, ...]]) -> GroupSpec:
    """Closure of the given permutations (as tuples p with p[i] = image of i)."""
    n = len(perms[0])
    ident = tuple(range(n))

    def mul(p, q):  # apply q first, then p
        return tuple(p[q[i]] for i in range(n))

    elems = {ident}
    frontier = [ident]
    gens = [tuple(p) for p in perms]
    while frontier:
        a = frontier.pop()
        for g in gens:
            b = mul(a, g)
            if b not in elems:
                elems.add(b)
                frontier.append(b)
    ordered = [ident] + sorted(elems - {ident})
    index = {p: i for i, p in enumerate(ordered)}
    table = tuple(tuple(index[mul(p, q)] for q in ordered) for p in ordered)
    gen_idx = set()
    for g in gens:
        gen_idx.add(index[g])
        gen_idx.add(index[tuple(sorted(range(n), key=lambda i: g[i]))])
    return GroupSpec("finite", table=table, gen_indices=tuple(sorted(gen_idx - {0})) or None), ordered


def symmetric_group(n: int) -> GroupSpec:
    cycle = tuple(list(range(1, n)) + [0])
    swap = tuple([1, 0] + list(range(2, n)))
    spec, _ = permutation_group([cycle, swap])
    return spec


def alternating_group(n: int) -> GroupSpec:
    three = tuple([1, 2, 0] + list(range(3, n)))
    if n % 2 == 1:
        cyc = tuple(list(range(1, n)) + [0])
    else:
        cyc = tuple([0] + list(range(2, n)) + [1])
    spec, _ = permutation_group([three, cyc])
    return spec


# -- quotient maps and chains -----------------------------------------------

@dataclass(frozen=True)
class QuotientMap:
    """A surjection of a supported group onto a finite group.

    For free-abelian sources built from moduli the target is the product
    cyclic group.  For generator-image maps the stored quotient is the
    subgroup Q generated by the images, relabelled as its own finite
    GroupSpec (identity first, then sorted ambient indices).
    """

    source: GroupSpec
    target: GroupSpec              # ambient finite group the images live in
    images: tuple[int, ...]        # image of generator e_i / letter i+1
    moduli: tuple[int, ...] | None = None
    _image_group: GroupSpec = field(default=None, repr=False, compare=False)
    _relabel: tuple[int, ...] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.source.kind == "finite":
            raise GroupError("finite sources are not quotient domains here")
        if len(self.images) != self.source.rank:
            raise GroupError("need one image per source generator")
        for g in self.images:
            self.target.check_element(g)
        if self.source.kind == "free-abelian":
            t = self.target.table
            for a, b in itertools.combinations(self.images, 2):
                if t[a][b] != t[b][a]:
                    raise GroupError("images of a free-abelian group must commute")
            if self.moduli is not None:
                for g, m in zip(self.images, self.moduli):
                    if _finite_power(self.target, g, m) != 0:
                        raise GroupError("image order does not divide the modulus")
        sub = sorted(self.target._closure(
            [*self.images, *(self.target.inv(g) for g in self.images)]))
        order = [0] + [a for a in sub if a != 0]
        pos = {a: i for i, a in enumerate(order)}
        table = tuple(tuple(pos[self.target.table[a][b]] for b in order) for a in order)
        object.__setattr__(self, "_image_group", GroupSpec("finite", table=table))
        object.__setattr__(self, "_relabel", tuple(pos.get(a, -1) for a in range(self.target.order)))

    @property
    def image_group(self) -> GroupSpec:
        """Q = <images>, as a standalone finite group."""
        return self._image_group

    @property
    def size(self) -> int:
        return self._image_group.order

    def apply(self, g: Element) -> int:
        """Image of g in Q (homomorphism)."""
        self.source.check_element(g)
        Q = self._image_group
        imgs = [self._relabel[i] for i in self.images]
        if self.source.kind == "free-abelian":
            out = 0
            for img, e in zip(imgs, g):
                out = Q.op(out, _finite_power(Q, img if e >= 0 else Q.inv(img), abs(e)))
            return out
        out = 0
        for letter in g:
            img = imgs[abs(letter) - 1]
            if letter < 0:
                img = Q.inv(img)
            out = Q.op(out, img)
        return out

    @staticmethod
    def from_moduli(source: GroupSpec, moduli: Iterable[int]) -> "QuotientMap":
        moduli = tuple(int(m) for m in moduli)
        if source.kind != "free-abelian" or len(moduli) != source.rank:
            raise GroupError("moduli quotients need a free-abelian source of matching rank")
        target = product_cyclic_group(moduli)
        images = []
        for i in range(source.rank):
            v = [0] * source.rank
            v[i] = 1
            idx = 0
            for x, m in zip(v, moduli):
                idx = idx * m + (x % m)
            images.append(idx)
        return QuotientMap(source, target, tuple(images), moduli=moduli)

    def to_json(self) -> dict:
        if self.moduli is not None:
            return {"moduli": list(self.moduli)}
        return {"images": list(self.images), "target": self.target.to_json()}

    @staticmethod
    def from_json(source: GroupSpec, d: dict) -> "QuotientMap":
        if "moduli" in d:
            return QuotientMap.from_moduli(source, d["moduli"])
        target = GroupSpec.from_json(d["target"])
        return QuotientMap(source, target, tuple(d["images"]))


def _finite_power(spec: GroupSpec, a: int, e: int) -> int:
    out = 0
    for _ in range(e):
        out = spec.op(out, a)
    return out


@dataclass(frozen=True)
class QuotientChain:
    """Quotient maps with strictly increasing image sizes.

    Whether the chain separates (the kernels intersect trivially) is not
    decidable here; it is carried as a user assertion, as is the class
    tag of the quotients.
    """

    maps: tuple[QuotientMap, ...]
    separating: bool = True
    class_tag: str = ""

    def __post_init__(self):
        sizes = [q.size for q in self.maps]
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise GroupError("image sizes must strictly increase along the chain")
        moduli = [q.moduli for q in self.maps]
        if all(m is not None for m in moduli):
            for m1, m2 in zip(moduli, moduli[1:]):
                if any(b % a != 0 for a, b in zip(m1, m2)):
                    raise GroupError("free-abelian chain moduli must be nested (divisibility)")

    def __len__(self):
        return len(self.maps)

    def __iter__(self):
        return iter(self.maps)


# -- Folner exhaustions ------------------------------------------------------

@dataclass(frozen=True)
class FolnerLevel:
    group: GroupSpec
    index: int
    members: frozenset
    boundary_size: int

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.boundary_size, self.size)

    def ordered(self) -> list[Element]:
        return sorted(self.members)


def build_folner(group: GroupSpec, level: int) -> FolnerLevel:
    """Level-k Folner set: the box [-k,k]^n for Z^n, the whole group when finite.

    Free groups are rejected: they admit no Folner exhaustion.
    """
    if level < 1:
        raise GroupError("Folner level must be >= 1")
    if group.kind == "free":
        raise GroupError("no Folner exhaustion for a free group")
    if group.kind == "finite":
        members = frozenset(group.elements())
        return FolnerLevel(group, level, members, 0)
    rng = range(-level, level + 1)
    members = frozenset(itertools.product(rng, repeat=group.rank))
    grown = {group.op(s, x) for s in group.generators() for x in members}
    return FolnerLevel(group, level, members, len(grown - members))


@dataclass(frozen=True)
class FolnerExhaustion:
    group: GroupSpec
    levels: tuple[int, ...]

    def __post_init__(self):
        if not self.group.amenable_model:
            raise GroupError("no Folner exhaustion for a free group")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise GroupError("levels must strictly increase")

    def __iter__(self):
        return (build_folner(self.group, k) for k in self.levels)


def boundary_neighborhood(group: GroupSpec, members: frozenset | set, r: int) -> frozenset:
    """The r-neighborhood of the boundary: S^r X  intersect  S^r (complement).

    S^r is the ball of word length <= r, so r = 0 gives the empty set.
    Computed by enumeration; exact for the supported families.
    """
    if group.kind == "free":
        raise GroupError("amenable group model required")
    if r < 0:
        raise GroupError("r must be >= 0")
    ball = group.ball(r)
    in_SrX = {group.op(d, x) for x in members for d in ball}
    out = set()
    for z in in_SrX:
        if any(group.op(d, z) not in members for d in ball):
            out.add(z)
    return frozenset(out)
