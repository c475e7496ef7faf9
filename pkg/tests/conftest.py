import random
from fractions import Fraction

import pytest

from l2approx.coefficients import NumberField
from l2approx.groupring import GroupRingMatrix, element, laurent
from l2approx.groups import (QuotientChain, QuotientMap, alternating_group,
                             cyclic_group, free_abelian, free_group, symmetric_group)


@pytest.fixture(scope="session")
def Z():
    return free_abelian(1)


@pytest.fixture(scope="session")
def Z2():
    return free_abelian(2)


@pytest.fixture(scope="session")
def F2():
    return free_group(2)


@pytest.fixture(scope="session")
def sqrt2_field():
    return NumberField([-2, 0, 1])


@pytest.fixture(scope="session")
def laplacian_z(Z):
    return laurent(Z, {0: 2, 1: -1, -1: -1})


@pytest.fixture(scope="session")
def laplacian_z2(Z2):
    return GroupRingMatrix(Z2, [[element(
        Z2, {(0, 0): 4, (1, 0): -1, (-1, 0): -1, (0, 1): -1, (0, -1): -1})]])


@pytest.fixture(scope="session")
def shift_minus_one(Z):
    """B = 1 - t; its spectral square is the Z Laplacian."""
    return laurent(Z, {0: 1, 1: -1})


def element_order(spec, g):
    acc, k = g, 1
    while acc != 0:
        acc = spec.op(acc, g)
        k += 1
    return k


@pytest.fixture(scope="session")
def f2_presentation_row(F2):
    """[a-1, b-1] as a 1x2 matrix; ker dim over F2 is the first L2-Betti number."""
    e = F2.identity()
    return GroupRingMatrix(F2, [[element(F2, {(1,): 1, e: -1}),
                                 element(F2, {(2,): 1, e: -1})]])


@pytest.fixture(scope="session")
def f2_chain(F2):
    """Quotients of F2 of sizes 2, 6, 12 with generating images."""
    z2 = cyclic_group(2)
    s3 = symmetric_group(3)
    a4 = alternating_group(4)
    two = next(g for g in s3.elements() if element_order(s3, g) == 2)
    three = next(g for g in s3.elements() if element_order(s3, g) == 3)
    two4 = next(g for g in a4.elements() if element_order(a4, g) == 2)
    three4 = next(g for g in a4.elements() if element_order(a4, g) == 3)
    return QuotientChain((QuotientMap(F2, z2, (1, 1)),
                          QuotientMap(F2, s3, (two, three)),
                          QuotientMap(F2, a4, (two4, three4))),
                         separating=True, class_tag="finite witnesses")


def cyclic_chain(Z, sizes):
    return QuotientChain(tuple(QuotientMap.from_moduli(Z, [n]) for n in sizes))


@pytest.fixture(scope="session")
def chain_pow2(Z):
    return cyclic_chain(Z, (4, 8, 16, 32, 64, 128, 256))


def random_group_ring_matrix(group, rng: random.Random, d_rows, d_cols,
                             radius=2, terms=3, coeff_range=3, tag="rational"):
    """Random matrix with supports inside the word-metric ball of the radius."""
    ball = sorted(group.ball(radius), key=lambda g: (len(g), g) if isinstance(g, tuple) else (0, g))
    ents = []
    for _ in range(d_rows):
        row = []
        for _ in range(d_cols):
            t = {}
            for _ in range(rng.randint(1, terms)):
                g = rng.choice(ball)
                t[g] = rng.randint(-coeff_range, coeff_range)
            row.append(t)
        ents.append(row)
    return GroupRingMatrix.from_dicts(group, ents, tag=tag)
