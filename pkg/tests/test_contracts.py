"""Edge-of-contract checks that cut across modules."""

import json
import math
import os
import time
from fractions import Fraction

import pytest

from l2approx.approx import (ApproximationRun, LevelRecord, approximate_kernel_dim,
                             check_atiyah_integrality)
from l2approx.coefficients import NumberField, PrecisionError
from l2approx.groupring import GroupRingMatrix, clear_matrix_denominators, laurent
from l2approx.groups import FolnerExhaustion, QuotientMap
from tests.conftest import cyclic_chain


def test_precision_exhaustion_is_loud(sqrt2_field, monkeypatch):
    # an absurd target cannot be certified: embedding must fail, not round
    monkeypatch.setenv("L2_PRECISION_BITS", "64")
    import l2approx.coefficients as co
    monkeypatch.setattr(co, "TARGET_RADIUS", 1e-300)
    with pytest.raises(PrecisionError):
        NumberField([-2, 0, 1])


def test_env_precision_bits_respected(monkeypatch):
    monkeypatch.setenv("L2_PRECISION_BITS", "256")
    field = NumberField([-3, 0, 1])
    _, rad = field.generator().embed()
    assert rad < 1e-20


def test_integrality_never_false_passes():
    """A converged run sitting far from an integer must fail loudly."""
    recs = [LevelRecord(i, n, Fraction(1, 2), None, 1.0, None, 0.0)
            for i, n in enumerate((64, 128))]
    run = ApproximationRun("deadbeef", "quotient", recs)
    verdict = check_atiyah_integrality(run, tol=Fraction(1, 100))
    assert verdict.converged
    assert verdict.nearest_integer in (0, 1)
    assert verdict.distance == Fraction(1, 2)
    assert not verdict.passed


def test_zero_matrix_folner_run(Z):
    zero = laurent(Z, {})
    run = approximate_kernel_dim(zero, FolnerExhaustion(Z, (2, 3)))
    assert run.dims() == [Fraction(1), Fraction(1)]


def test_clear_matrix_denominators_contract(Z, sqrt2_field):
    v = sqrt2_field.generator()
    m = laurent(Z, {0: v / 2 + sqrt2_field.from_rational(Fraction(1, 3))})
    n, scaled = clear_matrix_denominators(m)
    assert n == 6
    coeff = scaled.entries[0][0].identity_coefficient()
    assert coeff.coords == (Fraction(2), Fraction(3))    # 2 + 3 sqrt2
    ints = laurent(Z, {0: 4, 1: -5})
    assert clear_matrix_denominators(ints) == (1, ints)


def test_cli_format_csv(capsys):
    from l2approx.cli import main
    from pathlib import Path
    problems = Path(__file__).resolve().parent.parent / "problems"
    code = main(["kernel", "--problem", str(problems / "z_shift_chain.json"),
                 "--levels", "0..2", "--tol", "1/4", "--format", "csv"])
    out = capsys.readouterr().out
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "level,N,dim,logdet,kappa,error_term,seconds"
    assert lines[1].split(",")[2] == "1/4"


def test_quotient_images_must_commute_for_free_abelian(Z2):
    from l2approx.groups import GroupError, symmetric_group
    s3 = symmetric_group(3)
    from tests.conftest import element_order
    two = next(g for g in s3.elements() if element_order(s3, g) == 2)
    three = next(g for g in s3.elements() if element_order(s3, g) == 3)
    with pytest.raises(GroupError, match="commute"):
        QuotientMap(Z2, s3, (two, three))
    # commuting images are fine and generate a cyclic subgroup
    q = QuotientMap(Z2, s3, (three, three))
    assert q.size == 3


def test_quotient_moduli_order_check(Z):
    from l2approx.groups import GroupError, cyclic_group
    c6 = cyclic_group(6)
    # e_1 -> the order-6 generator, asserted modulus 4 does not hold
    with pytest.raises(GroupError, match="order"):
        QuotientMap(Z, c6, (1,), moduli=(4,))


def test_runtime_sanity_large_circulant(Z, shift_minus_one):
    """Whole-chain exact dims at n = 512 stay near-instant via the gcd path."""
    chain = cyclic_chain(Z, (256, 512))
    t0 = time.perf_counter()
    run = approximate_kernel_dim(shift_minus_one, chain, want_spectra=False)
    assert run.dims() == [Fraction(1, 256), Fraction(1, 512)]
    assert time.perf_counter() - t0 < 2.0
