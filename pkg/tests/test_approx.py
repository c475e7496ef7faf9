import math
import random
from fractions import Fraction

import numpy as np
import pytest

from l2approx.approx import (ApproxError, approximate_kernel_dim,
                             check_atiyah_integrality, liouville_constant,
                             liouville_constant_approximants, liouville_exclusion,
                             spectrum_gap_check, verify_algebraic_continuity,
                             verify_det_bound)
from l2approx.coefficients import NumberField
from l2approx.groupring import GroupRingMatrix, element, laurent
from l2approx.groups import FolnerExhaustion, QuotientChain, QuotientMap
from tests.conftest import cyclic_chain


def test_zero_matrix_runs_at_block_count(Z):
    zero = laurent(Z, {})
    chain = cyclic_chain(Z, (2, 4))
    run = approximate_kernel_dim(zero, chain)
    assert run.dims() == [Fraction(1), Fraction(1)]


def test_one_minus_shift_chain(Z, shift_minus_one):
    chain = cyclic_chain(Z, (2, 4, 8, 16, 32))
    run = approximate_kernel_dim(shift_minus_one, chain)
    assert run.dims() == [Fraction(1, 2 ** k) for k in range(1, 6)]
    verdict = check_atiyah_integrality(run, tol=Fraction(1, 16))
    assert verdict.converged and verdict.nearest_integer == 0


def test_f2_presentation_run(f2_presentation_row, f2_chain):
    run = approximate_kernel_dim(f2_presentation_row, f2_chain)
    assert run.dims() == [Fraction(3, 2), Fraction(7, 6), Fraction(13, 12)]
    verdict = check_atiyah_integrality(run, tol=Fraction(1, 12))
    assert verdict.converged and verdict.passed
    assert verdict.nearest_integer == 1
    assert verdict.distance == Fraction(1, 12)


def test_unconverged_run_is_indeterminate(Z, shift_minus_one):
    chain = cyclic_chain(Z, (2, 4))
    run = approximate_kernel_dim(shift_minus_one, chain)
    verdict = check_atiyah_integrality(run, tol=Fraction(1, 1000))
    assert not verdict.converged
    assert verdict.nearest_integer is None and not verdict.passed


def test_identity_run(Z):
    ident = GroupRingMatrix.identity(Z, 1)
    run = approximate_kernel_dim(ident, cyclic_chain(Z, (2, 4)))
    verdict = check_atiyah_integrality(run, tol=Fraction(1, 4))
    assert verdict.nearest_integer == 0 and verdict.distance == 0


def test_folner_run_records_error_terms(Z, laplacian_z):
    sch = FolnerExhaustion(Z, (2, 4, 8))
    run = approximate_kernel_dim(laplacian_z, sch)
    assert run.scheme == "folner"
    assert [r.error_term for r in run.levels] == \
        [Fraction(4, 5), Fraction(4, 9), Fraction(4, 17)]
    for lo, hi in run.folner_brackets():
        assert lo <= 0 <= hi


def test_float_tag_rejected_on_chains(Z):
    m = laurent(Z, {0: 1.0 + 0j})
    with pytest.raises(ApproxError):
        approximate_kernel_dim(m, cyclic_chain(Z, (2, 4)))


def test_float_tag_folner_run_is_flagged(Z):
    """Complex-coefficient amenable runs work, with thresholded dims flagged."""
    m = laurent(Z, {0: 2.0 + 0j, 1: -1.0 + 0j, -1: -1.0 + 0j})
    run = approximate_kernel_dim(m, FolnerExhaustion(Z, (3, 5)))
    assert all(r.dim_kernel == 0 for r in run.levels)      # Dirichlet: no kernel
    assert all(not r.dim_exact for r in run.levels)
    assert run.as_json()["levels"][0]["provenance"] == "float-threshold"


def test_folner_needs_amenable(F2):
    e = F2.identity()
    m = GroupRingMatrix(F2, [[element(F2, {(1,): 1, e: -1})]])
    with pytest.raises(Exception):
        FolnerExhaustion(F2, (1, 2))


def test_limsup_dim_below_oracle_on_quotients(Z, shift_minus_one):
    """Proposition-style monotone fact at lambda = 0: tail limsup of the
    level kernel dimensions stays within 1/N of the known limit 0."""
    chain = cyclic_chain(Z, (4, 8, 16, 32, 64, 128, 256))
    run = approximate_kernel_dim(shift_minus_one, chain)
    assert run.limsup_dim() <= Fraction(0) + Fraction(1, 32)


# -- determinant bound -----------------------------------------------------------

def test_det_bound_sqrt2(Z, sqrt2_field):
    v = sqrt2_field.generator()
    B = laurent(Z, {0: v, 1: sqrt2_field.from_rational(-1)})
    chain = cyclic_chain(Z, (4, 8, 16, 32, 64))
    rep = verify_det_bound(B, chain)
    assert rep.rhs == pytest.approx(-math.log(9))
    assert rep.holds
    assert rep.scale == 1
    assert rep.field_normal_known
    # levels converge to ln det_G = ln 2 (Mahler measure of sqrt2 - t)
    assert rep.levels[-1][1] == pytest.approx(math.log(2), abs=1e-3)


def test_det_bound_quadrature_oracle(Z, sqrt2_field):
    """ln det_G = integral of ln(3 - 2 sqrt2 cos) = ln 2, by quadrature."""
    from scipy.integrate import quad
    val, err = quad(lambda t: math.log(3 - 2 * math.sqrt(2) * math.cos(2 * math.pi * t)),
                    0.0, 1.0, limit=200)
    assert err < 1e-8
    assert val == pytest.approx(math.log(2), abs=1e-6)
    assert val >= -math.log(9)


def test_det_bound_rational_reduces_to_zero_rhs(Z, shift_minus_one):
    rep = verify_det_bound(shift_minus_one, cyclic_chain(Z, (4, 8, 16)))
    assert rep.rhs == 0.0
    assert rep.holds                     # ln det_i = 2 ln n / n >= 0


def test_det_bound_identity(Z):
    rep = verify_det_bound(GroupRingMatrix.identity(Z, 1), cyclic_chain(Z, (2, 4)))
    assert rep.holds and all(abs(v) < 1e-12 for _, v in rep.levels)


def test_det_bound_scales_denominators(Z, sqrt2_field):
    v = sqrt2_field.generator()
    B = laurent(Z, {0: v / 2, 1: sqrt2_field.from_rational(Fraction(-1, 3))})
    rep = verify_det_bound(B, cyclic_chain(Z, (4, 8)))
    assert rep.scale == 6
    assert rep.holds


# -- algebraic continuity -----------------------------------------------------------

def test_continuity_sqrt2_shift(Z, sqrt2_field):
    v = sqrt2_field.generator()
    chain = cyclic_chain(Z, (4, 16, 64, 256))
    for shift in (v, sqrt2_field.one() + v):
        B = laurent(Z, {0: shift, 1: sqrt2_field.from_rational(-1)})
        rep = verify_algebraic_continuity(B, chain)
        assert rep.equal
        assert rep.limits == [Fraction(0), Fraction(0)]


def test_continuity_rational_single_embedding(Z, shift_minus_one):
    rep = verify_algebraic_continuity(shift_minus_one, cyclic_chain(Z, (4, 8)))
    assert len(rep.limits) == 1 and rep.equal


# -- spectrum gaps --------------------------------------------------------------------

def test_gap_above_spectrum(Z, laplacian_z):
    rep = spectrum_gap_check(laplacian_z, cyclic_chain(Z, (8, 16, 32)), 4.5, 5.0)
    assert rep.gap_confirmed
    assert rep.margin == pytest.approx(0.5)


def test_gap_interval_below_psd_spectrum(Z, laplacian_z):
    rep = spectrum_gap_check(laplacian_z, cyclic_chain(Z, (8, 16)), -2.0, -1.0)
    assert rep.gap_confirmed


def test_gap_beyond_kappa_f2(f2_presentation_row, f2_chain):
    delta = f2_presentation_row.delta()
    rep = spectrum_gap_check(delta, f2_chain, 14.5, 15.0)
    assert rep.gap_confirmed


def test_gap_rejects_touching_interval(Z, laplacian_z):
    with pytest.raises(ApproxError, match="touches"):
        spectrum_gap_check(laplacian_z, cyclic_chain(Z, (8, 16)), 1.9, 2.1)


# -- Liouville exclusion -----------------------------------------------------------------

def test_liouville_approximants_satisfy_inequality():
    lo, hi = liouville_constant(7)
    for n, p, q in liouville_constant_approximants(5):
        eps_hi = hi - Fraction(p, q)
        eps_lo = lo - Fraction(p, q)
        assert 0 < eps_lo and eps_hi <= Fraction(1, q ** n)
        assert q >= 2


def test_liouville_exclusion_bounds(Z, laplacian_z):
    cert = liouville_exclusion(laplacian_z, liouville_constant(7),
                               liouville_constant_approximants(5))
    bounds = cert.bounds()
    assert len(bounds) == 4                   # n = 2..5 (n = 1 skipped)
    assert cert.decreasing
    assert bounds[-1] < 0.05
    assert all(b > 0 for b in bounds)
    # the weaker ln-q variant also decreases toward 2/(2n-2)
    weak = [s.bound_weak for s in cert.steps]
    assert all(a > b for a, b in zip(weak, weak[1:]))


def test_liouville_identity_matrix(Z):
    ident = GroupRingMatrix.identity(Z, 1)
    cert = liouville_exclusion(ident, liouville_constant(7),
                               liouville_constant_approximants(4))
    assert cert.bounds()[-1] < cert.bounds()[0]


def test_liouville_rejects_bad_approximant(Z, laplacian_z):
    bad = [(3, 1, 3)]                         # |lambda - 1/3| > 3^-3
    with pytest.raises(ApproxError, match="violates"):
        liouville_exclusion(laplacian_z, liouville_constant(7), bad)


def test_liouville_kappa_recorded_exactly(Z, laplacian_z):
    cert = liouville_exclusion(laplacian_z, liouville_constant(7),
                               liouville_constant_approximants(3))
    step = cert.steps[0]                      # n = 2: q = 100, p = 11
    assert (step.p, step.q) == (11, 100)
    # V_2 = (100 A - 11)^2 expanded exactly; check kappa against groupring
    q, p = 100, 11
    v = (laplacian_z.scale(q) - GroupRingMatrix.identity(Z, 1).scale(p)).delta()
    assert step.kappas[0] == pytest.approx(math.log(v.kappa().kappa))


def test_liouville_no_admissible_levels(Z, laplacian_z):
    with pytest.raises(ApproxError, match="admissible"):
        liouville_exclusion(laplacian_z, liouville_constant(4),
                            liouville_constant_approximants(1))


# -- concurrency determinism ------------------------------------------------------------

def test_parallel_runs_deterministic(Z, shift_minus_one):
    chain = cyclic_chain(Z, (4, 8, 16, 32))
    a = approximate_kernel_dim(shift_minus_one, chain, jobs=4)
    b = approximate_kernel_dim(shift_minus_one, chain, jobs=1)
    assert a.dims() == b.dims()
    assert [r.normalization for r in a.levels] == [r.normalization for r in b.levels]


def test_run_json_and_csv(tmp_path, Z, shift_minus_one):
    run = approximate_kernel_dim(shift_minus_one, cyclic_chain(Z, (4, 8)))
    payload = run.as_json()
    assert payload["levels"][0]["dim"] == "1/4"
    path = tmp_path / "run.csv"
    run.to_csv(path)
    header, *rows = path.read_text().strip().splitlines()
    assert header == "level,N,dim,logdet,kappa,error_term,seconds"
    assert len(rows) == 2
