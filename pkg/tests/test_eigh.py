import math

import numpy as np
import pytest

from l2approx import eigh
from l2approx.finitize import folner_model, quotient_model
from l2approx.groups import QuotientMap, build_folner
from l2approx.spectra import eigenvalues

BACKENDS = ["python"] + (["compiled"] if eigh.backend_name() == "compiled" else [])


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("n", [1, 2, 3, 5, 17, 64, 150])
def test_random_symmetric_against_numpy(backend, n):
    rng = np.random.default_rng(n)
    a = rng.normal(size=(n, n))
    a = a + a.T
    mine = eigh.symmetric_eigenvalues(a, backend=backend)
    ref = np.linalg.eigvalsh(a)
    assert np.max(np.abs(mine - ref)) <= 1e-11 * max(1.0, np.max(np.abs(ref)))


@pytest.mark.parametrize("backend", BACKENDS)
def test_complex_hermitian_embedding(backend):
    rng = np.random.default_rng(7)
    h = rng.normal(size=(20, 20)) + 1j * rng.normal(size=(20, 20))
    h = h + h.conj().T
    mine = eigh.hermitian_eigenvalues(h, backend=backend)
    ref = np.linalg.eigvalsh(h)
    assert np.max(np.abs(mine - ref)) <= 1e-10 * np.max(np.abs(ref))


def test_backends_agree():
    if eigh.backend_name() != "compiled":
        pytest.skip("compiled kernel unavailable")
    rng = np.random.default_rng(3)
    a = rng.normal(size=(60, 60))
    a = a + a.T
    fast = eigh.symmetric_eigenvalues(a, backend="compiled")
    slow = eigh.symmetric_eigenvalues(a, backend="python")
    assert np.max(np.abs(fast - slow)) <= 1e-11


def test_non_hermitian_rejected():
    with pytest.raises(eigh.EigenError):
        eigh.hermitian_eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_degenerate_and_diagonal():
    assert eigh.hermitian_eigenvalues(np.zeros((3, 3))).tolist() == [0, 0, 0]
    d = np.diag([3.0, -1.0, 2.0])
    assert np.allclose(eigh.hermitian_eigenvalues(d), [-1.0, 2.0, 3.0])


def test_folner_tridiagonal_closed_form(laplacian_z, Z):
    """Dirichlet path Laplacian: eigenvalues 2 - 2 cos(j pi / (m+1))."""
    lv = build_folner(Z, 8)
    m = 17
    model = folner_model(laplacian_z, lv)
    eigs = eigenvalues(model)
    expected = np.sort(2.0 - 2.0 * np.cos(np.arange(1, m + 1) * np.pi / (m + 1)))
    assert np.max(np.abs(eigs - expected)) <= 1e-12


def test_circulant_closed_form(laplacian_z, Z):
    n = 12
    model = quotient_model(laplacian_z, QuotientMap.from_moduli(Z, [n]))
    eigs = eigenvalues(model)
    expected = np.sort(2.0 - 2.0 * np.cos(2.0 * np.pi * np.arange(n) / n))
    assert np.max(np.abs(eigs - expected)) <= 1e-12


def test_identity_eigenvalues(Z):
    from l2approx.groupring import GroupRingMatrix
    model = quotient_model(GroupRingMatrix.identity(Z, 2), QuotientMap.from_moduli(Z, [5]))
    assert np.allclose(eigenvalues(model), 1.0)


def test_eigen_residuals_spot_check():
    """Eigenvalues feed back as shifts: det-scale residual via inverse power."""
    rng = np.random.default_rng(11)
    a = rng.normal(size=(25, 25))
    a = a + a.T
    vals = eigh.hermitian_eigenvalues(a)
    norm = np.linalg.norm(a, 2)
    for lam in (vals[0], vals[12], vals[-1]):
        # one inverse-power step certifies an eigenpair residual
        x = rng.normal(size=25)
        for _ in range(3):
            x = np.linalg.solve(a - (lam + 1e-10) * np.eye(25), x)
            x /= np.linalg.norm(x)
        assert np.linalg.norm(a @ x - lam * x) <= 1e-9 * norm
