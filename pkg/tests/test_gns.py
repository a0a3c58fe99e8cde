import math

import numpy as np
import pytest

from momentopt.gns import (
    build_gns_model,
    certify_hankel,
    is_flat,
    kernel_basis,
    max_commutator_rank,
    modified_moment_matrix,
    multiplication_operators,
    truncation_basis,
)
from momentopt.moment import MomentSequence, moment_matrix
from momentopt.poly import Monomial, Polynomial, monomials_up_to, vectorize

from conftest import load_matrix


@pytest.fixture
def quad_form_matrix():
    # 1/4 (ev(0,0) + ev(1,0) + ev(-1,0) + ev(0,1)) up to degree 4
    y = MomentSequence.from_points([(0, 0), (1, 0), (-1, 0), (0, 1)], [0.25] * 4, 4)
    return moment_matrix(y, 2)


def test_kernel_of_quad_form(quad_form_matrix):
    kernel = kernel_basis(quad_form_matrix, 1e-9)
    assert len(kernel) == 2
    # kernel is contained in span{X1 X2, X2^2 - X2}
    basis = quad_form_matrix.basis
    span = np.array([
        vectorize(Polynomial.from_terms(2, {(1, 1): 1.0}), basis),
        vectorize(Polynomial.from_terms(2, {(0, 2): 1.0, (0, 1): -1.0}), basis),
    ]).T
    proj = span @ np.linalg.pinv(span)
    for p in kernel:
        v = vectorize(p, basis)
        assert np.linalg.norm(proj @ v - v) < 1e-9


def test_truncation_basis_of_quad_form(quad_form_matrix):
    trunc = truncation_basis(quad_form_matrix, 1e-9)
    assert len(trunc) == 3
    # Gram-Schmidt over 1, X1, X2 gives 1, sqrt(2) X1, -sqrt(3)/3 + 4 sqrt(3)/3 X2
    c0 = trunc[0].terms
    assert c0[Monomial((0, 0))] == pytest.approx(1.0, abs=1e-12)
    c1 = trunc[1].terms
    assert c1[Monomial((1, 0))] == pytest.approx(math.sqrt(2.0), abs=1e-12)
    c2 = trunc[2].terms
    assert c2[Monomial((0, 1))] == pytest.approx(4.0 * math.sqrt(3.0) / 3.0, abs=1e-12)
    assert c2[Monomial((0, 0))] == pytest.approx(-math.sqrt(3.0) / 3.0, abs=1e-12)


def test_multiplication_operators_of_quad_form(quad_form_matrix):
    trunc = truncation_basis(quad_form_matrix, 1e-9)
    A1, A2 = multiplication_operators(quad_form_matrix, trunc)
    s2, s6 = math.sqrt(2.0) / 2.0, math.sqrt(6.0) / 6.0
    expected1 = np.array([[0.0, s2, 0.0], [s2, 0.0, -s6], [0.0, -s6, 0.0]])
    expected2 = np.array([
        [0.25, 0.0, math.sqrt(3.0) / 4.0],
        [0.0, 0.0, 0.0],
        [math.sqrt(3.0) / 4.0, 0.0, 0.75],
    ])
    assert np.allclose(A1, expected1, atol=1e-12)
    assert np.allclose(A2, expected2, atol=1e-12)
    assert np.allclose(A1 @ A2, A2 @ A1, atol=1e-12)
    assert max_commutator_rank([A1, A2], 1e-9) == 0


def test_modified_matrix_of_quad_form(quad_form_matrix):
    m_tilde, W = modified_moment_matrix(quad_form_matrix, 1e-9)
    basis = quad_form_matrix.basis
    i = basis.index(Monomial((2, 0)))
    assert m_tilde[i, i] == pytest.approx(1.0 / 3.0, abs=1e-12)
    # every block except the bottom-right corner agrees with the source
    assert np.allclose(m_tilde[:3, :], quad_form_matrix.entries[:3, :], atol=1e-12)
    assert not is_flat(quad_form_matrix, 1e-9)


def test_flat_atomic_form_detected_as_flat():
    rng = np.random.default_rng(11)
    points = rng.normal(size=(3, 2))
    weights = rng.uniform(0.3, 1.0, size=3)
    y = MomentSequence.from_points(points, weights, 4)
    M = moment_matrix(y, 2)
    assert is_flat(M, 1e-8)
    hc = certify_hankel(M, 1e-8, 1e-8)
    assert hc.status == "Flat"
    assert hc.commutator_rank == 0
    assert hc.model.dim_truncation == 3


def test_m_tilde_independent_of_null_space_perturbation():
    # rank-deficient principal block: 2 atoms in the 3-dimensional degree-1 space
    rng = np.random.default_rng(12)
    points = rng.normal(size=(2, 2))
    weights = rng.uniform(0.3, 1.0, size=2)
    y = MomentSequence.from_points(points, weights, 4)
    M = moment_matrix(y, 2)
    m_tilde, W = modified_moment_matrix(M, 1e-10)
    A = M.entries[:3, :3]
    vals, vecs = np.linalg.eigh(A)
    null = vecs[:, vals < 1e-10 * vals[-1]]
    assert null.shape[1] >= 1
    perturb = null @ rng.normal(size=(null.shape[1], W.shape[1]))
    W2 = W + perturb
    assert np.max(np.abs(W2.T @ A @ W2 - W.T @ A @ W)) < 1e-9


def test_certify_hankel_statuses_on_fixtures():
    hc = certify_hankel(load_matrix("porfavor_matrix"), 1e-3, 1e-3)
    assert hc.status == "HankelNotFlat"
    hc = certify_hankel(load_matrix("flatcase"), 1e-3, 1e-3)
    assert hc.status == "Flat"
    hc = certify_hankel(load_matrix("madrugada"), 1e-6, 1e-4)
    assert hc.status == "NotHankel"
    assert hc.commutator_rank == 4


def test_build_model_collects_pieces(quad_form_matrix):
    model = build_gns_model(quad_form_matrix, 1e-9)
    assert model.rank_A == 3
    assert model.rank_M == 4
    assert not model.is_flat
    assert model.dim_truncation == 3
    assert len(model.op_matrices) == 2
    # coordinates of the constant polynomial in the orthonormal basis
    assert model.coords_one[0] == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(model.coords_one[1:], 0.0, atol=1e-12)


def test_kernel_rejects_indefinite_matrix():
    from momentopt.moment import MomentMatrix

    E = np.diag([1.0, -1.0, 1.0])
    M = MomentMatrix(2, 1, E)
    with pytest.raises(ValueError):
        kernel_basis(M, 1e-9)
