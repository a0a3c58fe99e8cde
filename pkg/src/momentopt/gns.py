"""Truncated GNS construction on a PSD moment matrix.

Given a moment matrix M of order D for a linear form L, this module
computes the kernel U_L, an orthonormal basis of the truncation space T_L
(degree <= D-1 representatives), the multiplication operator matrices
(M_i)_{jk} = L(X_i b_j b_k), and the modified moment matrix M~ obtained by
replacing the top-degree block C with W^T A W where A W = B.

The certificate logic rests on the equivalence: M~ is generalized Hankel
iff the multiplication operators pairwise commute.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .moment import (
    MomentMatrix,
    is_generalized_hankel,
    linear_form_apply,
    psd_check,
)
from .poly import Polynomial, basis_size, devectorize, monomials_up_to, vectorize

DEFAULT_RANK_TOL = 1e-6


def _eigh_sorted(S: np.ndarray):
    vals, vecs = np.linalg.eigh((S + S.T) / 2.0)
    return vals, vecs


def _numerical_rank(S: np.ndarray, tol: float) -> int:
    vals, _ = _eigh_sorted(S)
    lam_max = float(vals[-1]) if len(vals) else 0.0
    cutoff = tol * max(1.0, lam_max)
    return int(np.sum(vals > cutoff))


@dataclass
class GnsModel:
    source: MomentMatrix
    rank_tol: float
    kernel_basis: list
    truncation_basis: list
    op_matrices: list
    W: np.ndarray
    m_tilde: np.ndarray
    rank_A: int
    rank_M: int
    coords_one: np.ndarray
    warnings: list = field(default_factory=list)

    @property
    def dim_truncation(self) -> int:
        return len(self.truncation_basis)

    @property
    def is_flat(self) -> bool:
        return self.rank_M == self.rank_A


def _split_blocks(M: MomentMatrix):
    sA = basis_size(M.n, M.order - 1)
    E = M.entries
    return E[:sA, :sA], E[:sA, sA:], E[sA:, sA:], sA


def _pinv_psd(S: np.ndarray, tol: float) -> np.ndarray:
    vals, vecs = _eigh_sorted(S)
    lam_max = float(vals[-1]) if len(vals) else 0.0
    cutoff = tol * max(1.0, lam_max)
    inv = np.where(vals > cutoff, 1.0 / np.where(vals > cutoff, vals, 1.0), 0.0)
    return vecs @ np.diag(inv) @ vecs.T


def kernel_basis(M: MomentMatrix, tol: float = DEFAULT_RANK_TOL) -> list:
    """Polynomials of degree <= D spanning the numerical null space of M."""
    ok, lam_min = psd_check(M.entries, tol)
    if not ok:
        raise ValueError(f"matrix is not PSD within tolerance (lambda_min = {lam_min:.3e})")
    vals, vecs = _eigh_sorted(M.entries)
    lam_max = float(vals[-1]) if len(vals) else 0.0
    cutoff = tol * max(1.0, lam_max)
    basis = M.basis
    return [devectorize(vecs[:, i], basis) for i in range(len(vals)) if vals[i] <= cutoff]


def truncation_basis(M: MomentMatrix, tol: float = DEFAULT_RANK_TOL) -> list:
    """Orthonormal basis of T_L: degree <= D-1 polynomials with L-Gram identity.

    Modified Gram-Schmidt over the monomials of degree <= D-1 in basis
    order, with one re-orthogonalization pass; candidates whose residual
    L-norm^2 falls below tol * scale lie in the kernel and are skipped.
    """
    if M.order < 1:
        raise ValueError("truncation basis needs a matrix of order >= 1")
    A, _, _, sA = _split_blocks(M)
    ok, lam_min = psd_check(A, tol)
    if not ok:
        raise ValueError(f"principal block is not PSD within tolerance (lambda_min = {lam_min:.3e})")
    vals, _ = _eigh_sorted(A)
    scale = max(1.0, float(vals[-1]) if len(vals) else 0.0)
    # the drop test is relative to each candidate's own initial norm, so
    # matrices whose entries span many orders of magnitude are handled;
    # the tol^2 * scale term is an absolute floor for zero columns
    floor = tol * tol * scale

    sub_basis = monomials_up_to(M.n, M.order - 1)
    ortho_vecs: list[np.ndarray] = []
    for idx in range(sA):
        v = np.zeros(sA)
        v[idx] = 1.0
        norm2_start = float(A[idx, idx])
        for _ in range(2):  # MGS with one re-orthogonalization pass
            for u in ortho_vecs:
                v = v - (u @ A @ v) * u
        norm2 = float(v @ A @ v)
        if norm2 <= max(tol * norm2_start, floor):
            continue
        ortho_vecs.append(v / np.sqrt(norm2))

    polys = []
    for v in ortho_vecs:
        coeffs = {sub_basis[i]: float(v[i]) for i in range(sA) if v[i] != 0.0}
        polys.append(Polynomial.from_terms(M.n, coeffs))
    return polys


def multiplication_operators(M: MomentMatrix, basis: list) -> list:
    """Matrices (M_i)_{jk} = L(X_i b_j b_k) for i = 1..n.

    The linear form is recovered from the matrix by Hankel-group averaging,
    which keeps the operators exactly symmetric even on rounded inputs.
    """
    y = M.to_moment_sequence()
    r = len(basis)
    ops = []
    for i in range(M.n):
        xi = Polynomial.variable(M.n, i)
        Op = np.empty((r, r))
        for j in range(r):
            pj = xi * basis[j]
            for k in range(j, r):
                val = linear_form_apply(y, pj * basis[k])
                Op[j, k] = val
                Op[k, j] = val
        ops.append(Op)
    return ops


def max_commutator_rank(ops: list, tol: float = DEFAULT_RANK_TOL) -> int:
    """Max over pairs of the numerical rank of M_i M_j - M_j M_i."""
    best = 0
    norms = [float(np.linalg.norm(op, 2)) for op in ops]
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            K = ops[i] @ ops[j] - ops[j] @ ops[i]
            sv = np.linalg.svd(K, compute_uv=False)
            if len(sv) == 0:
                continue
            # the natural scale of [M_i, M_j] is |M_i| |M_j|; measuring the
            # cutoff against the commutator itself would promote pure
            # round-off on commuting operators to full rank
            cutoff = tol * max(1.0, norms[i] * norms[j])
            best = max(best, int(np.sum(sv > cutoff)))
    return best


def modified_moment_matrix(M: MomentMatrix, tol: float = DEFAULT_RANK_TOL):
    """Return (m_tilde, W) with A W = B and m_tilde = [[A, AW], [W^T A, W^T A W]]."""
    A, B, _, sA = _split_blocks(M)
    W = _pinv_psd(A, tol) @ B
    scale = max(1.0, float(np.max(np.abs(M.entries))))
    residual = float(np.max(np.abs(A @ W - B))) if B.size else 0.0
    if residual > max(tol, 10.0 * DEFAULT_RANK_TOL) * scale:
        raise ValueError(
            f"A W = B is inconsistent (residual {residual:.3e}); "
            "input is not a PSD moment matrix within tolerance"
        )
    AW = A @ W
    m_tilde = np.block([[A, AW], [AW.T, W.T @ A @ W]])
    return (m_tilde + m_tilde.T) / 2.0, W


def is_flat(M: MomentMatrix, tol: float = DEFAULT_RANK_TOL) -> bool:
    """Rank of M equals rank of its order-(D-1) principal block."""
    A, _, _, _ = _split_blocks(M)
    return _numerical_rank(M.entries, tol) == _numerical_rank(A, tol)


def build_gns_model(M: MomentMatrix, tol_rank: float = DEFAULT_RANK_TOL) -> GnsModel:
    if M.order < 1:
        raise ValueError("GNS construction needs a moment matrix of order >= 1")
    kernel = kernel_basis(M, tol_rank)
    A, _, _, sA = _split_blocks(M)
    rank_A = _numerical_rank(A, tol_rank)
    rank_M = len(M.basis) - len(kernel)
    trunc = truncation_basis(M, tol_rank)
    warnings = []
    if len(trunc) != rank_A:
        warnings.append(
            f"truncation basis size {len(trunc)} differs from rank(A) = {rank_A}; "
            "tolerances may be ill-suited to this matrix"
        )
    ops = multiplication_operators(M, trunc)
    m_tilde, W = modified_moment_matrix(M, tol_rank)
    one = Polynomial.constant(M.n, 1.0)
    sub_basis = monomials_up_to(M.n, M.order - 1)
    e0 = vectorize(one, sub_basis)
    coords_one = np.array([e0 @ A @ vectorize(b, sub_basis) for b in trunc])
    return GnsModel(
        source=M,
        rank_tol=tol_rank,
        kernel_basis=kernel,
        truncation_basis=trunc,
        op_matrices=ops,
        W=W,
        m_tilde=m_tilde,
        rank_A=rank_A,
        rank_M=rank_M,
        coords_one=coords_one,
        warnings=warnings,
    )


@dataclass
class HankelCertificate:
    status: str  # Flat | HankelNotFlat | NotHankel
    m_tilde: np.ndarray
    deviation: float
    commutator_rank: int
    model: GnsModel
    warnings: list


def certify_hankel(
    M: MomentMatrix,
    tol_rank: float = DEFAULT_RANK_TOL,
    tol_hankel: float = 1e-4,
) -> HankelCertificate:
    """Classify M as Flat, HankelNotFlat or NotHankel.

    The status follows the Hankel test on the full modified matrix; the
    commutator rank of the multiplication operators is always computed as a
    cross-check and a disagreement is reported as a warning.
    """
    model = build_gns_model(M, tol_rank)
    hankel, deviation = is_generalized_hankel(model.m_tilde, M.basis, tol_hankel)
    comm_rank = max_commutator_rank(model.op_matrices, tol_rank)
    if model.is_flat:
        status = "Flat"
    elif hankel:
        status = "HankelNotFlat"
    else:
        status = "NotHankel"
    warnings = list(model.warnings)
    if (status != "NotHankel") != (comm_rank == 0):
        warnings.append(
            f"Hankel test ({status}, deviation {deviation:.3e}) and commutator "
            f"rank ({comm_rank}) disagree; results are near the tolerance boundary"
        )
    return HankelCertificate(status, model.m_tilde, deviation, comm_rank, model, warnings)
