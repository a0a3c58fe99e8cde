"""Moment matrices, localizing matrices and generalized Hankel checks.

A moment matrix of order D is indexed by the V_D monomial basis and has
entry (alpha, beta) = y_{alpha+beta}, so it is generalized Hankel by
construction.  The converse direction, reading a linear form off a given
symmetric matrix, averages entries over each Hankel group.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .poly import Monomial, MonomialBasis, Polynomial, monomials_up_to, vectorize

DEFAULT_SYM_TOL = 1e-8


@dataclass(frozen=True)
class MomentSequence:
    """Pseudo-moments y_alpha for all |alpha| <= k."""

    n: int
    k: int
    y: dict

    def __post_init__(self):
        basis = monomials_up_to(self.n, self.k)
        missing = [m for m in basis if m not in self.y]
        if missing:
            raise ValueError(f"moment sequence missing {len(missing)} entries up to degree {self.k}")

    def __getitem__(self, m: Monomial) -> float:
        return self.y[m]

    @staticmethod
    def from_values(n: int, k: int, values) -> "MomentSequence":
        y = {}
        for mono, v in dict(values).items():
            if not isinstance(mono, Monomial):
                mono = Monomial(tuple(mono))
            y[mono] = float(v)
        return MomentSequence(n, k, y)

    @staticmethod
    def from_points(points, weights, k: int) -> "MomentSequence":
        """Moments of the atomic form sum_j weights[j] * ev(points[j])."""
        points = [tuple(map(float, p)) for p in points]
        n = len(points[0])
        y = {}
        for m in monomials_up_to(n, k):
            y[m] = float(sum(w * m.evaluate(p) for p, w in zip(points, weights)))
        return MomentSequence(n, k, y)

    def first_moment_point(self):
        return [self.y[Monomial(tuple(1 if j == i else 0 for j in range(self.n)))] for i in range(self.n)]


@dataclass(frozen=True)
class MomentMatrix:
    """Symmetric matrix labeled by the V_D basis."""

    n: int
    order: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        s = len(self.basis)
        if entries.shape != (s, s):
            raise ValueError(f"expected {s}x{s} entries for n={self.n}, order={self.order}")
        scale = max(1.0, np.max(np.abs(entries)))
        asym = np.max(np.abs(entries - entries.T))
        if asym > DEFAULT_SYM_TOL * scale:
            raise ValueError(f"matrix asymmetry {asym:.3e} exceeds tolerance")
        object.__setattr__(self, "entries", (entries + entries.T) / 2.0)

    @property
    def basis(self) -> MonomialBasis:
        return monomials_up_to(self.n, self.order)

    def to_moment_sequence(self) -> MomentSequence:
        """Read off y by averaging entries over each Hankel group."""
        basis = self.basis
        sums: dict[Monomial, float] = {}
        counts: dict[Monomial, int] = {}
        for i, a in enumerate(basis):
            for j, b in enumerate(basis):
                m = a * b
                sums[m] = sums.get(m, 0.0) + self.entries[i, j]
                counts[m] = counts.get(m, 0) + 1
        y = {m: sums[m] / counts[m] for m in sums}
        return MomentSequence(self.n, 2 * self.order, y)


def moment_matrix(y: MomentSequence, D: int) -> MomentMatrix:
    """M_D(y): entry (alpha, beta) = y_{alpha+beta}."""
    if 2 * D > y.k:
        raise ValueError(f"order {D} needs moments up to degree {2 * D}, have {y.k}")
    basis = monomials_up_to(y.n, D)
    s = len(basis)
    M = np.empty((s, s))
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            M[i, j] = y[a * b]
    return MomentMatrix(y.n, D, M)


def localizing_matrix(y: MomentSequence, p: Polynomial, k: int) -> np.ndarray:
    """M_{k,p}(y): entry (alpha, beta) = sum_gamma p_gamma y_{alpha+beta+gamma}.

    The matrix has side s_{d_p} with d_p = floor((k - deg p) / 2); for p = 1
    it coincides with the moment matrix of order floor(k / 2).
    """
    deg_p = p.degree
    if not p.terms:
        raise ValueError("localizing matrix of the zero polynomial is undefined")
    if deg_p > k or k > y.k:
        raise ValueError("degree overflow in localizing matrix")
    d_p = (k - int(deg_p)) // 2
    basis = monomials_up_to(y.n, d_p)
    s = len(basis)
    M = np.zeros((s, s))
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            ab = a * b
            M[i, j] = sum(c * y[ab * g] for g, c in p.terms.items())
    return M


def psd_check(M: np.ndarray, tol: float) -> tuple[bool, float]:
    """Check positive semidefiniteness: lambda_min >= -tol * max(1, lambda_max)."""
    M = np.asarray(M, dtype=float)
    scale = max(1.0, np.max(np.abs(M))) if M.size else 1.0
    asym = np.max(np.abs(M - M.T)) if M.size else 0.0
    if asym > DEFAULT_SYM_TOL * scale:
        raise ValueError(f"matrix asymmetry {asym:.3e} beyond tolerance")
    eigvals = np.linalg.eigvalsh((M + M.T) / 2.0)
    lam_min = float(eigvals[0])
    lam_max = float(eigvals[-1])
    return lam_min >= -tol * max(1.0, lam_max), lam_min


def hankel_groups(basis: MonomialBasis):
    """Positions (i, j) grouped by the monomial sum basis[i] * basis[j]."""
    groups: dict[Monomial, list] = {}
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            groups.setdefault(a * b, []).append((i, j))
    return groups


def is_generalized_hankel(M: np.ndarray, basis: MonomialBasis, tol: float) -> tuple[bool, float]:
    """True iff entries within each Hankel group agree.

    The spread threshold is tol * max(1, largest absolute entry), matching
    the resolution at which matrices are declared Hankel.  The returned
    deviation is the largest raw spread.
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (len(basis), len(basis)):
        raise ValueError("matrix side does not match basis")
    deviation = 0.0
    for positions in hankel_groups(basis).values():
        vals = [M[i, j] for i, j in positions]
        deviation = max(deviation, max(vals) - min(vals))
    scale = max(1.0, np.max(np.abs(M))) if M.size else 1.0
    return deviation <= tol * scale, float(deviation)


def linear_form_apply(y: MomentSequence, p: Polynomial) -> float:
    """L(p) = sum_alpha p_alpha y_alpha."""
    if p.terms and p.degree > y.k:
        raise ValueError("degree overflow in linear form")
    return float(sum(c * y[m] for m, c in p.terms.items()))


def bilinear_form(M: MomentMatrix, p: Polynomial, q: Polynomial) -> float:
    """<p, q>_L = vec(p)^T M vec(q), valid for deg p, deg q <= order."""
    basis = M.basis
    return float(vectorize(p, basis) @ M.entries @ vectorize(q, basis))
