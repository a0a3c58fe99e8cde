"""Minimizer extraction and the optimality certificate.

When the modified moment matrix is generalized Hankel the truncated GNS
multiplication operators commute, so they admit a simultaneous orthogonal
diagonalization.  The shared eigenvector columns give quadrature nodes
(column j of P^T M_i P collects coordinate i of node j) and the weights
come from the coordinates of the constant polynomial.  The certificate
logic then applies the degree gate and a node feasibility test to decide
whether the relaxation value is the global minimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gns import GnsModel, certify_hankel, max_commutator_rank
from .moment import MomentMatrix, linear_form_apply
from .poly import Monomial, evaluate, monomials_up_to
from .sdp import PopProblem

WEIGHT_PRUNE_TOL = 1e-8
NODE_MERGE_TOL = 1e-6


@dataclass
class Tolerances:
    tol_rank: float = 1e-6
    tol_hankel: float = 1e-4
    tol_feas: float = 1e-4


@dataclass
class QuadratureRule:
    nodes: list  # list of n-vectors
    weights: list  # positive reals
    diagnostics: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.weights)


@dataclass
class Certificate:
    status: str
    hankel_status: str
    relaxation_value: float | None
    rule: QuadratureRule | None
    moller_lower_bound: int | None
    first_moment_point: list | None
    hankel_deviation: float
    commutator_rank: int
    dim_truncation: int
    rank_principal: int
    rank_full: int
    diagnostics: list = field(default_factory=list)


class DiagonalizationError(RuntimeError):
    pass


def _offdiag_mass(S: np.ndarray) -> float:
    D = S - np.diag(np.diag(S))
    return float(np.max(np.abs(D))) if D.size else 0.0


def _jacobi_joint_diagonalize(ops: list, sweeps: int = 50, eps: float = 1e-14) -> np.ndarray:
    """Jacobi-style sweeps minimizing total off-diagonal energy."""
    r = ops[0].shape[0]
    P = np.eye(r)
    work = [op.copy() for op in ops]

    def pair_energy(mats, p, q):
        return sum(A[p, q] ** 2 for A in mats)

    def rotate(theta, p, q):
        G = np.eye(r)
        cth, sth = math.cos(theta), math.sin(theta)
        G[p, p] = cth
        G[q, q] = cth
        G[p, q] = -sth
        G[q, p] = sth
        return G

    for _ in range(sweeps):
        changed = False
        for p in range(r - 1):
            for q in range(p + 1, r):
                # off-diagonal entry after rotating by theta:
                #   (u/2) sin(2 theta) + v cos(2 theta), u = A_pp - A_qq, v = A_pq
                a = sum((A[p, p] - A[q, q]) ** 2 / 4.0 for A in work)
                b = sum((A[p, p] - A[q, q]) * A[p, q] for A in work)
                cpair = pair_energy(work, p, q)
                psi = (math.atan2(b, cpair - a) + math.pi) / 2.0
                theta = psi / 2.0
                theta = ((theta + math.pi / 4.0) % (math.pi / 2.0)) - math.pi / 4.0
                if abs(theta) < eps:
                    continue
                best = None
                for cand in (theta, -theta):
                    G = rotate(cand, p, q)
                    energy = pair_energy([G.T @ A @ G for A in work], p, q)
                    if best is None or energy < best[0]:
                        best = (energy, G)
                if best[0] < cpair - eps * max(1.0, cpair):
                    G = best[1]
                    work = [G.T @ A @ G for A in work]
                    P = P @ G
                    changed = True
        if not changed:
            break
    return P


def simultaneous_diagonalize(ops: list, seed: int = 0, tol: float = 1e-6) -> np.ndarray:
    """Orthogonal P with P^T M_i P diagonal for all i.

    Draws a random unit combination r, diagonalizes sum r_i M_i and checks
    the conjugated operators; a bad draw (eigenvalue collision) triggers a
    redraw, and after five tries a Jacobi-style joint sweep is used.
    """
    if not ops:
        raise ValueError("no operators to diagonalize")
    r = ops[0].shape[0]
    scale = max(1.0, max(float(np.max(np.abs(op))) for op in ops))
    rng = np.random.default_rng(seed)

    def residual(P):
        return max(_offdiag_mass(P.T @ op @ P) for op in ops)

    best_P, best_res = np.eye(r), residual(np.eye(r))
    for _ in range(5):
        v = rng.normal(size=len(ops))
        v /= np.linalg.norm(v)
        combo = sum(vi * op for vi, op in zip(v, ops))
        _, P = np.linalg.eigh((combo + combo.T) / 2.0)
        res = residual(P)
        if res <= tol * scale:
            return P
        if res < best_res:
            best_P, best_res = P, res
    work = [best_P.T @ op @ best_P for op in ops]
    P = best_P @ _jacobi_joint_diagonalize(work)
    res = residual(P)
    if res > tol * scale:
        raise DiagonalizationError(
            f"operators could not be jointly diagonalized (off-diagonal residual "
            f"{res:.3e} vs tolerance {tol * scale:.3e}); they only approximately commute"
        )
    return P


def _refine_rule(M: MomentMatrix, nodes: list, weights: list, iters: int = 25):
    """Gauss-Newton fit of (nodes, weights) to the moments of degree <= 2D-1.

    Operator eigenvalues inherit the rounding of the input matrix; a few
    least-squares steps against the moment sequence recover the extra
    digits.  Returns None when the fit diverges (weight sign flip or a
    residual that stopped improving), in which case the caller keeps the
    unrefined rule.
    """
    y = M.to_moment_sequence()
    monos = list(monomials_up_to(M.n, 2 * M.order - 1))
    n = M.n
    N = len(weights)
    nodes = np.array(nodes, dtype=float)
    w = np.array(weights, dtype=float)

    def residual(nodes, w):
        return np.array(
            [sum(w[j] * m.evaluate(nodes[j]) for j in range(N)) - y[m] for m in monos]
        )

    best = (float(np.max(np.abs(residual(nodes, w)))), nodes.copy(), w.copy())
    for _ in range(iters):
        r = residual(nodes, w)
        J = np.zeros((len(monos), N * (n + 1)))
        for mi, m in enumerate(monos):
            for j in range(N):
                J[mi, j] = m.evaluate(nodes[j])
                for k in range(n):
                    e = m.exponents[k]
                    if e == 0:
                        continue
                    val = e * nodes[j][k] ** (e - 1)
                    for kk in range(n):
                        if kk != k:
                            val *= nodes[j][kk] ** m.exponents[kk]
                    J[mi, N + j * n + k] = w[j] * val
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        w = w + step[:N]
        nodes = nodes + step[N:].reshape(N, n)
        if np.any(w <= 0.0):
            return None
        res = float(np.max(np.abs(residual(nodes, w))))
        if res < best[0]:
            best = (res, nodes.copy(), w.copy())
        if np.max(np.abs(step)) < 1e-14:
            break
    return best


def extract_quadrature(model: GnsModel, seed: int = 0, tol: float = 1e-6) -> QuadratureRule:
    """Nodes and weights of the Gaussian quadrature rule carried by the model."""
    diagnostics = []
    P = simultaneous_diagonalize(model.op_matrices, seed, tol)
    n = model.source.n
    diags = [np.diag(P.T @ op @ P) for op in model.op_matrices]
    b = P.T @ model.coords_one
    nodes, weights = [], []
    for j in range(P.shape[0]):
        w = float(b[j] ** 2)
        if w < WEIGHT_PRUNE_TOL:
            diagnostics.append(f"pruned node {j} with weight {w:.3e}")
            continue
        nodes.append([float(diags[i][j]) for i in range(n)])
        weights.append(w)

    # merge nodes that collapsed within the separation tolerance
    merged_nodes, merged_weights = [], []
    for node, w in zip(nodes, weights):
        for i, other in enumerate(merged_nodes):
            if np.linalg.norm(np.array(node) - np.array(other)) <= NODE_MERGE_TOL:
                tot = merged_weights[i] + w
                merged_nodes[i] = [
                    (merged_weights[i] * o + w * v) / tot for o, v in zip(other, node)
                ]
                merged_weights[i] = tot
                diagnostics.append("merged two nodes within separation tolerance")
                break
        else:
            merged_nodes.append(node)
            merged_weights.append(w)

    if merged_nodes:
        refined = _refine_rule(model.source, merged_nodes, merged_weights)
        if refined is not None:
            _, rn, rw = refined
            merged_nodes = [list(map(float, a)) for a in rn]
            merged_weights = [float(v) for v in rw]
    return QuadratureRule(merged_nodes, merged_weights, diagnostics)


@dataclass
class VerificationResult:
    moment_error: float  # max over monomials of degree <= 2D-1
    reconstruction_error: float  # max deviation of m_tilde from the atomic sum
    full_degree_error: float  # max over monomials of degree <= 2D against M itself


def verify_quadrature(M: MomentMatrix, rule: QuadratureRule, tol: float = 1e-6) -> VerificationResult:
    """Compare the rule against the linear form of M and against m_tilde."""
    y = M.to_moment_sequence()
    D = M.order
    moment_err = 0.0
    full_err = 0.0
    for m in monomials_up_to(M.n, 2 * D):
        approx = sum(w * m.evaluate(a) for a, w in zip(rule.nodes, rule.weights))
        err = abs(y[m] - approx)
        full_err = max(full_err, err)
        if m.degree <= 2 * D - 1:
            moment_err = max(moment_err, err)
    from .gns import modified_moment_matrix

    m_tilde, _ = modified_moment_matrix(M, tol)
    basis = M.basis
    V = np.array([[mono.evaluate(a) for mono in basis] for a in rule.nodes])
    recon = sum(w * np.outer(V[j], V[j]) for j, w in enumerate(rule.weights))
    recon_err = float(np.max(np.abs(m_tilde - recon)))
    return VerificationResult(float(moment_err), recon_err, float(full_err))


def moller_bound(model: GnsModel, tol: float = 1e-6) -> int:
    """Lower bound on the node count: dim T_L + ceil(max commutator rank / 2)."""
    rank = max_commutator_rank(model.op_matrices, tol)
    return model.dim_truncation + (rank + 1) // 2


def check_feasibility(nodes: list, constraints: list, tol: float = 1e-4):
    """Per-node feasibility against p_i >= 0; returns (flags, worst violation)."""
    flags = []
    worst = 0.0
    for a in nodes:
        ok = True
        for p in constraints:
            scale = max(1.0, p.coeff_norm())
            val = evaluate(p, a)
            if val < -tol * scale:
                ok = False
                worst = max(worst, -val / scale)
        flags.append(ok)
    return flags, worst


def certify(
    prob: PopProblem | None,
    M: MomentMatrix,
    k: int,
    value: float | None = None,
    tolerances: Tolerances = None,
    seed: int = 0,
    max_minimizers: int | None = None,
) -> Certificate:
    """Run the optimality decision procedure on a solved relaxation.

    Steps: Hankel certificate on M~, degree gate, quadrature extraction and
    verification, then node feasibility (skipped for unconstrained problems
    and polyhedral constraint sets, where the nodes are automatically
    minimizers).
    """
    tols = tolerances or Tolerances()
    hc = certify_hankel(M, tols.tol_rank, tols.tol_hankel)
    model = hc.model
    diagnostics = list(hc.warnings)
    y = M.to_moment_sequence()
    first_moment = [
        y[Monomial(tuple(1 if j == i else 0 for j in range(M.n)))] for i in range(M.n)
    ]
    bound = moller_bound(model, tols.tol_rank)
    if value is None and prob is not None and prob.objective.degree <= 2 * M.order:
        value = linear_form_apply(y, prob.objective)

    def cert(status, rule=None, extra=None):
        return Certificate(
            status=status,
            hankel_status=hc.status,
            relaxation_value=value,
            rule=rule,
            moller_lower_bound=bound,
            first_moment_point=first_moment,
            hankel_deviation=hc.deviation,
            commutator_rank=hc.commutator_rank,
            dim_truncation=model.dim_truncation,
            rank_principal=model.rank_A,
            rank_full=model.rank_M,
            diagnostics=diagnostics + (extra or []),
        )

    if hc.status == "NotHankel":
        if max_minimizers is not None and bound > max_minimizers:
            return cert(
                "MollerExcluded",
                extra=[
                    f"Moller bound {bound} exceeds the supplied minimizer cap "
                    f"{max_minimizers}; no Gaussian quadrature rule exists at this order"
                ],
            )
        return cert("Inconclusive", extra=["modified moment matrix is not generalized Hankel"])

    # degree gate (even k allows deg f <= k-1, odd k allows deg f <= k-2, flat always passes)
    deg_f = prob.objective.degree if prob is not None else float("-inf")
    even_gate = k % 2 == 0 and deg_f <= k - 1
    odd_gate = k % 2 == 1 and deg_f <= k - 2
    gate = even_gate or odd_gate or model.is_flat
    if odd_gate and not even_gate and not model.is_flat:
        diagnostics.append(
            "degree gate passed only through the odd-order rule (deg f <= k-2); "
            "the polyhedral shortcut theorem is stated for even orders"
        )

    try:
        rule = extract_quadrature(model, seed, max(1e-6, tols.tol_hankel))
        diagnostics.extend(rule.diagnostics)
    except DiagonalizationError as exc:
        return cert("Inconclusive", extra=[str(exc)])

    if not gate:
        return cert("GaussianRuleFoundDegreeGap", rule=rule, extra=[
            f"Gaussian rule found but deg f = {deg_f} exceeds the degree gate at order {k}"
        ])

    ver = verify_quadrature(M, rule, tols.tol_rank)
    scale = max(1.0, float(np.max(np.abs(M.entries))))
    verify_tol = max(10.0 * tols.tol_rank, tols.tol_hankel) * scale
    if ver.moment_error > verify_tol or ver.reconstruction_error > verify_tol:
        return cert("Inconclusive", rule=rule, extra=[
            f"extracted rule fails verification (moment error {ver.moment_error:.3e}, "
            f"reconstruction error {ver.reconstruction_error:.3e})"
        ])

    constraints = list(prob.constraints) if prob is not None else []
    polyhedral = all(p.degree <= 1 for p in constraints)
    if constraints and not polyhedral:
        flags, worst = check_feasibility(rule.nodes, constraints, tols.tol_feas)
        if not all(flags):
            bad = [rule.nodes[i] for i, f in enumerate(flags) if not f]
            return cert("GaussianRuleFoundNodesInfeasible", rule=rule, extra=[
                f"nodes outside the feasible set (worst violation {worst:.3e}): {bad}"
            ])

    extra = []
    if value is not None and prob is not None:
        value_tol = 10.0 * tols.tol_hankel * max(1.0, abs(value))
        off = max(abs(evaluate(prob.objective, a) - value) for a in rule.nodes)
        if off > value_tol:
            return cert("Inconclusive", rule=rule, extra=[
                f"objective at nodes deviates from the relaxation value by {off:.3e}"
            ])
        extra.append(f"objective agrees with the relaxation value within {off:.3e}")
    return cert("OptimalCertified", rule=rule, extra=extra)
