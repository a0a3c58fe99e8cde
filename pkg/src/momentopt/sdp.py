"""Moment relaxation assembly and a dense primal-dual interior-point solver.

The relaxation (P_k) minimizes sum f_alpha y_alpha subject to y_0 = 1, the
moment block M_{floor(k/2)}(y) PSD and one localizing block per constraint.
With y_0 eliminated this is a linear matrix inequality in the remaining
moments, solved here with an infeasible-start path-following method using
Nesterov-Todd scaling and a Mehrotra predictor-corrector step.  Blocks are
dense; the Schur complement is factored with a Cholesky decomposition.
Problem sizes in this package are desk scale (block side below ~30), so no
sparsity is exploited.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .moment import MomentSequence
from .poly import MonomialBasis, Polynomial, monomials_up_to


@dataclass(frozen=True)
class PopProblem:
    """minimize f(x) over the set where every constraint polynomial is >= 0."""

    n: int
    objective: Polynomial
    constraints: tuple = ()

    def __post_init__(self):
        if self.objective.n != self.n or any(p.n != self.n for p in self.constraints):
            raise ValueError("variable count mismatch in problem")
        object.__setattr__(self, "constraints", tuple(self.constraints))

    def max_degree(self) -> int:
        degs = [self.objective.degree] + [p.degree for p in self.constraints]
        degs = [int(d) for d in degs if d != float("-inf")]
        return max(degs, default=0)


@dataclass
class SdpBlock:
    side: int
    # map y-index -> symmetric coefficient matrix; index 0 is y_0 = 1
    coeff: dict


@dataclass
class SdpProblem:
    n: int
    k: int
    basis: MonomialBasis
    c: np.ndarray
    blocks: list


@dataclass
class SolveOptions:
    max_iter: int = 200
    gap_tol: float = 1e-8
    feas_tol: float = 1e-8
    step_frac: float = 0.98
    verbose: bool = False


@dataclass
class SdpSolution:
    y: MomentSequence
    objective_value: float
    status: str  # Optimal | MaxIterations | Infeasible | Unbounded | NumericalFailure
    duality_gap: float
    iterations: int
    diagnostics: list = field(default_factory=list)


def assemble_relaxation(prob: PopProblem, k: int) -> SdpProblem:
    """Build the degree-k moment relaxation of the problem."""
    if k < 1 or k < prob.max_degree():
        raise ValueError(f"relaxation degree {k} is below the problem degree {prob.max_degree()}")
    basis = monomials_up_to(prob.n, k)
    c = np.zeros(len(basis))
    for m, coef in prob.objective.terms.items():
        c[basis.index(m)] = coef

    blocks = []
    localizers = [Polynomial.constant(prob.n, 1.0)] + list(prob.constraints)
    for p in localizers:
        deg_p = int(p.degree)
        d_p = (k - deg_p) // 2
        sub = monomials_up_to(prob.n, d_p)
        side = len(sub)
        coeff: dict[int, np.ndarray] = {}
        for i, a in enumerate(sub):
            for j, b in enumerate(sub):
                ab = a * b
                for g, cg in p.terms.items():
                    idx = basis.index(ab * g)
                    mat = coeff.get(idx)
                    if mat is None:
                        mat = np.zeros((side, side))
                        coeff[idx] = mat
                    mat[i, j] += cg
        blocks.append(SdpBlock(side, coeff))
    return SdpProblem(prob.n, k, basis, c, blocks)


def _chol_step_length(S: np.ndarray, dS: np.ndarray, frac: float) -> float:
    """Largest alpha in (0, 1] keeping S + alpha*dS positive definite."""
    L = np.linalg.cholesky(S)
    Linv_dS = np.linalg.solve(L, dS)
    T = np.linalg.solve(L, Linv_dS.T)
    lam_min = float(np.linalg.eigvalsh((T + T.T) / 2.0)[0])
    if lam_min >= 0:
        return 1.0
    return min(1.0, -frac / lam_min)


class _IpmState:
    """Working data for one solve: active variables and stacked block maps."""

    def __init__(self, sdp: SdpProblem):
        m_full = len(sdp.basis) - 1
        used = set()
        for blk in sdp.blocks:
            used.update(i - 1 for i in blk.coeff if i != 0)
        self.active = sorted(used)
        self.pos = {v: i for i, v in enumerate(self.active)}
        self.m = len(self.active)
        self.m_full = m_full
        self.c = np.array([sdp.c[v + 1] for v in self.active])
        self.free_cost = [v for v in range(m_full) if v not in used and abs(sdp.c[v + 1]) > 1e-12]
        self.blocks = []
        for blk in sdp.blocks:
            F0 = blk.coeff.get(0, np.zeros((blk.side, blk.side)))
            F0 = (F0 + F0.T) / 2.0
            vars_b = sorted(i - 1 for i in blk.coeff if i != 0)
            idx = np.array([self.pos[v] for v in vars_b], dtype=int)
            stack = np.stack(
                [(blk.coeff[v + 1] + blk.coeff[v + 1].T) / 2.0 for v in vars_b]
            ) if vars_b else np.zeros((0, blk.side, blk.side))
            self.blocks.append((F0, idx, stack, blk.side))

    def apply(self, x: np.ndarray, b: int) -> np.ndarray:
        F0, idx, stack, side = self.blocks[b]
        if len(idx) == 0:
            return np.zeros((side, side))
        return np.tensordot(x[idx], stack, axes=(0, 0))


def solve_sdp(sdp: SdpProblem, opts: SolveOptions = None) -> SdpSolution:
    """Solve the assembled relaxation; never raises, failures go to status."""
    if opts is None:
        opts = SolveOptions()
    st = _IpmState(sdp)
    diagnostics = []
    if st.free_cost:
        y = _compose_moment_sequence(sdp, st, np.zeros(st.m))
        diagnostics.append(
            f"objective involves moments constrained by no block (indices {st.free_cost}); "
            "the relaxation is unbounded below"
        )
        return SdpSolution(y, float("-inf"), "Unbounded", float("inf"), 0, diagnostics)

    try:
        return _ipm(sdp, st, opts, diagnostics)
    except (np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
        y = _compose_moment_sequence(sdp, st, np.zeros(st.m))
        diagnostics.append(f"numerical failure: {exc}")
        return SdpSolution(y, float("nan"), "NumericalFailure", float("inf"), 0, diagnostics)


def _compose_moment_sequence(sdp: SdpProblem, st: _IpmState, x: np.ndarray) -> MomentSequence:
    values = {}
    basis = sdp.basis
    full = np.zeros(len(basis))
    full[0] = 1.0
    for v, xi in zip(st.active, x):
        full[v + 1] = xi
    for i, mono in enumerate(basis):
        values[mono] = float(full[i])
    return MomentSequence(sdp.n, sdp.k, values)


def _ipm(sdp: SdpProblem, st: _IpmState, opts: SolveOptions, diagnostics: list) -> SdpSolution:
    nblocks = len(st.blocks)
    ntot = sum(side for _, _, _, side in st.blocks)
    m = st.m
    c = st.c
    c0 = float(sdp.c[0])  # constant objective term from y_0 = 1

    x = np.zeros(m)
    X, Z = [], []
    f0_scale = 1.0
    for b in range(nblocks):
        F0, _, stack, side = st.blocks[b]
        lam_min = float(np.linalg.eigvalsh(F0)[0]) if side else 0.0
        norm0 = float(np.linalg.norm(F0, 2)) if side else 0.0
        f0_scale = max(f0_scale, norm0)
        shift = max(1.0, -1.5 * lam_min + 1.0, 0.1 * norm0)
        X.append(F0 + shift * np.eye(side))
        Z.append(max(1.0, float(np.max(np.abs(c))) if m else 1.0) * np.eye(side))

    best = None  # (merit, x, pobj, relgap, pinf, wd, it)
    stall = 0
    relgap = float("inf")
    it = 0
    pobj = float("nan")
    pinf = float("inf")
    pobj_hist = []
    wd_run = 0

    def finish_best(reason: str) -> SdpSolution:
        merit, bx, bpobj, brelgap, bpinf, bwd, bit = best
        y = _compose_moment_sequence(sdp, st, bx)
        if brelgap < 1e-6 and bpinf < 1e-6 and bwd < 1e-2:
            diagnostics.append(reason)
            return SdpSolution(y, bpobj, "Optimal", brelgap, bit, diagnostics)
        diagnostics.append(reason + "; tolerances not met")
        return SdpSolution(y, bpobj, "MaxIterations", brelgap, bit, diagnostics)

    for it in range(1, opts.max_iter + 1):
        Rp = [st.blocks[b][0] + st.apply(x, b) - X[b] for b in range(nblocks)]
        rd = c.copy()
        for b in range(nblocks):
            _, idx, stack, _ = st.blocks[b]
            if len(idx):
                rd[idx] -= np.tensordot(stack, Z[b], axes=([1, 2], [0, 1]))
        gap = sum(float(np.sum(X[b] * Z[b])) for b in range(nblocks))
        mu = gap / max(ntot, 1)
        pobj = float(c @ x) + c0
        dobj = c0 - sum(float(np.sum(st.blocks[b][0] * Z[b])) for b in range(nblocks))
        pinf = max((float(np.max(np.abs(R))) for R in Rp if R.size), default=0.0) / (1.0 + f0_scale)
        c_scale = 1.0 + (float(np.max(np.abs(c))) if m else 0.0)
        dinf = (float(np.max(np.abs(rd))) / c_scale) if m else 0.0
        relgap = abs(gap) / (1.0 + abs(pobj) + abs(dobj))
        pobj_hist.append(pobj)
        # weak duality demands dobj <= pobj; a large violation means the dual
        # iterate is far from feasible even if its residual norm looks small
        # (e.g. the primal has run off to a huge stalled point on an unbounded
        # relaxation), so the complementarity gap cannot be trusted
        wd = max(0.0, dobj - pobj) / (1.0 + abs(pobj) + abs(dobj))
        if opts.verbose:
            print(f"it {it:3d}  pobj {pobj: .6e}  dobj {dobj: .6e}  gap {relgap:.2e}  pinf {pinf:.2e}  dinf {dinf:.2e}")

        # primal-centric merit: downstream consumes the moment vector, so a
        # drifting dual residual (typical when equality pairs leave the primal
        # LMI without interior) must not spoil an already-converged iterate
        merit = relgap + pinf + 1e-3 * min(dinf, 1.0)
        if best is None or merit < 0.9 * best[0]:
            best = (merit, x.copy(), pobj, relgap, pinf, wd, it)
            stall = 0
        else:
            stall += 1

        if pinf <= opts.feas_tol and dinf <= opts.feas_tol and relgap <= opts.gap_tol and wd <= 1e-2:
            y = _compose_moment_sequence(sdp, st, x)
            return SdpSolution(y, pobj, "Optimal", relgap, it, diagnostics)
        if pobj < -1e12:
            y = _compose_moment_sequence(sdp, st, x)
            diagnostics.append("objective fell below -1e12; relaxation unbounded")
            return SdpSolution(y, pobj, "Unbounded", relgap, it, diagnostics)
        if pinf <= 10.0 * opts.feas_tol and wd > 0.1 and pobj < -1e3 * (1.0 + f0_scale):
            wd_run += 1
        else:
            wd_run = 0
        if wd_run >= 10:
            # ten straight iterations primal feasible and far below the data
            # scale with a gross weak-duality violation: the dual cannot
            # follow because it is infeasible, so the primal is unbounded
            y = _compose_moment_sequence(sdp, st, x)
            diagnostics.append(
                "primal objective runs away while the dual objective stays bounded; "
                "relaxation unbounded below"
            )
            return SdpSolution(y, pobj, "Unbounded", relgap, it, diagnostics)
        if stall >= 20 and best[3] < 1e-6 and best[4] < 1e-6 and best[5] < 1e-2:
            return finish_best(
                f"gap stalled at {best[3]:.3e} for 20 iterations on a degenerate "
                "optimal face; accepting the best iterate as optimal"
            )

        try:
            # Nesterov-Todd scaling point per block: W Z W = X; only W^-1 is needed
            Winv, Zinv = [], []
            for b in range(nblocks):
                Lx = np.linalg.cholesky(X[b])
                Mm = Lx.T @ Z[b] @ Lx
                vals, Q = np.linalg.eigh((Mm + Mm.T) / 2.0)
                vals = np.maximum(vals, 1e-300)
                Lx_inv = np.linalg.inv(Lx)
                Winv.append(Lx_inv.T @ (Q * (vals**0.5)) @ Q.T @ Lx_inv)
                Zinv.append(np.linalg.inv(Z[b]))

            # Schur complement B_ij = sum_b tr(F_i Winv F_j Winv)
            B = np.zeros((m, m))
            U_cache = []
            for b in range(nblocks):
                _, idx, stack, _ = st.blocks[b]
                if len(idx) == 0:
                    U_cache.append(None)
                    continue
                U = np.einsum("ij,qjk,kl->qil", Winv[b], stack, Winv[b])
                U_cache.append(U)
                B[np.ix_(idx, idx)] += np.tensordot(stack, U, axes=([1, 2], [1, 2]))
            B = (B + B.T) / 2.0
            jitter = 1e-13 * max(1.0, float(np.trace(B)) / max(m, 1))
            try:
                Lb = np.linalg.cholesky(B + jitter * np.eye(m))
            except np.linalg.LinAlgError:
                Lb = np.linalg.cholesky(B + 1e-8 * max(1.0, float(np.trace(B)) / max(m, 1)) * np.eye(m))

            def solve_newton(Rc):
                h = -rd.copy()
                for b in range(nblocks):
                    _, idx, stack, _ = st.blocks[b]
                    if len(idx) == 0:
                        continue
                    T = Winv[b] @ Rc[b] @ Winv[b]
                    h[idx] += np.tensordot(stack, T, axes=([1, 2], [0, 1]))
                dx = np.linalg.solve(Lb.T, np.linalg.solve(Lb, h))
                dZ, dX = [], []
                for b in range(nblocks):
                    Adx = st.apply(dx, b)
                    dZb = Winv[b] @ (Rc[b] - Adx) @ Winv[b]
                    dZ.append((dZb + dZb.T) / 2.0)
                    dXb = Adx + Rp[b]
                    dX.append((dXb + dXb.T) / 2.0)
                return dx, dX, dZ

            # predictor
            Rc_aff = [-X[b] - Rp[b] for b in range(nblocks)]
            dx_a, dX_a, dZ_a = solve_newton(Rc_aff)
            ap = min((_chol_step_length(X[b], dX_a[b], opts.step_frac) for b in range(nblocks)), default=1.0)
            ad = min((_chol_step_length(Z[b], dZ_a[b], opts.step_frac) for b in range(nblocks)), default=1.0)
            gap_aff = sum(
                float(np.sum((X[b] + ap * dX_a[b]) * (Z[b] + ad * dZ_a[b]))) for b in range(nblocks)
            )
            sigma = min(1.0, max((gap_aff / max(gap, 1e-300)) ** 3, 1e-8))

            # corrector
            Rc = []
            for b in range(nblocks):
                T = dX_a[b] @ dZ_a[b] @ Zinv[b]
                Rc.append(sigma * mu * Zinv[b] - X[b] - Rp[b] - (T + T.T) / 2.0)
            dx, dX, dZ = solve_newton(Rc)
            ap = min((_chol_step_length(X[b], dX[b], opts.step_frac) for b in range(nblocks)), default=1.0)
            ad = min((_chol_step_length(Z[b], dZ[b], opts.step_frac) for b in range(nblocks)), default=1.0)

            x = x + ap * dx
            for b in range(nblocks):
                X[b] = (X[b] + ap * dX[b] + (X[b] + ap * dX[b]).T) / 2.0
                Z[b] = (Z[b] + ad * dZ[b] + (Z[b] + ad * dZ[b]).T) / 2.0
            if not np.all(np.isfinite(x)):
                raise FloatingPointError("iterate diverged")
        except np.linalg.LinAlgError as exc:
            # late-stage breakdown on a degenerate face; keep the best iterate
            if best is not None:
                return finish_best(f"stopped on numerical breakdown at iteration {it} ({exc})")
            raise

    # unboundedness along a curved feasible set (e.g. y_1 free on y_2 >= y_1^2)
    # has no linear recession ray and diverges too slowly to hit the -1e12
    # check; it shows up as a primal-feasible objective that is far below the
    # data scale and still steadily decreasing at the limit, whereas a bounded
    # run that merely stalls flatlines
    q3 = pobj_hist[(3 * len(pobj_hist)) // 4] if pobj_hist else 0.0
    if (
        pobj_hist
        and pinf <= 10.0 * opts.feas_tol
        and relgap > opts.gap_tol
        and pobj < -1e3 * (1.0 + f0_scale)
        and pobj <= q3 - 0.05 * (1.0 + abs(pobj))
    ):
        y = _compose_moment_sequence(sdp, st, x)
        diagnostics.append(
            "primal objective still diverging at the iteration limit; "
            "relaxation unbounded below"
        )
        return SdpSolution(y, pobj, "Unbounded", relgap, it, diagnostics)

    if best is not None:
        return finish_best("iteration limit reached")
    y = _compose_moment_sequence(sdp, st, x)
    diagnostics.append("iteration limit reached before meeting tolerances")
    return SdpSolution(y, float(c @ x) + c0, "MaxIterations", relgap, it, diagnostics)
