"""Hierarchy driver: raise the relaxation order until optimality is certified.

Starting from the problem degree, each level assembles and solves the
moment relaxation, then runs the certificate logic on the moment block.
The loop stops at the first certified level; otherwise the report carries
the best lower bound found.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .extract import Certificate, Tolerances, certify
from .moment import moment_matrix
from .sdp import PopProblem, SolveOptions, assemble_relaxation, solve_sdp


@dataclass
class RunConfig:
    k_start: int | None = None
    k_max: int | None = None
    tol_rank: float = 1e-6
    tol_hankel: float = 1e-4
    tol_feas: float = 1e-4
    gap_tol: float = 1e-8
    seed: int = 0
    max_minimizers: int | None = None

    def tolerances(self) -> Tolerances:
        return Tolerances(self.tol_rank, self.tol_hankel, self.tol_feas)


@dataclass
class LevelRecord:
    k: int
    value: float | None
    solver_status: str
    certificate: Certificate | None
    diagnostics: list = field(default_factory=list)


@dataclass
class RunReport:
    levels: list
    final_status: str
    final_certificate: Certificate | None
    best_lower_bound: float | None

    @property
    def final_rule(self):
        return self.final_certificate.rule if self.final_certificate else None


def run_hierarchy(prob: PopProblem, cfg: RunConfig = None) -> RunReport:
    cfg = cfg or RunConfig()
    # the moment block must have order >= 1 for the GNS construction
    k_start = max(2, cfg.k_start if cfg.k_start is not None else prob.max_degree())
    k_max = cfg.k_max if cfg.k_max is not None else k_start + 6
    if k_start < prob.max_degree():
        raise ValueError(f"k_start {k_start} below problem degree {prob.max_degree()}")

    levels = []
    best_bound = None
    tols = cfg.tolerances()
    for k in range(k_start, k_max + 1):
        diagnostics = []
        sdp = assemble_relaxation(prob, k)
        sol = solve_sdp(sdp, SolveOptions(gap_tol=cfg.gap_tol))
        diagnostics.extend(sol.diagnostics)
        if sol.status != "Optimal":
            # the certificate reads the solved value as a lower bound, which
            # only the dual side of a converged solve can vouch for; a stalled
            # or diverged iterate proves nothing and must not be certified
            if sol.status == "MaxIterations":
                diagnostics.append("solver hit the iteration limit; level skipped")
            levels.append(LevelRecord(k, None, sol.status, None, diagnostics))
            continue
        value = sol.objective_value
        if best_bound is None or value > best_bound:
            best_bound = value
        M = moment_matrix(sol.y, k // 2)
        try:
            cert = certify(prob, M, k, value, tols, cfg.seed, cfg.max_minimizers)
        except ValueError as exc:
            diagnostics.append(f"certificate step failed: {exc}")
            levels.append(LevelRecord(k, value, sol.status, None, diagnostics))
            continue
        levels.append(LevelRecord(k, value, sol.status, cert, diagnostics))
        if cert.status == "OptimalCertified":
            return RunReport(levels, "OptimalCertified", cert, best_bound)
    final_cert = levels[-1].certificate if levels else None
    return RunReport(levels, "Inconclusive", final_cert, best_bound)
