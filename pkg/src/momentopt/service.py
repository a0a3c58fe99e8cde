"""HTTP service and shared request handlers.

The handler functions (solve_problem, relax_problem, extract_matrix,
bound_matrix) take and return plain dicts so the CLI can call them
in-process; the FastAPI app is a thin wrapper that adds validation and
maps ValueError to a 400 response.  Reports are deterministic: no
timestamps, sorted keys on serialization.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .extract import Tolerances, certify, moller_bound
from .gns import build_gns_model, max_commutator_rank
from .hierarchy import RunConfig, run_hierarchy
from .moment import moment_matrix
from .poly import monomials_up_to
from .sdp import SolveOptions, assemble_relaxation, solve_sdp
from .serialize import matrix_from_dict, problem_from_dict

EXIT_CERTIFIED = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


class TermModel(BaseModel):
    exponents: list[int]
    coeff: float


class ProblemModel(BaseModel):
    variables: int
    objective: list[TermModel]
    inequalities: list[list[TermModel]] = Field(default_factory=list)
    equalities: list[list[TermModel]] = Field(default_factory=list)


class MatrixModel(BaseModel):
    n: int
    order: int
    entries: list[float]


class OptionsModel(BaseModel):
    seed: int = 0
    tol_rank: float = 1e-6
    tol_hankel: float = 1e-4
    tol_feas: float = 1e-4
    gap_tol: float = 1e-8
    max_order: int | None = None


class SolveRequest(BaseModel):
    problem: ProblemModel
    options: OptionsModel = Field(default_factory=OptionsModel)


class RelaxRequest(BaseModel):
    problem: ProblemModel
    order: int
    options: OptionsModel = Field(default_factory=OptionsModel)


class ExtractRequest(BaseModel):
    matrix: MatrixModel
    problem: ProblemModel | None = None
    options: OptionsModel = Field(default_factory=OptionsModel)


class BoundRequest(BaseModel):
    matrix: MatrixModel
    options: OptionsModel = Field(default_factory=OptionsModel)


def _options(data: dict) -> OptionsModel:
    return OptionsModel(**(data or {}))


def _rule_payload(rule):
    if rule is None:
        return None, None
    return [list(map(float, a)) for a in rule.nodes], [float(w) for w in rule.weights]


def _certificate_payload(cert):
    nodes, weights = _rule_payload(cert.rule)
    return {
        "status": cert.status,
        "hankel_status": cert.hankel_status,
        "value": cert.relaxation_value,
        "nodes": nodes,
        "weights": weights,
        "dim_T": cert.dim_truncation,
        "max_commutator_rank": cert.commutator_rank,
        "moller_bound": cert.moller_lower_bound,
        "rank_principal": cert.rank_principal,
        "rank_full": cert.rank_full,
        "hankel_deviation": cert.hankel_deviation,
        "first_moment_point": cert.first_moment_point,
        "diagnostics": list(cert.diagnostics),
    }


def solve_problem(problem: dict, options: dict | None = None) -> dict:
    opts = _options(options)
    prob = problem_from_dict(problem).to_pop()
    cfg = RunConfig(
        k_max=opts.max_order,
        tol_rank=opts.tol_rank,
        tol_hankel=opts.tol_hankel,
        tol_feas=opts.tol_feas,
        gap_tol=opts.gap_tol,
        seed=opts.seed,
    )
    report = run_hierarchy(prob, cfg)
    levels = []
    for lv in report.levels:
        levels.append({
            "order": lv.k,
            "solver_status": lv.solver_status,
            "value": lv.value,
            "certificate": _certificate_payload(lv.certificate) if lv.certificate else None,
            "diagnostics": list(lv.diagnostics),
        })
    cert = report.final_certificate
    return {
        "status": report.final_status,
        "value": report.best_lower_bound,
        "certificate": _certificate_payload(cert) if cert else None,
        "levels": levels,
    }


def relax_problem(problem: dict, order: int, options: dict | None = None) -> dict:
    opts = _options(options)
    prob = problem_from_dict(problem).to_pop()
    if order < prob.max_degree():
        raise ValueError(f"order {order} is below the problem degree {prob.max_degree()}")
    sdp = assemble_relaxation(prob, order)
    sol = solve_sdp(sdp, SolveOptions(gap_tol=opts.gap_tol))
    payload = {
        "status": sol.status,
        "order": order,
        "value": sol.objective_value,
        "diagnostics": list(sol.diagnostics),
    }
    if sol.y is not None:
        payload["moments"] = [
            {"exponents": list(m.exponents), "value": sol.y[m]}
            for m in monomials_up_to(prob.n, order)
        ]
        M = moment_matrix(sol.y, order // 2)
        payload["moment_matrix"] = {
            "n": prob.n,
            "order": order // 2,
            "entries": [float(v) for v in M.entries.reshape(-1)],
        }
    return payload


def extract_matrix(matrix: dict, problem: dict | None = None, options: dict | None = None) -> dict:
    opts = _options(options)
    M = matrix_from_dict(matrix)
    prob = problem_from_dict(problem).to_pop() if problem else None
    tols = Tolerances(opts.tol_rank, opts.tol_hankel, opts.tol_feas)
    cert = certify(prob, M, 2 * M.order, None, tols, opts.seed)
    return _certificate_payload(cert)


def bound_matrix(matrix: dict, options: dict | None = None) -> dict:
    opts = _options(options)
    M = matrix_from_dict(matrix)
    model = build_gns_model(M, opts.tol_rank)
    rank = max_commutator_rank(model.op_matrices, opts.tol_rank)
    return {
        "dim_T": model.dim_truncation,
        "max_commutator_rank": rank,
        "moller_bound": moller_bound(model, opts.tol_rank),
    }


def exit_code_for(status: str) -> int:
    return EXIT_CERTIFIED if status == "OptimalCertified" else EXIT_INCONCLUSIVE


app = FastAPI(title="momentopt", version="0.1.0")


def _wrap(fn, *args):
    try:
        return fn(*args)
    except (ValueError, KeyError) as exc:
        raise HTTPException(status_code=400, detail=str(exc))


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/solve")
def solve_endpoint(req: SolveRequest):
    return _wrap(solve_problem, req.problem.model_dump(), req.options.model_dump())


@app.post("/relax")
def relax_endpoint(req: RelaxRequest):
    return _wrap(relax_problem, req.problem.model_dump(), req.order, req.options.model_dump())


@app.post("/extract")
def extract_endpoint(req: ExtractRequest):
    problem = req.problem.model_dump() if req.problem is not None else None
    return _wrap(extract_matrix, req.matrix.model_dump(), problem, req.options.model_dump())


@app.post("/bound")
def bound_endpoint(req: BoundRequest):
    return _wrap(bound_matrix, req.matrix.model_dump(), req.options.model_dump())
