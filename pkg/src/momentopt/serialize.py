"""JSON file formats for problems, moment matrices and reports.

Problem files:
    {"variables": n, "objective": [terms], "inequalities": [[terms], ...],
     "equalities": [[terms], ...]}
with term = {"exponents": [...], "coeff": x}.  Equalities g = 0 are
expanded to the inequality pair g >= 0, -g >= 0 when building the
optimization problem.

Moment matrix files:
    {"n": ..., "order": ..., "entries": [row-major numbers]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .moment import MomentMatrix
from .poly import Polynomial
from .sdp import PopProblem


def polynomial_to_terms(p: Polynomial) -> list:
    monos = sorted(p.terms, key=lambda m: m.sort_key())
    return [{"exponents": list(m.exponents), "coeff": p.terms[m]} for m in monos]


def terms_to_polynomial(n: int, terms: list) -> Polynomial:
    acc = {}
    for t in terms:
        exps = tuple(int(e) for e in t["exponents"])
        if len(exps) != n:
            raise ValueError(f"term {exps} has wrong variable count (expected {n})")
        acc[exps] = acc.get(exps, 0.0) + float(t["coeff"])
    return Polynomial.from_terms(n, acc)


@dataclass(frozen=True)
class ProblemFile:
    """Parsed problem file, keeping equalities separate for round-trips."""

    n: int
    objective: Polynomial
    inequalities: tuple
    equalities: tuple

    def to_pop(self) -> PopProblem:
        constraints = list(self.inequalities)
        for g in self.equalities:
            constraints.append(g)
            constraints.append(-g)
        return PopProblem(self.n, self.objective, tuple(constraints))


def problem_from_dict(data: dict) -> ProblemFile:
    n = int(data["variables"])
    if n < 1:
        raise ValueError("variables must be >= 1")
    objective = terms_to_polynomial(n, data["objective"])
    inequalities = tuple(terms_to_polynomial(n, t) for t in data.get("inequalities", []))
    equalities = tuple(terms_to_polynomial(n, t) for t in data.get("equalities", []))
    return ProblemFile(n, objective, inequalities, equalities)


def problem_to_dict(pf: ProblemFile) -> dict:
    return {
        "variables": pf.n,
        "objective": polynomial_to_terms(pf.objective),
        "inequalities": [polynomial_to_terms(p) for p in pf.inequalities],
        "equalities": [polynomial_to_terms(p) for p in pf.equalities],
    }


def matrix_from_dict(data: dict) -> MomentMatrix:
    n = int(data["n"])
    order = int(data["order"])
    entries = np.asarray(data["entries"], dtype=float)
    if entries.ndim == 1:
        side = int(round(len(entries) ** 0.5))
        if side * side != len(entries):
            raise ValueError("entries length is not a perfect square")
        entries = entries.reshape(side, side)
    return MomentMatrix(n, order, entries)


def matrix_to_dict(M: MomentMatrix) -> dict:
    return {"n": M.n, "order": M.order, "entries": [float(v) for v in M.entries.reshape(-1)]}


def load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def dump_json(data: dict, path: str | None = None) -> str:
    text = json.dumps(data, indent=2, sort_keys=True)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text
