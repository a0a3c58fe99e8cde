"""Acceptance suite: one test per release criterion, pinned tolerances.

Each test prints a single PASS/FAIL line on the real stderr so the
criterion ledger survives pytest's capture.
"""

import functools
import math
import sys
import time

import numpy as np
import pytest

from momentopt.extract import (
    Tolerances,
    certify,
    check_feasibility,
    extract_quadrature,
    moller_bound,
    verify_quadrature,
)
from momentopt.gns import (
    build_gns_model,
    certify_hankel,
    is_flat,
    kernel_basis,
    max_commutator_rank,
    modified_moment_matrix,
)
from momentopt.hierarchy import RunConfig, run_hierarchy
from momentopt.moment import MomentSequence, is_generalized_hankel, moment_matrix
from momentopt.poly import Monomial, Polynomial, basis_size, evaluate, vectorize
from momentopt.sdp import PopProblem, SolveOptions, assemble_relaxation, solve_sdp

from conftest import load_matrix, load_pop


def criterion(num, label):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"criterion {num} ({label}): FAIL", file=sys.__stderr__)
                raise
            print(f"criterion {num} ({label}): PASS", file=sys.__stderr__)
        return wrapper
    return deco


def match_rule(rule, expected, node_tol, weight_tol):
    assert len(rule) == len(expected)
    used = set()
    for node, w in zip(rule.nodes, rule.weights):
        hit = None
        for key in expected:
            if key in used:
                continue
            if max(abs(a - b) for a, b in zip(node, key)) <= node_tol:
                hit = key
                break
        assert hit is not None, f"node {node} not among {sorted(expected)}"
        used.add(hit)
        assert abs(w - expected[hit]) <= weight_tol, f"weight {w} vs {expected[hit]}"


@criterion(1, "exact quarter-weight form")
def test_criterion_1_elprimero():
    t0 = time.perf_counter()
    y = MomentSequence.from_points([(0, 0), (1, 0), (-1, 0), (0, 1)], [0.25] * 4, 4)
    M = moment_matrix(y, 2)

    kernel = kernel_basis(M, 1e-9)
    assert len(kernel) == 2
    span = np.array([
        vectorize(Polynomial.from_terms(2, {(1, 1): 1.0}), M.basis),
        vectorize(Polynomial.from_terms(2, {(0, 2): 1.0, (0, 1): -1.0}), M.basis),
    ]).T
    proj = span @ np.linalg.pinv(span)
    for p in kernel:
        v = vectorize(p, M.basis)
        assert np.linalg.norm(proj @ v - v) <= 1e-9

    model = build_gns_model(M, 1e-9)
    assert model.dim_truncation == 3
    assert max_commutator_rank(model.op_matrices, 1e-9) == 0

    m_tilde, _ = modified_moment_matrix(M, 1e-9)
    i = M.basis.index(Monomial((2, 0)))
    assert abs(m_tilde[i, i] - 1.0 / 3.0) <= 1e-9

    rule = extract_quadrature(model, seed=0, tol=1e-9)
    r = math.sqrt(6.0) / 3.0
    match_rule(rule, {(0.0, 1.0): 0.25, (r, 0.0): 0.375, (-r, 0.0): 0.375}, 1e-9, 1e-9)

    ver = verify_quadrature(M, rule, 1e-9)
    assert ver.reconstruction_error <= 1e-9
    assert time.perf_counter() - t0 < 1.0


@criterion(2, "integer sequence rule")
def test_criterion_2_cf3():
    t0 = time.perf_counter()
    M = load_matrix("cf3")
    model = build_gns_model(M, 1e-8)
    rule = extract_quadrature(model, seed=0, tol=1e-8)
    match_rule(rule, {(0.0, 0.0): 1 / 6, (0.0, 3.0): 1 / 3, (2.0, 0.0): 1 / 2}, 1e-8, 1e-8)
    ver = verify_quadrature(M, rule, 1e-8)
    assert ver.moment_error <= 1e-8  # all moments of degree <= 3
    assert time.perf_counter() - t0 < 1.0


@criterion(3, "quartic equality problem, printed matrix")
def test_criterion_3_porfavor_matrix():
    M = load_matrix("porfavor_matrix")
    prob = load_pop("porfavor")

    m_tilde, _ = modified_moment_matrix(M, 1e-3)
    hankel, _ = is_generalized_hankel(m_tilde, M.basis, 1e-3)
    assert hankel
    assert abs(m_tilde[-1, -1] - 4.6675) <= 1e-3

    model = build_gns_model(M, 1e-3)
    assert model.rank_M == 2
    assert model.rank_A == 1
    assert not is_flat(M, 1e-3)

    rule = extract_quadrature(model, seed=0, tol=1e-3)
    assert len(rule) == 1
    node = rule.nodes[0]
    assert np.allclose(node, [0.7175, 1.4698], atol=1e-3)
    flags, _ = check_feasibility([node], prob.constraints, 1e-3)
    assert all(flags)
    assert abs(evaluate(prob.objective, node) - (-16.7389)) <= 1e-2

    # rank M exceeds rank A, so no rule can match the full-degree moments
    ver = verify_quadrature(M, rule, 1e-3)
    assert ver.full_degree_error > 1e-2


@criterion(4, "commutator rank and node-count bound")
def test_criterion_4_madrugada():
    t0 = time.perf_counter()
    M = load_matrix("madrugada")
    model = build_gns_model(M, 1e-6)
    assert model.dim_truncation == 10
    assert max_commutator_rank(model.op_matrices, 1e-6) == 4
    assert moller_bound(model, 1e-6) == 12
    hc = certify_hankel(M, 1e-6, 1e-4)
    assert hc.status == "NotHankel"
    assert time.perf_counter() - t0 < 2.0


@criterion(5, "flat printed matrix with three nodes")
def test_criterion_5_flatcase():
    M = load_matrix("flatcase")
    prob = load_pop("flatcase_problem")
    assert is_flat(M, 1e-4)
    model = build_gns_model(M, 1e-4)
    rule = extract_quadrature(model, seed=0, tol=1e-3)
    match_rule(rule, {(1.0, 2.0): 0.5759, (2.0, 2.0): 0.3105, (2.0, 3.0): 0.1137},
               2e-3, 2e-3)
    flags, _ = check_feasibility(rule.nodes, prob.constraints, 5e-3)
    assert all(flags)
    value = sum(w * evaluate(prob.objective, a) for a, w in zip(rule.nodes, rule.weights))
    assert abs(value - (-2.0)) <= 1e-2


@criterion(6, "end-to-end hierarchy with the internal solver")
def test_criterion_6_end_to_end():
    t0 = time.perf_counter()

    report = run_hierarchy(load_pop("porfavor"), RunConfig(tol_rank=1e-4))
    assert report.final_status == "OptimalCertified"
    assert report.levels[-1].k == 4
    assert abs(report.best_lower_bound - (-16.7389)) <= 1e-2

    x = Polynomial.variable(1, 0)
    for f, minimizer in ((x * x, 0.0), ((x - Polynomial.constant(1, 1.0)) ** 2, 1.0)):
        rep = run_hierarchy(PopProblem(1, f, ()))
        assert rep.final_status == "OptimalCertified"
        assert abs(rep.best_lower_bound) <= 1e-6
        assert abs(rep.final_rule.nodes[0][0] - minimizer) <= 1e-4

    rep = run_hierarchy(
        load_pop("rosenbrock"),
        RunConfig(k_max=6, tol_rank=1e-3, tol_hankel=1e-2, tol_feas=1e-3),
    )
    assert rep.final_status == "OptimalCertified"
    assert rep.levels[-1].k <= 6
    assert rep.best_lower_bound <= 1e-4
    assert np.allclose(rep.final_rule.nodes[0], [1.0, 1.0, 1.0], atol=1e-2)

    assert time.perf_counter() - t0 < 60.0


@criterion(7, "property suites")
def test_criterion_7_properties():
    rng = np.random.default_rng(2024)

    # (a) random atomic forms are flat with commuting operators
    for trial in range(200):
        n = int(rng.integers(1, 4))
        D = int(rng.integers(1, 4))
        atoms = int(rng.integers(1, basis_size(n, D - 1) + 1))
        points = rng.normal(size=(atoms, n))
        weights = rng.uniform(0.2, 1.0, size=atoms)
        weights = weights / weights.sum()
        y = MomentSequence.from_points(points, weights, 2 * D)
        M = moment_matrix(y, D)
        model = build_gns_model(M, 1e-8)
        assert model.is_flat, f"trial {trial} not flat"
        assert max_commutator_rank(model.op_matrices, 1e-8) == 0
        rule = extract_quadrature(model, seed=0, tol=1e-8)
        ver = verify_quadrature(M, rule, 1e-8)
        assert ver.reconstruction_error <= 1e-8, f"trial {trial}"
        assert abs(sum(rule.weights) - 1.0) <= 1e-8
        assert moller_bound(model, 1e-8) <= atoms

    # (b) the modified matrix does not depend on the choice of W
    for seed in range(10):
        r2 = np.random.default_rng(seed)
        points = r2.normal(size=(2, 2))
        weights = r2.uniform(0.3, 1.0, size=2)
        y = MomentSequence.from_points(points, weights, 4)
        M = moment_matrix(y, 2)
        m_tilde, W = modified_moment_matrix(M, 1e-10)
        A = M.entries[:3, :3]
        vals, vecs = np.linalg.eigh(A)
        null = vecs[:, vals < 1e-10 * max(vals[-1], 1.0)]
        if null.shape[1] == 0:
            continue
        W2 = W + null @ r2.normal(size=(null.shape[1], W.shape[1]))
        assert np.max(np.abs(W2.T @ A @ W2 - W.T @ A @ W)) <= 1e-9

    # (c) generalized-Hankel and commuting-operator verdicts agree on every
    # fixture at the tolerance matched to its precision, and on random forms
    fixture_tols = {
        "elprimero": 1e-9, "cf3": 1e-8, "madrugada": 1e-6,
        "porfavor_matrix": 1e-3, "flatcase": 1e-3,
        # the two staged matrices carry entries up to 256 and 2e5, so their
        # four printed decimals are relatively coarser than the others
        "nonconvex_k4": 1e-3, "nonconvex_k5": 3e-3,
        "nonconvex_k6": 3e-3, "nonconvex_k7": 2e-3,
        "rosenbrock_k4": 1e-3, "rosenbrock_k5": 1e-3, "rosenbrock_k6": 1e-3,
        "amigo_matrix": 1e-3,
    }
    for name, tol in fixture_tols.items():
        hc = certify_hankel(load_matrix(name), tol, tol)
        hankel = hc.status in ("Flat", "HankelNotFlat")
        commuting = hc.commutator_rank == 0
        assert hankel == commuting, (
            f"{name}: hankel={hc.status} but commutator rank {hc.commutator_rank}"
        )
    for seed in range(20):
        r3 = np.random.default_rng(100 + seed)
        atoms = int(r3.integers(1, 4))
        points = r3.normal(size=(atoms, 2))
        weights = r3.uniform(0.2, 1.0, size=atoms)
        y = MomentSequence.from_points(points, weights, 4)
        hc = certify_hankel(moment_matrix(y, 2), 1e-8, 1e-8)
        assert hc.status in ("Flat", "HankelNotFlat")
        assert hc.commutator_rank == 0

    # (d) relaxation bounds are monotone in the order on box quadratics
    x1 = Polynomial.variable(2, 0)
    x2 = Polynomial.variable(2, 1)
    one = Polynomial.constant(2, 1.0)
    box = (x1, one - x1, x2, one - x2)
    for seed in range(20):
        r4 = np.random.default_rng(500 + seed)
        c = r4.uniform(-1, 1, size=6)
        f = (c[0] * x1 * x1 + c[1] * x1 * x2 + c[2] * x2 * x2
             + c[3] * x1 + c[4] * x2 + Polynomial.constant(2, c[5]))
        # k = 2 is left out: its localizing blocks are 1x1, so an indefinite
        # objective is unbounded there and the bound is trivially -inf
        values = []
        for k in (3, 4, 5):
            sol = solve_sdp(assemble_relaxation(PopProblem(2, f, box), k),
                            SolveOptions(gap_tol=1e-9))
            assert sol.status == "Optimal", f"seed {seed}, k {k}: {sol.status}"
            values.append(sol.objective_value)
        for lo, hi in zip(values, values[1:]):
            assert hi >= lo - 1e-6, f"seed {seed}: bounds {values} not monotone"


@criterion(8, "staged behavior across printed matrices")
def test_criterion_8_nonconvex_staged():
    prob = load_pop("nonconvex")

    cert4 = certify(prob, load_matrix("nonconvex_k4"), 4, None,
                    Tolerances(1e-4, 1e-2, 1e-4))
    assert cert4.status == "GaussianRuleFoundNodesInfeasible"
    assert any(np.allclose(a, [3.0, 4.0], atol=1e-3) for a in cert4.rule.nodes)

    cert5 = certify(prob, load_matrix("nonconvex_k5"), 5, None,
                    Tolerances(1e-4, 1e-2, 1e-4))
    assert cert5.status == "GaussianRuleFoundNodesInfeasible"
    expected5 = [(0.0, 4.0), (3.0, 4.0)]
    assert len(cert5.rule) == 2
    for want in expected5:
        assert any(np.allclose(a, want, atol=2e-2) for a in cert5.rule.nodes), (
            f"node {want} missing from {cert5.rule.nodes}"
        )

    M7 = load_matrix("nonconvex_k7")
    model = build_gns_model(M7, 2e-3)
    rule = extract_quadrature(model, seed=0, tol=2e-3)
    assert len(rule) == 1
    node = rule.nodes[0]
    assert np.allclose(node, [2.3295, 3.1785], atol=1e-3)
    assert abs(evaluate(prob.objective, node) - (-5.5080)) <= 1e-2
