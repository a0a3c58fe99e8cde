import pytest
from fastapi.testclient import TestClient

from momentopt.service import app
from momentopt.serialize import load_json

from conftest import fixture_path

client = TestClient(app)


def test_health():
    res = client.get("/health")
    assert res.status_code == 200
    assert res.json() == {"status": "ok"}


def test_solve_endpoint_minx2():
    problem = load_json(fixture_path("minx2"))
    res = client.post("/solve", json={"problem": problem})
    assert res.status_code == 200
    report = res.json()
    assert report["status"] == "OptimalCertified"
    assert report["value"] == pytest.approx(0.0, abs=1e-6)
    assert report["certificate"]["nodes"][0] == pytest.approx([0.0], abs=1e-4)


def test_bound_endpoint_madrugada():
    matrix = load_json(fixture_path("madrugada"))
    res = client.post("/bound", json={"matrix": matrix})
    assert res.status_code == 200
    assert res.json() == {"dim_T": 10, "max_commutator_rank": 4, "moller_bound": 12}


def test_extract_endpoint_elprimero():
    matrix = load_json(fixture_path("elprimero"))
    res = client.post("/extract", json={
        "matrix": matrix,
        "options": {"tol_rank": 1e-8, "tol_hankel": 1e-8},
    })
    assert res.status_code == 200
    cert = res.json()
    assert cert["hankel_status"] in ("Flat", "HankelNotFlat")
    assert cert["dim_T"] == 3
    assert cert["max_commutator_rank"] == 0


def test_relax_endpoint_order_validation():
    problem = load_json(fixture_path("porfavor"))
    res = client.post("/relax", json={"problem": problem, "order": 3})
    assert res.status_code == 400
    assert "degree" in res.json()["detail"]


def test_malformed_request_rejected():
    res = client.post("/bound", json={"matrix": {"n": 2, "order": 1}})
    assert res.status_code == 422
    res = client.post("/bound", json={"matrix": {"n": 2, "order": 1, "entries": [1.0, 0.0, 0.0]}})
    assert res.status_code == 400
