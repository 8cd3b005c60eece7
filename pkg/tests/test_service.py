import json

import pytest
from fastapi.testclient import TestClient

from qseven.quartic import _seeded_units
from qseven.service import app
from qseven.sweeps import RunConfig, render, run, serialize_record


@pytest.fixture
def client():
    with TestClient(app) as c:
        yield c


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["version"] == "0.1.0"


def test_suites_listing(client):
    body = client.get("/suites").json()
    assert body["suites"] == ["units", "classgroups", "hasse", "iwasawa", "lseries"]
    assert "7mod8" in body["residues"]


def test_verify_small_sweep(client):
    req = {"q_min": 1, "q_max": 30, "residue": "7mod16", "suites": ["classgroups", "hasse"]}
    resp = client.post("/verify", json=req)
    assert resp.status_code == 200
    body = resp.json()
    assert body["exit_code"] == 0
    assert body["counts"] == {"ok": 2, "skip": 0, "fail": 0}
    assert [r["q"] for r in body["records"]] == [7, 23]
    assert body["records"][0]["results"]["hasse"]["two_part"] == 4


def test_verify_matches_direct_run(client):
    req = {"q_max": 60, "residue": "7mod8", "suites": ["lseries"]}
    via_http = client.post("/verify", json=req).json()["records"]
    cfg = RunConfig(q_max=60, residue_class="7mod8", suites=("lseries",))
    direct = [serialize_record(r) for r in run(cfg)]
    assert render(via_http, "json") == render(direct, "json")


def test_verify_rejects_bad_residue(client):
    resp = client.post("/verify", json={"residue": "3mod4"})
    assert resp.status_code == 422


def test_verify_rejects_inverted_range(client):
    resp = client.post("/verify", json={"q_min": 100, "q_max": 10})
    assert resp.status_code == 422


def test_verify_rejects_unknown_suite(client):
    resp = client.post("/verify", json={"suites": ["units", "zeta"]})
    assert resp.status_code == 422


def test_unit_endpoint(client):
    body = client.get("/unit/23").json()
    assert body["q"] == 23
    assert body["certified"] is True
    assert all(isinstance(c, str) for c in body["coordinates"])
    assert body["regulator"] == pytest.approx(2.960835787670822)


@pytest.mark.parametrize("q", [4, 9, 13, 17])
def test_unit_rejects_bad_q(client, q):
    assert client.get(f"/unit/{q}").status_code == 422


def test_unit_endpoint_populates_cache(client, tmp_path):
    path = str(tmp_path / "units.jsonl")
    try:
        first = client.get("/unit/7", params={"cache": path}).json()
        assert len(open(path).read().splitlines()) == 1
        second = client.get("/unit/7", params={"cache": path}).json()
        assert first == second
        assert len(open(path).read().splitlines()) == 1
        rec = json.loads(open(path).readline())
        assert rec["q"] == 7
    finally:
        _seeded_units.pop(7, None)
