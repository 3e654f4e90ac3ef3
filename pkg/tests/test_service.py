"""Endpoint tests for the HTTP facade."""

import pytest
from fastapi.testclient import TestClient

from nbbdlab import __version__
from nbbdlab.service import create_app
from nbbdlab.zeros import load_bundled_table, write_zero_table


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app(), raise_server_exceptions=False) as c:
        yield c


def test_health_and_version(client):
    assert client.get("/healthz").json() == {"status": "ok"}
    assert client.get("/version").json() == {"version": __version__}


def test_constants_endpoint(client):
    r = client.post("/v1/constants", json={"empty_table": True})
    assert r.status_code == 200
    body = r.json()
    assert body["subcommand"] == "constants"
    assert body["outputs"]["table_sums_skipped"] is True
    names = [row["quantity"] for row in body["outputs"]["rows"]]
    assert names == ["euler_gamma", "log_4pi", "nbbd_constant"]


def test_gram_endpoint_monotone_and_deterministic(client):
    first = client.post("/v1/gram", json={"n_max": 5})
    assert first.status_code == 200
    d2 = [row["d2"] for row in first.json()["outputs"]["rows"]]
    assert all(b <= a + 1.0e-15 for a, b in zip(d2, d2[1:]))
    second = client.post("/v1/gram", json={"n_max": 5})
    # identical request body, byte-identical response body
    assert second.content == first.content


def test_criterion_endpoint_real_zeta(client):
    r = client.post("/v1/criterion",
                    json={"n_values": [2, 4], "target": "real-zeta"})
    assert r.status_code == 200
    rows = r.json()["outputs"]["rows"]
    assert [row["N"] for row in rows] == [2, 4]
    for row in rows:
        assert set(row) == {"N", "value", "value_log_n", "tail_bound"}
        assert row["value"] > 0.0


def test_lemma23_endpoint(client):
    r = client.post("/v1/lemma23",
                    json={"n": 50, "s_values": ["0.45+3j"],
                          "heights": [500.0, 2000.0]})
    assert r.status_code == 200
    rows = r.json()["outputs"]["rows"]
    assert len(rows) == 2
    assert all(row["rel_error"] < 1.0e-4 for row in rows)


def test_residues_endpoint_modes(client):
    pair = client.post("/v1/residues",
                       json={"n": 100, "s": "0.45+3j", "mode": "pair"})
    quad = client.post("/v1/residues", json={"n": 100, "s": "0.45+3j"})
    assert len(pair.json()["outputs"]["rows"]) == 2
    assert len(quad.json()["outputs"]["rows"]) == 4


def test_diagnostics_endpoint(client):
    r = client.post("/v1/diagnostics",
                    json={"t_grid": [100.0, 1000.0],
                          "lindelof_windows": 4, "lindelof_samples": 16})
    assert r.status_code == 200
    out = r.json()["outputs"]
    assert out["rows"][0]["fitted_exponent"] is None
    assert isinstance(out["lindelof_slope"], float)


def test_zeros_ingest_endpoint(client, tmp_path):
    src = tmp_path / "head.txt"
    write_zero_table(src, load_bundled_table().gammas()[:25])
    r = client.post("/v1/zeros-ingest", json={"zeros": str(src)})
    assert r.status_code == 200
    rows = {row["quantity"]: row["value"]
            for row in r.json()["outputs"]["rows"]}
    assert rows["count"] == 25.0


def test_domain_errors_map_to_400(client):
    r = client.post("/v1/criterion",
                    json={"n_values": [5], "target": "model"})
    assert r.status_code == 400
    assert r.json()["error"] == "ValueError"

    r = client.post("/v1/residues",
                    json={"n": 100, "s": "0.75+10j", "mode": "pair"})
    assert r.status_code == 400
    # the engineered-zero collision surfaces with its exception class
    assert r.json()["error"] == "CollisionError"

    r = client.post("/v1/zeros-ingest", json={"zeros": "/no/such/file"})
    assert r.status_code == 400
    assert r.json()["error"] == "FileNotFoundError"

    # a degenerate fit grid (too few points) is a domain error too
    r = client.post("/v1/fit", json={"n_grid": [100, 200, 300, 400]})
    assert r.status_code == 400
    assert r.json()["error"] == "ValueError"


def test_malformed_body_maps_to_422(client):
    assert client.post("/v1/gram", json={"n_max": "many"}).status_code == 422
    assert client.post("/v1/gram", json={}).status_code == 422
    assert client.post("/v1/residues",
                       json={"n": 100, "s": "1+1j",
                             "mode": "triplet"}).status_code == 422
