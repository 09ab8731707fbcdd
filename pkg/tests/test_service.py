import numpy as np
import pytest
from fastapi.testclient import TestClient

from lionshopf.service.app import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def mixed_tree_payload():
    return {"parent": [-1, 0], "label": [1, 1], "h0": [0], "H": [[1]]}


def linear_rows(slope, d=1):
    return [[0.0] + [0.0] * d, [1.0] + [slope] * d]


class TestHealth:
    def test_health(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json()["status"] == "ok"


class TestEnumerate:
    def test_small_catalog(self, client):
        resp = client.post("/enumerate", json={"gamma": 2, "d": 1})
        assert resp.status_code == 200
        data = resp.json()
        by_nodes = {}
        for e in data["entries"]:
            by_nodes.setdefault(e["nodes"], []).append(e)
        assert len(by_nodes[1]) == 2
        trees = [e for e in by_nodes[2]
                 if e["forest"]["parent"].count(-1) == 1]
        assert len(trees) == 4

    def test_below_threshold_only_unit(self, client):
        resp = client.post("/enumerate",
                           json={"gamma": 0.5, "alpha": 1.0, "beta": 1.0,
                                 "d": 1})
        data = resp.json()
        assert data["count"] == 1
        assert data["entries"][0]["nodes"] == 0

    def test_deterministic(self, client):
        a = client.post("/enumerate", json={"gamma": 2, "d": 1}).json()
        b = client.post("/enumerate", json={"gamma": 2, "d": 1}).json()
        assert a == b

    def test_unbounded_rejected(self, client):
        resp = client.post("/enumerate", json={"gamma": 1, "alpha": 0, "d": 1})
        assert resp.status_code == 422


class TestHopfVerify:
    def test_default_passes(self, client):
        resp = client.post("/hopf/verify",
                           json={"max_nodes": 3, "d": 2, "samples": 6})
        assert resp.status_code == 200
        data = resp.json()
        assert data["passed"]
        names = {i["name"] for i in data["identities"]}
        assert "coassociativity" in names and "hopf-inverse" in names

    def test_negative_control_names_identity(self, client):
        resp = client.post("/hopf/verify",
                           json={"max_nodes": 2, "d": 1, "samples": 2,
                                 "tamper": "coassociativity"})
        data = resp.json()
        assert not data["passed"]
        failing = [i["name"] for i in data["identities"] if not i["ok"]]
        assert failing == ["coassociativity"]

    def test_schema_stable(self, client):
        a = client.post("/hopf/verify",
                        json={"max_nodes": 2, "d": 1, "samples": 2}).json()
        b = client.post("/hopf/verify",
                        json={"max_nodes": 2, "d": 1, "samples": 2}).json()
        assert a == b


class TestLift:
    def test_first_level_is_increment(self, client):
        payload = {
            "forest": {"parent": [-1], "label": [1], "h0": [0], "H": []},
            "tagged_path": {"rows": linear_rows(2.0)},
            "block_paths": [],
            "s": 0.25, "t": 0.75,
        }
        resp = client.post("/lift", json=payload)
        assert resp.status_code == 200
        data = resp.json()
        assert data["shape"] == [1]
        assert abs(data["tensor"][0] - 1.0) < 1e-12

    def test_block_count_checked(self, client):
        payload = {
            "forest": mixed_tree_payload(),
            "tagged_path": {"rows": linear_rows(1.0)},
            "block_paths": [],
        }
        resp = client.post("/lift", json=payload)
        assert resp.status_code == 422

    def test_invalid_forest_rejected(self, client):
        payload = {
            "forest": {"parent": [-1, 0], "label": [1, 1], "h0": [1],
                       "H": [[0]]},
            "tagged_path": {"rows": linear_rows(1.0)},
            "block_paths": [{"rows": linear_rows(1.0)}],
        }
        resp = client.post("/lift", json=payload)
        assert resp.status_code == 422


class TestLln:
    def test_two_atom_experiment(self, client):
        payload = {
            "distribution": {"kind": "two_atom", "vector": [1.0]},
            "n_grid": [2, 4],
            "replications": 4,
            "seed": 1,
            "grid_level": 2,
        }
        resp = client.post("/lln", json=payload)
        assert resp.status_code == 200
        data = resp.json()
        assert [row["n"] for row in data["rows"]] == [2, 4]

    def test_seed_reproducible(self, client):
        payload = {
            "distribution": {"kind": "two_atom", "vector": [1.0]},
            "n_grid": [2, 4], "replications": 3, "seed": 7, "grid_level": 2,
        }
        a = client.post("/lln", json=payload).json()
        b = client.post("/lln", json=payload).json()
        assert a == b

    def test_unknown_distribution(self, client):
        resp = client.post("/lln", json={
            "distribution": {"kind": "mystery"}, "n_grid": [2],
            "replications": 2})
        assert resp.status_code == 422


class TestMetric:
    def test_identical_inputs_zero(self, client):
        atoms = [{"rows": linear_rows(c)} for c in (1.0, -1.0, 0.5)]
        payload = {
            "atoms_v": atoms,
            "atoms_w": atoms,
            "tagged_path": {"rows": linear_rows(0.0)},
            "trees": [{"parent": [-1], "label": [1], "h0": [], "H": [[0]]}],
            "grid_level": 2,
        }
        resp = client.post("/metric", json=payload)
        assert resp.status_code == 200
        data = resp.json()
        assert data["value"] == 0.0

    def test_mismatched_atoms_rejected(self, client):
        payload = {
            "atoms_v": [{"rows": linear_rows(1.0)}],
            "atoms_w": [{"rows": linear_rows(1.0)},
                        {"rows": linear_rows(2.0)}],
            "tagged_path": {"rows": linear_rows(0.0)},
            "trees": [{"parent": [-1], "label": [1], "h0": [], "H": [[0]]}],
        }
        resp = client.post("/metric", json=payload)
        assert resp.status_code == 422


class TestAtomDistribution:
    def test_lln_with_finite_support_paths(self, client):
        payload = {
            "distribution": {
                "kind": "atoms",
                "paths": [[[0.0, 0.0], [1.0, 1.0]],
                          [[0.0, 0.0], [1.0, -1.0]]],
                "probs": [0.5, 0.5],
            },
            "n_grid": [2, 4], "replications": 3, "seed": 5, "grid_level": 2,
        }
        resp = client.post("/lln", json=payload)
        assert resp.status_code == 200
        assert len(resp.json()["rows"]) == 2
