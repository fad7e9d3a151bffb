import json

import pytest
from fastapi.testclient import TestClient

from svkbest.service import create_app

TWO_POINT_CSV = "x1,x2,y\n-1,0,b\n1,0,a\n"


@pytest.fixture
def client():
    return TestClient(create_app())


def _upload(client, content=TWO_POINT_CSV, **kw):
    body = {"format": "csv", "content": content, "label_column": "y",
            "positive_label": "a"}
    body.update(kw)
    r = client.post("/api/datasets", json=body)
    assert r.status_code == 200, r.text
    return r.json()


def _session(client, dataset_id, **kw):
    body = {"dataset_id": dataset_id, "c": 1.0, "kernel": {"kind": "linear"}}
    body.update(kw)
    r = client.post("/api/sessions", json=body)
    assert r.status_code == 200, r.text
    return r.json()["session_id"]


class TestDatasets:
    def test_upload_echo(self, client):
        info = _upload(client, name="demo")
        assert info["n"] == 2 and info["d"] == 2
        assert info["feature_names"] == ["x1", "x2"]

    def test_listing(self, client):
        _upload(client)
        _upload(client)
        r = client.get("/api/datasets")
        assert [d["dataset_id"] for d in r.json()["datasets"]] == ["d1", "d2"]

    def test_bad_csv_shaped_error(self, client):
        r = client.post("/api/datasets", json={
            "format": "csv", "content": "a,y\n1,p\n2,q\n3,r\n",
            "label_column": "y", "positive_label": "p"})
        assert r.status_code == 400
        err = r.json()["error"]
        assert err["code"] == "data_error" and "binary" in err["message"]

    def test_validation_error_shape(self, client):
        r = client.post("/api/datasets", json={"format": "nope", "content": ""})
        assert r.status_code == 422
        assert "error" in r.json()


class TestSessions:
    def test_next_stream_and_exhaustion(self, client):
        did = _upload(client)["dataset_id"]
        sid = _session(client, did)
        first = client.get(f"/api/sessions/{sid}/next")
        assert first.status_code == 200
        assert first.json()["rank"] == 1
        assert first.json()["objective"] == pytest.approx(0.5)
        second = client.get(f"/api/sessions/{sid}/next")
        assert second.json()["rank"] == 2
        assert second.json()["support"] == []
        for _ in range(3):
            assert client.get(f"/api/sessions/{sid}/next").status_code == 204

    def test_session_info(self, client):
        did = _upload(client)["dataset_id"]
        sid = _session(client, did)
        client.get(f"/api/sessions/{sid}/next")
        info = client.get(f"/api/sessions/{sid}").json()
        assert info["models_emitted"] == 1
        assert info["exhausted"] is False
        assert info["stats"]["solver_calls"] >= 1

    def test_models_listing_matches_next_payloads(self, client):
        did = _upload(client)["dataset_id"]
        sid = _session(client, did)
        streamed = []
        while True:
            r = client.get(f"/api/sessions/{sid}/next")
            if r.status_code == 204:
                break
            streamed.append(r.json())
        listed = client.get(f"/api/sessions/{sid}/models").json()["models"]
        assert listed == streamed

    def test_model_detail_alpha_and_predictions(self, client):
        did = _upload(client)["dataset_id"]
        sid = _session(client, did, test_dataset_id=did)
        client.get(f"/api/sessions/{sid}/next")
        detail = client.get(f"/api/sessions/{sid}/models/1").json()
        assert detail["alpha"] == pytest.approx([0.5, 0.5])
        assert detail["train_predictions"] == [-1, 1]
        assert detail["test_predictions"] == [-1, 1]
        assert detail["record"]["metrics"]["misclass"] == 0.0

    def test_detail_unknown_rank(self, client):
        did = _upload(client)["dataset_id"]
        sid = _session(client, did)
        r = client.get(f"/api/sessions/{sid}/models/7")
        assert r.status_code == 404

    def test_unknown_ids(self, client):
        assert client.get("/api/sessions/s99/next").status_code == 404
        r = client.post("/api/sessions", json={"dataset_id": "d99", "c": 1.0})
        assert r.status_code == 404
        assert r.json()["error"]["code"] == "not_found"

    def test_sensitive_requires_test(self, client):
        did = _upload(client)["dataset_id"]
        r = client.post("/api/sessions", json={
            "dataset_id": did, "c": 1.0, "sensitive": "x2"})
        assert r.status_code == 400

    def test_selection_round_trip(self, client):
        did = _upload(client)["dataset_id"]
        sid = _session(client, did)
        client.get(f"/api/sessions/{sid}/next")
        client.get(f"/api/sessions/{sid}/next")
        r = client.post(f"/api/sessions/{sid}/selection", json={"ranks": [2, 1, 2]})
        assert r.json() == {"ranks": [1, 2]}
        assert client.get(f"/api/sessions/{sid}/selection").json() == {"ranks": [1, 2]}

    def test_selection_rejects_unemitted_rank(self, client):
        did = _upload(client)["dataset_id"]
        sid = _session(client, did)
        r = client.post(f"/api/sessions/{sid}/selection", json={"ranks": [1]})
        assert r.status_code == 400


class TestMetricsThroughApi:
    def test_dp_present_with_sensitive(self, client):
        csv = "x,z,y\n-2,1,b\n2,-1,a\n-1,1,b\n1,-1,a\n"
        did = _upload(client, content=csv)["dataset_id"]
        sid = _session(client, did, test_dataset_id=did, sensitive="z")
        rec = client.get(f"/api/sessions/{sid}/next").json()
        assert rec["metrics"]["dp"] is not None
        assert 0.0 <= rec["metrics"]["dp"] <= 1.0

    def test_exclude_sensitive_drops_column(self, client):
        csv = "x,z,y\n-2,1,b\n2,-1,a\n-1,1,b\n1,-1,a\n"
        did = _upload(client, content=csv)["dataset_id"]
        sid = _session(client, did, test_dataset_id=did, sensitive="z",
                       exclude_sensitive=True)
        detail_rec = client.get(f"/api/sessions/{sid}/next").json()
        assert detail_rec["metrics"]["dp"] is not None


class TestPersistence:
    def test_restart_resumes_identical_stream(self, tmp_path):
        data_dir = tmp_path / "state"
        with TestClient(create_app(data_dir=data_dir)) as client:
            did = _upload(client)["dataset_id"]
            sid = _session(client, did, test_dataset_id=did)
            first = client.get(f"/api/sessions/{sid}/next").json()

        with TestClient(create_app()) as fresh_client:
            did2 = _upload(fresh_client)["dataset_id"]
            sid2 = _session(fresh_client, did2, test_dataset_id=did2)
            expected = [fresh_client.get(f"/api/sessions/{sid2}/next").json()
                        for _ in range(2)]

        with TestClient(create_app(data_dir=data_dir)) as revived:
            listed = revived.get(f"/api/sessions/{sid}/models").json()["models"]
            assert listed == [first]
            cont = revived.get(f"/api/sessions/{sid}/next").json()
            assert json.dumps(cont, sort_keys=True) == json.dumps(expected[1], sort_keys=True)
            assert revived.get(f"/api/sessions/{sid}/next").status_code == 204

    def test_datasets_survive_restart(self, tmp_path):
        data_dir = tmp_path / "state"
        with TestClient(create_app(data_dir=data_dir)) as client:
            _upload(client, name="kept")
        with TestClient(create_app(data_dir=data_dir)) as revived:
            listing = revived.get("/api/datasets").json()["datasets"]
            assert listing[0]["name"] == "kept"
