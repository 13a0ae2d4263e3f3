from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from ctv.fixtures import fixture_annotation_text, fixture_source
from ctv.service import create_app


@pytest.fixture()
def client():
    return TestClient(create_app())


def _open_session(client, name="pipeline", modular=False):
    response = client.post(
        "/sessions",
        json={
            "design": fixture_source(name),
            "annotations": fixture_annotation_text(name),
            "modular": modular,
        },
    )
    assert response.status_code == 200
    return response.json()


def test_create_and_fetch_session(client):
    created = _open_session(client)
    assert created["schema_version"] == 1
    assert created["status"] == "needs-input"
    assert created["suggestion"]["candidate"] == "IF_pc"
    fetched = client.get(f"/sessions/{created['id']}").json()
    assert fetched == created


def test_accept_flow_flips_to_verified(client):
    created = _open_session(client)
    sid = created["id"]
    answered = client.post(f"/sessions/{sid}/response", json={"answer": "accept"})
    assert answered.status_code == 200
    body = answered.json()
    assert body["status"] == "verified"
    assert body["iteration"] == 2
    assert body["assumptions"]["public"] == ["IF_pc"]


def test_reject_flow_offers_next_candidate(client):
    sid = _open_session(client)["id"]
    body = client.post(f"/sessions/{sid}/response", json={"answer": "reject"}).json()
    assert body["status"] == "needs-input"
    assert body["suggestion"]["candidate"] == "IF_inst"
    assert body["excluded"] == ["IF_pc"]


def test_graph_payload_counts(client):
    sid = _open_session(client)["id"]
    body = client.get(f"/sessions/{sid}/graph").json()
    assert body["schema_version"] == 1
    graph = body["graph"]
    assert len(graph["nodes"]) == 6
    assert len(graph["edges"]) == 8
    ctrl = [e for e in graph["edges"] if e["kind"] == "ctrl"]
    assert {"src": "Stall", "dst": "ID_instr", "kind": "ctrl"} in ctrl
    assert body["counterexample"]["nets"] == ["ID_instr"]
    assert body["blame"] == ["Stall"]
    reduced = body["reduced"]
    assert [n["name"] for n in reduced["nodes"]] == ["ID_instr"]


def test_graph_rounds_follow_the_artifact(client):
    sid = _open_session(client)["id"]
    graph = client.get(f"/sessions/{sid}/graph").json()["graph"]
    rounds = {n["name"]: n["round"] for n in graph["nodes"]}
    assert rounds["IF_pc"] is None and rounds["ID_instr"] == 1
    cts = {n["name"]: n["ct"] for n in graph["nodes"]}
    assert cts["IF_pc"] and not cts["Stall"]


def test_trace_payload_reports_violation(client):
    sid = _open_session(client)["id"]
    body = client.get(f"/sessions/{sid}/trace").json()
    assert body["schema_version"] == 1
    assert body["trace"] is not None
    assert body["violation"]["sink"] == "ID_instr"


def test_verified_session_has_no_trace(client):
    created = _open_session(client, "lookup")
    body = client.get(f"/sessions/{created['id']}/trace").json()
    assert body["trace"] is None and body["violation"] is None


def test_unknown_session_is_404(client):
    assert client.get("/sessions/zzz").status_code == 404


def test_bad_answer_is_400(client):
    sid = _open_session(client)["id"]
    assert (
        client.post(f"/sessions/{sid}/response", json={"answer": "maybe"}).status_code
        == 400
    )


def test_answer_on_terminal_session_is_400(client):
    sid = _open_session(client, "lookup")["id"]
    assert (
        client.post(f"/sessions/{sid}/response", json={"answer": "accept"}).status_code
        == 400
    )


def test_bad_design_is_400(client):
    response = client.post(
        "/sessions", json={"design": "module broken(", "annotations": "sinks: x\n"}
    )
    assert response.status_code == 400


def test_modular_session(client):
    created = _open_session(client, "pipeline_mod", modular=True)
    assert created["suggestion"]["candidate"] == "IF_pc"
    sid = created["id"]
    body = client.post(f"/sessions/{sid}/response", json={"answer": "accept"}).json()
    assert body["status"] == "verified"
