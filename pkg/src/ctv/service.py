"""Local JSON-over-HTTP session service for the web dashboard.

Sessions are held in memory and keyed by id; every response carries a
``schema_version`` field the client checks before rendering.  The service
has no verification logic of its own: it parses, starts sessions, forwards
accept/reject answers, and serializes the session's graphs and traces.
"""

from __future__ import annotations

import uuid
from typing import Any

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .depgraph import DepGraph
from .elaborate import elaborate, validate_annotations
from .errors import CtvError
from .parser import parse_annotations, parse_program
from .session import SessionState, respond, start
from .sim import check_ct_on_trace, dump_trace

SCHEMA_VERSION = 1


class NewSession(BaseModel):
    design: str
    annotations: str
    modular: bool = False


class Answer(BaseModel):
    answer: str


def _graph_payload(g: DepGraph, rounds: dict[str, int], order: tuple[str, ...]) -> dict[str, Any]:
    names = [n for n in order if n in g.nodes]
    names += sorted(g.nodes - set(names))
    return {
        "nodes": [
            {"name": n, "round": rounds.get(n), "ct": n not in rounds} for n in names
        ],
        "edges": [
            {"src": v, "dst": w, "kind": "data"} for v, w in sorted(g.data_edges)
        ]
        + [{"src": v, "dst": w, "kind": "ctrl"} for v, w in sorted(g.ctrl_edges)],
    }


def _session_payload(sid: str, state: SessionState) -> dict[str, Any]:
    suggestion = None
    if state.suggestion is not None:
        suggestion = {
            "candidate": state.suggestion.candidate,
            "weight": state.suggestion.weight,
            "counterexample": list(state.suggestion.counterexample),
            "blame": list(state.suggestion.blame),
            "rationale": {k: list(v) for k, v in state.suggestion.rationale.items()},
        }
    return {
        "schema_version": SCHEMA_VERSION,
        "id": sid,
        "status": state.status,
        "iteration": state.iteration,
        "suggestion": suggestion,
        "assumptions": {
            "public": sorted(state.annotations.assumptions.public),
            "flush": sorted(state.annotations.assumptions.flush),
        },
        "excluded": sorted(state.annotations.excluded),
        "design": state.design.name,
    }


def create_app(ui_dir: str | None = None) -> FastAPI:
    """Build the service; with ``ui_dir`` the dashboard is served at ``/``."""
    app = FastAPI(title="ctv session service")
    sessions: dict[str, SessionState] = {}

    def get_session(sid: str) -> SessionState:
        if sid not in sessions:
            raise HTTPException(status_code=404, detail=f"no session {sid}")
        return sessions[sid]

    @app.post("/sessions")
    def new_session(body: NewSession) -> dict[str, Any]:
        try:
            design = elaborate(parse_program(body.design), inline=not body.modular)
            ann = validate_annotations(design, parse_annotations(body.annotations))
            state = start(design, ann, modular=body.modular)
        except CtvError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        sid = uuid.uuid4().hex[:12]
        sessions[sid] = state
        return _session_payload(sid, state)

    @app.get("/sessions/{sid}")
    def get_state(sid: str) -> dict[str, Any]:
        return _session_payload(sid, get_session(sid))

    @app.post("/sessions/{sid}/response")
    def answer(sid: str, body: Answer) -> dict[str, Any]:
        state = get_session(sid)
        try:
            respond(state, body.answer)
        except CtvError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return _session_payload(sid, state)

    @app.get("/sessions/{sid}/graph")
    def graph(sid: str) -> dict[str, Any]:
        state = get_session(sid)
        payload: dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "id": sid,
            "graph": None,
            "reduced": None,
            "counterexample": None,
        }
        order = state.design.tables.order
        if state.artifact is None or state.graph is None:
            return payload
        rounds = state.artifact.vartime_map
        payload["graph"] = _graph_payload(state.graph, rounds, order)
        if state.reduced is not None:
            payload["reduced"] = _graph_payload(state.reduced, rounds, order)
        if state.cex is not None:
            payload["counterexample"] = {
                "nets": sorted(state.cex.nets),
                "scc_fallback": state.cex.scc_fallback,
                "justifications": {
                    k: list(v) for k, v in state.cex.justifications.items()
                },
            }
        if state.blame_set is not None:
            payload["blame"] = sorted(state.blame_set.nets)
        return payload

    @app.get("/sessions/{sid}/trace")
    def trace(sid: str) -> dict[str, Any]:
        state = get_session(sid)
        payload: dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "id": sid,
            "trace": None,
            "violation": None,
        }
        if state.witness is not None:
            payload["trace"] = dump_trace(state.witness, state.design)
            verdict = check_ct_on_trace(state.witness, state.annotations.sinks)
            if not verdict.constant_time:
                payload["violation"] = {
                    "sink": verdict.sink,
                    "cycle": verdict.cycle,
                    "live_l": verdict.live_l,
                    "live_r": verdict.live_r,
                }
        return payload

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
