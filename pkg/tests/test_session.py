from __future__ import annotations

import pytest

from ctv.errors import SessionError
from ctv.fixtures import load_fixture
from ctv.session import (
    EXHAUSTED,
    NEEDS_INPUT,
    VERIFIED,
    render_transcript,
    respond,
    run_scripted,
    start,
)
from ctv.sim import search_witness


def test_pipeline_start_suggests_the_program_counter(pipeline):
    design, ann = pipeline
    state = start(design, ann)
    assert state.status == NEEDS_INPUT
    assert state.suggestion.candidate == "IF_pc"
    assert state.suggestion.weight == 1
    assert state.suggestion.counterexample == ("ID_instr",)
    assert state.suggestion.blame == ("Stall",)
    assert state.iteration == 1


def test_lookup_start_verifies_immediately(lookup):
    design, ann = lookup
    state = start(design, ann)
    assert state.status == VERIFIED
    assert state.iteration == 1
    assert state.suggestion is None


def test_mixer_start_suggests_stall(mixer):
    design, ann = mixer
    state = start(design, ann)
    assert state.status == NEEDS_INPUT
    assert state.suggestion.candidate == "stall"


def test_accepting_the_pc_verifies_in_two_iterations(pipeline):
    design, ann = pipeline
    state = start(design, ann)
    respond(state, "accept")
    assert state.status == VERIFIED
    assert state.iteration == 2
    assert state.annotations.assumptions.public == frozenset({"IF_pc"})
    assert state.annotations.assumptions.flush == frozenset(
        {"IF_inst", "ID_instr", "ID_rt", "Stall", "EX_rt"}
    )


def test_rejecting_the_pc_suggests_the_fetch_register(pipeline):
    design, ann = pipeline
    state = start(design, ann)
    respond(state, "reject")
    assert state.status == NEEDS_INPUT
    assert state.suggestion.candidate == "IF_inst"
    assert state.annotations.excluded == frozenset({"IF_pc"})


def test_mixer_accept_verifies_without_public_cond(mixer):
    design, ann = mixer
    state = start(design, ann)
    respond(state, "accept")
    assert state.status == VERIFIED
    assert "stall" in state.annotations.assumptions.public
    assert "cond" not in state.annotations.assumptions.public


def test_respond_on_terminal_state_is_an_error(lookup):
    design, ann = lookup
    state = start(design, ann)
    with pytest.raises(SessionError):
        respond(state, "accept")


def test_bad_answer_is_an_error(pipeline):
    design, ann = pipeline
    state = start(design, ann)
    with pytest.raises(SessionError):
        respond(state, "maybe")


def test_scripted_accept_reaches_verified(pipeline):
    design, ann = pipeline
    state, transcript = run_scripted(design, ann, ["accept"])
    assert state.status == VERIFIED
    assert "status: verified" in transcript


def test_scripted_empty_on_verified_design(lookup):
    design, ann = lookup
    state, transcript = run_scripted(design, ann, [])
    assert state.status == VERIFIED
    assert "script exhausted" not in transcript


def test_script_exhaustion_freezes_and_reports(pipeline):
    design, ann = pipeline
    state, transcript = run_scripted(design, ann, [])
    assert state.status == NEEDS_INPUT
    assert "script exhausted while input was needed" in transcript


def test_reject_everything_exhausts(pipeline):
    design, ann = pipeline
    state, transcript = run_scripted(design, ann, ["reject"] * 12)
    assert state.status == EXHAUSTED
    assert state.annotations.excluded  # nonempty exclusion trail
    assert "status: exhausted" in transcript


def test_progress_bounds_iterations(pipeline):
    design, ann = pipeline
    nets = len(design.flat_tables.order)
    state, _ = run_scripted(design, ann, ["reject"] * (nets + 5))
    assert state.iteration <= nets + 1


def test_each_answer_strictly_grows_a_set(pipeline):
    design, ann = pipeline
    state = start(design, ann)
    public_before = state.annotations.assumptions.public
    respond(state, "reject")
    assert state.annotations.excluded > frozenset()
    excl_before = state.annotations.excluded
    if state.status == NEEDS_INPUT:
        respond(state, "accept")
        assert state.annotations.assumptions.public > public_before
        assert state.annotations.excluded == excl_before


def test_replay_is_deterministic(pipeline):
    design, ann = pipeline
    _, first = run_scripted(design, ann, ["reject", "accept"])
    _, second = run_scripted(design, ann, ["reject", "accept"])
    assert first == second


def test_verified_sessions_are_oracle_consistent(pipeline, mixer):
    for design, ann in (pipeline, mixer):
        state, _ = run_scripted(design, ann, ["accept"] * 8)
        assert state.status == VERIFIED
        witness = search_witness(
            design,
            state.annotations.sources,
            state.annotations.sinks,
            state.annotations.assumptions,
            bound=8,
        )
        assert witness is None


def test_transcript_mentions_every_round(pipeline):
    design, ann = pipeline
    state, transcript = run_scripted(design, ann, ["accept"])
    assert "iteration 1" in transcript and "iteration 2" in transcript
    assert "suggestion: mark 'IF_pc' as PUBLIC (weight 1)" in transcript
    assert render_transcript(state) == transcript
