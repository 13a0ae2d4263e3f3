"""Interactive verification loop: verify, localize, suggest, accept/reject.

A session owns a design plus the evolving annotation state.  Each round runs
the prover; on failure it reduces the dependency graph against the
variable-time map, extracts the counterexample and blame set, solves the
assumption-synthesis ILP against the secret map, and surfaces the cheapest
marked net as a suggestion.  Accepting a suggestion moves it into the public
set (and pulls in the decoded flush set); rejecting adds it to the exclusion
set and re-solves the ILP without re-running the prover, which is what makes
the reject path fast.  Sessions therefore terminate: every answer strictly
grows either the public or the excluded set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ast import Annotations, AssumptionSet
from .depgraph import (
    Counterexample,
    DepGraph,
    ReducedGraph,
    build_depgraph,
    counterexample,
    reduce_graph,
)
from .elaborate import ElaboratedDesign, validate_annotations
from .errors import SessionError
from .ilp import BlameSet, IlpProblem, IlpSolution, blame, build_ilp, decode, solve_ilp
from .sim import PairTrace, search_witness
from .verify import ProofArtifact, infer

NEEDS_INPUT = "needs-input"
VERIFIED = "verified"
VARIABLE_TIME = "variable-time"
EXHAUSTED = "exhausted"


@dataclass
class Suggestion:
    candidate: str
    weight: int
    counterexample: tuple[str, ...]
    blame: tuple[str, ...]
    rationale: dict[str, tuple[str, ...]]  # counterexample net -> path to sink


@dataclass
class TranscriptEntry:
    iteration: int
    verdict: str
    vartime: tuple[tuple[str, int], ...] = ()
    counterexample: tuple[str, ...] = ()
    blame: tuple[str, ...] = ()
    suggestion: str | None = None
    weight: int | None = None
    response: str | None = None
    artifact_digest: str = ""


@dataclass
class SessionState:
    design: ElaboratedDesign
    annotations: Annotations
    modular: bool = False
    witness_bound: int = 8
    witness_budget: int = 2048
    iteration: int = 0
    status: str = NEEDS_INPUT
    suggestion: Suggestion | None = None
    artifact: ProofArtifact | None = None
    graph: DepGraph | None = None
    reduced: ReducedGraph | None = None
    cex: Counterexample | None = None
    blame_set: BlameSet | None = None
    problem: IlpProblem | None = None
    solution: IlpSolution | None = None
    witness: PairTrace | None = None
    history: list[TranscriptEntry] = field(default_factory=list)

    @property
    def terminal(self) -> bool:
        return self.status in (VERIFIED, VARIABLE_TIME, EXHAUSTED)


def _pick_candidate(solution: IlpSolution, weights: dict[str, int]) -> tuple[str, int]:
    marked = sorted(solution.marked, key=lambda n: (weights[n], n))
    best = marked[0]
    return best, weights[best]


def _synthesize(state: SessionState) -> None:
    """ILP stage of a round; assumes artifact, graph, cex and blame are set."""
    assert state.artifact is not None and state.graph is not None
    assert state.cex is not None and state.blame_set is not None
    entry = state.history[-1]
    entry.counterexample = tuple(sorted(state.cex.nets))
    entry.blame = tuple(sorted(state.blame_set.nets))
    if not state.blame_set.nets:
        state.status = VARIABLE_TIME  # data-flow-only failure, nothing to mark
        state.suggestion = None
        return
    if not (state.blame_set.nets - state.annotations.excluded):
        state.status = EXHAUSTED
        state.suggestion = None
        return
    state.problem = build_ilp(
        state.artifact,
        state.graph,
        state.blame_set,
        no=state.annotations.excluded,
        src=state.annotations.sources,
    )
    state.solution = solve_ilp(state.problem)
    if not state.solution.feasible or not state.solution.marked:
        state.status = EXHAUSTED
        state.suggestion = None
        return
    candidate, weight = _pick_candidate(state.solution, state.problem.weight_map)
    state.suggestion = Suggestion(
        candidate=candidate,
        weight=weight,
        counterexample=tuple(sorted(state.cex.nets)),
        blame=tuple(sorted(state.blame_set.nets)),
        rationale=dict(state.cex.justifications),
    )
    state.status = NEEDS_INPUT
    entry.suggestion = candidate
    entry.weight = weight


def _run_round(state: SessionState) -> None:
    state.iteration += 1
    ann = state.annotations
    state.artifact = infer(state.design, ann, modular=state.modular)
    entry = TranscriptEntry(
        iteration=state.iteration,
        verdict=VERIFIED if state.artifact.verified else VARIABLE_TIME,
        vartime=tuple(sorted(state.artifact.vartime_map.items(), key=lambda kv: (kv[1], kv[0]))),
        artifact_digest=state.artifact.digest(),
    )
    state.history.append(entry)
    if state.artifact.verified:
        state.status = VERIFIED
        state.suggestion = None
        state.witness = None
        return
    summaries = state.artifact.summaries if state.modular else None
    state.graph = build_depgraph(state.design, state.modular, summaries)
    state.reduced = reduce_graph(
        state.graph, state.artifact.vartime_map, ann.sinks, apply_reach=True
    )
    state.cex = counterexample(state.reduced)
    if state.cex is None:
        state.status = VARIABLE_TIME
        state.suggestion = None
        return
    state.blame_set = blame(state.graph, state.cex)
    state.witness = search_witness(
        state.design,
        ann.sources,
        ann.sinks,
        ann.assumptions,
        bound=state.witness_bound,
        budget=state.witness_budget,
    )
    _synthesize(state)


def start(
    design: ElaboratedDesign,
    annotations: Annotations,
    modular: bool = False,
) -> SessionState:
    """Validate inputs and run the first verify/localize/synthesize round."""
    validate_annotations(design, annotations)
    state = SessionState(design=design, annotations=annotations, modular=modular)
    _run_round(state)
    return state


def respond(state: SessionState, answer: str) -> SessionState:
    """Apply an accept/reject answer to the current suggestion and re-run.

    Accept marks the candidate public (plus the decoded flush set) and
    reruns the prover; reject excludes the candidate and only re-solves the
    ILP, reusing the current proof artifact.
    """
    if answer not in ("accept", "reject"):
        raise SessionError(f"answer must be 'accept' or 'reject', not {answer!r}")
    if state.terminal or state.suggestion is None:
        raise SessionError(f"session is {state.status}; no suggestion to answer")
    state.history[-1].response = answer
    candidate = state.suggestion.candidate
    ann = state.annotations
    if answer == "accept":
        assert state.solution is not None and state.problem is not None
        decoded = decode(state.solution, frozenset(state.problem.nets))
        new_public = ann.assumptions.public | {candidate}
        new_flush = (ann.assumptions.flush | decoded.flush) - new_public
        state.annotations = Annotations(
            sources=ann.sources,
            sinks=ann.sinks,
            assumptions=AssumptionSet(flush=new_flush, public=new_public),
            excluded=ann.excluded,
        )
        _run_round(state)
        return state
    state.annotations = Annotations(
        sources=ann.sources,
        sinks=ann.sinks,
        assumptions=ann.assumptions,
        excluded=ann.excluded | {candidate},
    )
    # reject path: the proof artifact is unchanged, only the ILP moves
    state.iteration += 1
    assert state.artifact is not None
    entry = TranscriptEntry(
        iteration=state.iteration,
        verdict=VARIABLE_TIME,
        vartime=tuple(sorted(state.artifact.vartime_map.items(), key=lambda kv: (kv[1], kv[0]))),
        artifact_digest=state.artifact.digest(),
    )
    state.history.append(entry)
    _synthesize(state)
    return state


def run_scripted(
    design: ElaboratedDesign,
    annotations: Annotations,
    script: list[str],
    modular: bool = False,
) -> tuple[SessionState, str]:
    """Deterministic headless replay of a list of accept/reject decisions.

    Stops early on a terminal status; if the script runs out while input is
    still needed the status freezes at needs-input and the transcript says
    so.  Identical inputs produce byte-identical transcripts.
    """
    state = start(design, annotations, modular=modular)
    used = 0
    for answer in script:
        if state.terminal:
            break
        respond(state, answer)
        used += 1
    return state, render_transcript(state, script_exhausted=(not state.terminal and used == len(script)))


def render_transcript(state: SessionState, script_exhausted: bool = False) -> str:
    lines = [
        "transcript v1",
        f"design: {state.design.name}",
        f"modular: {'true' if state.modular else 'false'}",
    ]
    for entry in state.history:
        lines.append(f"iteration {entry.iteration}")
        lines.append(f"  verdict: {entry.verdict}")
        if entry.verdict != VERIFIED:
            vt = " ".join(f"{n}={r}" for n, r in entry.vartime)
            lines.append(f"  vartime: {vt}")
            lines.append(f"  counterexample: {' '.join(entry.counterexample)}")
            lines.append(f"  blame: {' '.join(entry.blame)}")
        if entry.suggestion is not None:
            lines.append(
                f"  suggestion: mark '{entry.suggestion}' as PUBLIC (weight {entry.weight})"
            )
        if entry.response is not None:
            lines.append(f"  response: {entry.response}")
    if script_exhausted:
        lines.append("script exhausted while input was needed")
    lines.append(f"status: {state.status}")
    lines.append(f"iterations: {state.iteration}")
    ann = state.annotations
    lines.append(("public: " + " ".join(sorted(ann.assumptions.public))).rstrip())
    lines.append(("flush: " + " ".join(sorted(ann.assumptions.flush))).rstrip())
    lines.append(("excluded: " + " ".join(sorted(ann.excluded))).rstrip())
    return "\n".join(lines) + "\n"
