"""Constant-time verification toolkit for a small synthesizable Verilog subset.

The toolkit proves that the latency of a tracked computation flowing from
designated source nets to sink nets is independent of data, or else explains
the failure: it localizes the earliest nets to turn variable-time, blames the
branch conditions responsible, and synthesizes a minimal set of secrecy
assumptions (nets to assume public or flushed) that would make the proof go
through.  An interactive session loop (CLI and local HTTP service) lets the
user accept or reject each suggested assumption.

Layering, bottom to top:

    ast / parser / elaborate   MiniVerilog IR, concrete syntax, flattening
    sim                        pair-run simulator with liveness-bit tracking
    depgraph                   data/control dependency graphs and reductions
    verify                     round-based weakening prover, module summaries
    horn                       Horn-clause rendering of the proof obligations
    ilp                        blame sets and 0/1-ILP assumption synthesis
    session                    interactive verify/localize/suggest loop
    cli / service              command line and JSON-over-HTTP front doors
"""

from __future__ import annotations

from .ast import (
    Annotations,
    AssumptionSet,
    Expression,
    ModuleDef,
    Process,
    Program,
    Statement,
)
from .errors import (
    AnnotationError,
    CtvError,
    ElaborationError,
    ParseError,
    SessionError,
    StaleArtifactError,
)
from .parser import parse_annotations, parse_program, pretty_print
from .elaborate import ElaboratedDesign, elaborate, validate_annotations
from .sim import (
    PairConfiguration,
    PairTrace,
    Verdict,
    check_ct_on_trace,
    run_pair,
    search_witness,
    step,
)
from .depgraph import (
    Counterexample,
    DepGraph,
    ReducedGraph,
    build_depgraph,
    counterexample,
    reduce_graph,
)
from .verify import (
    ModuleSummary,
    PredicateState,
    ProofArtifact,
    color_equivalence,
    infer,
    infer_summary,
)
from .horn import HornDocument, export_horn
from .ilp import (
    BlameSet,
    IlpProblem,
    IlpSolution,
    blame,
    build_ilp,
    decode,
    solve_ilp,
)
from .session import SessionState, Suggestion, respond, run_scripted, start

__version__ = "0.1.0"

__all__ = [
    "Annotations",
    "AssumptionSet",
    "AnnotationError",
    "BlameSet",
    "Counterexample",
    "CtvError",
    "DepGraph",
    "ElaboratedDesign",
    "ElaborationError",
    "Expression",
    "HornDocument",
    "IlpProblem",
    "IlpSolution",
    "ModuleDef",
    "ModuleSummary",
    "PairConfiguration",
    "PairTrace",
    "ParseError",
    "PredicateState",
    "Process",
    "Program",
    "ProofArtifact",
    "ReducedGraph",
    "SessionError",
    "SessionState",
    "StaleArtifactError",
    "Statement",
    "Suggestion",
    "Verdict",
    "blame",
    "build_depgraph",
    "build_ilp",
    "check_ct_on_trace",
    "color_equivalence",
    "counterexample",
    "decode",
    "elaborate",
    "export_horn",
    "infer",
    "infer_summary",
    "parse_annotations",
    "parse_program",
    "pretty_print",
    "reduce_graph",
    "respond",
    "run_pair",
    "run_scripted",
    "search_witness",
    "solve_ilp",
    "start",
    "step",
    "validate_annotations",
]
