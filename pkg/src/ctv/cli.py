"""Command-line front end.

Subcommands mirror the analysis pipeline: ``check`` runs the prover,
``suggest`` adds one localization/synthesis round, ``interactive`` drives
the accept/reject loop on a terminal, ``replay`` re-runs a recorded decision
script headlessly, ``export-horn`` and ``graph`` dump the solver-facing
artifacts, and ``serve`` starts the local JSON service.

Exit codes: 0 verified, 1 not verified (variable-time or exhausted),
2 usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fixtures
from .depgraph import build_depgraph, dump_graph, reduce_graph
from .elaborate import elaborate, validate_annotations
from .errors import CtvError
from .horn import export_horn
from .parser import parse_annotations, parse_program
from .session import (
    EXHAUSTED,
    NEEDS_INPUT,
    VARIABLE_TIME,
    VERIFIED,
    render_transcript,
    respond,
    run_scripted,
    start,
)
from .sim import dump_trace
from .verify import infer


def _read_design(arg: str) -> str:
    path = Path(arg)
    if path.exists():
        return path.read_text()
    if arg in fixtures.FIXTURES:
        return fixtures.fixture_source(arg)
    raise CtvError(f"no such design file or bundled fixture: {arg}")


def _read_annotations(arg: str) -> str:
    path = Path(arg)
    if path.exists():
        return path.read_text()
    if arg in fixtures.FIXTURES:
        return fixtures.fixture_annotation_text(arg)
    raise CtvError(f"no such annotation file or bundled fixture: {arg}")


def _load(args) -> tuple:
    design = elaborate(parse_program(_read_design(args.design)), inline=not args.modular)
    ann = validate_annotations(design, parse_annotations(_read_annotations(args.annotations)))
    return design, ann


def _status_exit(status: str) -> int:
    return 0 if status == VERIFIED else 1


def _cmd_check(args) -> int:
    design, ann = _load(args)
    artifact = infer(design, ann, modular=args.modular)
    if args.json:
        payload = {
            "verified": artifact.verified,
            "failed_sinks": list(artifact.failed_sinks),
            "vartime": dict(sorted(artifact.vartime_map.items())),
            "secret": dict(sorted(artifact.secret_map.items())),
            "ct": sorted(artifact.final_state.ct_set),
            "public": sorted(artifact.final_state.pub_set),
            "summaries": {
                name: summary.render() for name, summary in sorted(artifact.summaries.items())
            },
        }
        print(json.dumps(payload, indent=2))
    else:
        print("verified" if artifact.verified else "variable-time")
        if not artifact.verified:
            vt = " ".join(
                f"{n}={r}"
                for n, r in sorted(artifact.vartime_map.items(), key=lambda kv: (kv[1], kv[0]))
            )
            print(f"vartime: {vt}")
            print(f"failed sinks: {' '.join(artifact.failed_sinks)}")
    return 0 if artifact.verified else 1


def _cmd_suggest(args) -> int:
    design, ann = _load(args)
    state = start(design, ann, modular=args.modular)
    if state.status == VERIFIED:
        print("verified; no suggestion needed")
    elif state.suggestion is not None:
        s = state.suggestion
        print(f"counterexample: {' '.join(s.counterexample)}")
        print(f"blame: {' '.join(s.blame)}")
        print(f"suggestion: mark '{s.candidate}' as PUBLIC (weight {s.weight})")
    else:
        print(f"no suggestion: {state.status}")
    return _status_exit(state.status)


def _cmd_interactive(args) -> int:
    design, ann = _load(args)
    state = start(design, ann, modular=args.modular)
    while state.status == NEEDS_INPUT and state.suggestion is not None:
        answer = input(f"> Mark '{state.suggestion.candidate}' as PUBLIC? [Y/n] ").strip().lower()
        respond(state, "reject" if answer in ("n", "no") else "accept")
    if state.status == VERIFIED:
        print("verified")
    elif state.status == EXHAUSTED:
        print("exhausted: every candidate assumption was rejected")
    else:
        print("variable-time")
    print(render_transcript(state), end="")
    return _status_exit(state.status)


def _cmd_replay(args) -> int:
    design, ann = _load(args)
    script = [
        line.strip()
        for line in Path(args.script).read_text().splitlines()
        if line.strip() and not line.strip().startswith("#")
    ]
    norm = []
    for line in script:
        if line.lower() in ("accept", "y", "yes"):
            norm.append("accept")
        elif line.lower() in ("reject", "n", "no"):
            norm.append("reject")
        else:
            raise CtvError(f"bad script line {line!r}: want accept/reject")
    state, transcript = run_scripted(design, ann, norm, modular=args.modular)
    sys.stdout.write(transcript)
    return _status_exit(state.status)


def _cmd_export_horn(args) -> int:
    design, ann = _load(args)
    doc = export_horn(design, ann, modular=args.modular)
    if args.output:
        Path(args.output).write_text(doc.text)
    else:
        sys.stdout.write(doc.text)
    return 0


def _cmd_graph(args) -> int:
    design, ann = _load(args)
    artifact = infer(design, ann, modular=args.modular)
    summaries = artifact.summaries if args.modular else None
    g = build_depgraph(design, args.modular, summaries)
    out = dump_graph(g, artifact.vartime_map, design.tables.order)
    if args.reduced:
        rg = reduce_graph(g, artifact.vartime_map, ann.sinks, apply_reach=True)
        out += "reduced\n"
        out += dump_graph(rg, artifact.vartime_map, design.tables.order)
    if args.output:
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)
    return 0


def _cmd_trace(args) -> int:
    design, ann = _load(args)
    state = start(design, ann, modular=args.modular)
    if state.witness is None:
        print("no witness trace found")
        return _status_exit(state.status)
    sys.stdout.write(dump_trace(state.witness, design))
    return _status_exit(state.status)


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(
        create_app(ui_dir=args.ui), host=args.host, port=args.port, log_level="warning"
    )
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctv", description="constant-time verification for a Verilog subset"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, annotated=True):
        p.add_argument("design", help="design file (.v) or bundled fixture name")
        if annotated:
            p.add_argument("annotations", help="annotation file or bundled fixture name")
        group = p.add_mutually_exclusive_group()
        group.add_argument(
            "--modular", action="store_true", help="analyze with module summaries"
        )
        group.add_argument(
            "--inline", action="store_false", dest="modular", help="inline all instances (default)"
        )

    p = sub.add_parser("check", help="run the prover once")
    common(p)
    p.add_argument("--json", action="store_true", help="machine-readable artifact")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("suggest", help="one round: verdict plus suggested assumption")
    common(p)
    p.set_defaults(fn=_cmd_suggest)

    p = sub.add_parser("interactive", help="terminal accept/reject loop")
    common(p)
    p.set_defaults(fn=_cmd_interactive)

    p = sub.add_parser("replay", help="headless replay of a decision script")
    common(p)
    p.add_argument("--script", required=True, help="file with accept/reject lines")
    p.set_defaults(fn=_cmd_replay)

    p = sub.add_parser("export-horn", help="dump the Horn-clause obligations")
    common(p)
    p.add_argument("-o", "--output", help="write to file instead of stdout")
    p.set_defaults(fn=_cmd_export_horn)

    p = sub.add_parser("graph", help="dump dependency (and reduced) graphs")
    common(p)
    p.add_argument("--reduced", action="store_true", help="append the reduced graph")
    p.add_argument("-o", "--output", help="write to file instead of stdout")
    p.set_defaults(fn=_cmd_graph)

    p = sub.add_parser("trace", help="print a violation witness trace if one exists")
    common(p)
    p.set_defaults(fn=_cmd_trace)

    p = sub.add_parser("serve", help="start the local JSON session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8736)
    p.add_argument("--ui", help="directory with the built dashboard to serve at /")
    p.set_defaults(fn=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CtvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
