"""Acceptance suite: one test per top-level criterion, one PASS line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
report.  Every tolerance (set equality, ordering, size ratios, wall-clock
budgets) is pinned here.
"""

from __future__ import annotations

import random
import time

from conftest import golden
from ctv.ast import Annotations, AssumptionSet
from ctv.cli import main
from ctv.depgraph import build_depgraph, counterexample, reduce_graph
from ctv.fixtures import FIXTURES, load_fixture
from ctv.horn import export_horn
from ctv.ilp import INFEASIBLE, blame, build_ilp, solve_ilp
from ctv.session import VERIFIED, respond, run_scripted, start
from ctv.sim import check_ct_on_trace, run_pair, search_witness
from ctv.verify import infer, infer_summary

from test_ilp import brute_force_minimum, random_problem
from test_properties import permuted_design


def _report(name: str) -> None:
    print(f"PASS {name}")


def test_fig2_trace_reproduction(lookup):
    t0 = time.monotonic()
    design, ann = lookup
    trace = run_pair(
        design, ann.sources, ann.sinks, t=1, n=3,
        inputs_l=[{"in": 0x00}] * 3, inputs_r=[{"in": 0xFF}] * 3,
    )
    c1, c2 = trace.configs[1], trace.configs[2]
    assert (c2.store_l["out"], c2.store_r["out"]) == (0x63, 0x2C)
    # liveness-bit table: inputs live exactly at the initial cycle, outputs
    # exactly one cycle later, identically in both runs
    expected = {
        1: {"in": True, "out": False},
        2: {"in": False, "out": True},
    }
    for cycle, bits in expected.items():
        cfg = trace.configs[cycle]
        for net, bit in bits.items():
            assert cfg.live_l[net] == bit and cfg.live_r[net] == bit
    assert check_ct_on_trace(trace, ann.sinks).constant_time
    assert time.monotonic() - t0 < 1.0
    _report("fig2-trace-reproduction (bit-exact, <1s)")


def test_lookup_verification(lookup):
    t0 = time.monotonic()
    design, ann = lookup
    artifact = infer(design, ann)
    assert artifact.verified and artifact.vartime_map == {}
    summary = infer_summary(design, "lookup")
    assert summary.render() == ["ct(in) => ct(out)"]
    # exhaustive 65,536-pair sweep of both 8-bit inputs at the first cycle
    assert search_witness(design, ann.sources, ann.sinks, bound=3, budget=65536) is None
    assert time.monotonic() - t0 < 5.0
    _report("lookup-verification (verified, summary, 65536-pair sweep, <5s)")


def test_pipeline_localization_chain(pipeline):
    t0 = time.monotonic()
    design, ann = pipeline
    artifact = infer(design, ann)
    assert not artifact.verified
    vt = artifact.vartime_map
    assert set(vt) == {"ID_instr", "ID_rt", "Stall", "EX_rt"}
    assert vt["ID_instr"] < vt["ID_rt"] < vt["Stall"] == vt["EX_rt"]
    assert vt["ID_rt"] < vt["EX_rt"]
    assert "IF_pc" not in vt and "IF_inst" not in vt

    g = build_depgraph(design)
    reduced = reduce_graph(g, vt, ann.sinks, apply_reach=False)
    assert reduced.nodes == frozenset({"ID_instr", "ID_rt", "Stall", "EX_rt"})
    assert reduced.edges == frozenset(
        {
            ("ID_instr", "ID_rt"),
            ("ID_rt", "Stall"),
            ("ID_rt", "EX_rt"),
            ("EX_rt", "Stall"),
            ("Stall", "EX_rt"),
        }
    )
    cex = counterexample(reduce_graph(g, vt, ann.sinks, apply_reach=True))
    assert cex.nets == frozenset({"ID_instr"})
    blamed = blame(g, cex)
    assert blamed.nets == frozenset({"Stall"})

    problem = build_ilp(artifact, g, blamed, frozenset(), ann.sources)
    preds = problem.pred_map
    assert preds["IF_inst"] == ("IF_pc",)  # m_IF_inst + p_IF_pc >= p_IF_inst
    assert preds["ID_instr"] == ("IF_inst", "Stall")  # averaged two-pred form
    solution = solve_ilp(problem)
    assert solution.marked == ("IF_pc",) and solution.objective == 1

    state = start(design, ann)
    assert state.suggestion.candidate == "IF_pc"
    respond(state, "accept")
    assert state.status == VERIFIED
    assert time.monotonic() - t0 < 5.0
    _report("pipeline-localization-chain (rounds, reduction, cex, blame, ilp, accept, <5s)")


def test_appendix_balanced_example(mixer):
    t0 = time.monotonic()
    design, ann = mixer
    artifact = infer(design, ann)
    g = build_depgraph(design)
    cex = counterexample(reduce_graph(g, artifact.vartime_map, ann.sinks, True))
    assert cex.nets == frozenset({"r3"})
    state = start(design, ann)
    assert state.suggestion.candidate == "stall"
    respond(state, "accept")
    assert state.status == VERIFIED
    assert "stall" in state.annotations.assumptions.public
    assert "cond" not in state.annotations.assumptions.public
    assert time.monotonic() - t0 < 5.0
    _report("appendix-balanced-example (cex r3, suggest stall, cond stays secret, <5s)")


def test_modularity_scaling():
    design, ann = load_fixture("sbox4", inline=False)
    modular_doc = export_horn(design, ann, modular=True)
    inlined_doc = export_horn(design, ann, modular=False)
    byte_ratio = len(modular_doc.text) / len(inlined_doc.text)
    assert byte_ratio <= 0.4, f"horn export only {1 - byte_ratio:.0%} smaller"

    from ctv.verify import infer_all_summaries

    summaries = infer_all_summaries(design)
    modular_graph = build_depgraph(design, modular=True, summaries=summaries)
    flat_graph = build_depgraph(design, modular=False)
    m_size = len(modular_graph.nodes) + len(modular_graph.edges)
    f_size = len(flat_graph.nodes) + len(flat_graph.edges)
    assert m_size / f_size <= 0.4, f"graph only {1 - m_size / f_size:.0%} smaller"

    for name in FIXTURES:
        fixture_design, fixture_ann = load_fixture(name, inline=False)
        modular_verdict = infer(fixture_design, fixture_ann, modular=True).verified
        inline_verdict = infer(fixture_design, fixture_ann, modular=False).verified
        assert modular_verdict == inline_verdict, name
    _report(
        "modularity (horn bytes and graph size >=60% smaller; verdicts agree on all fixtures)"
    )


def test_ilp_oracle_equivalence():
    t0 = time.monotonic()
    rng = random.Random(1693)
    agreements = 0
    for _ in range(200):
        problem = random_problem(rng, max_nodes=15)
        got = solve_ilp(problem)
        want = brute_force_minimum(problem)
        if want is None:
            assert got == INFEASIBLE
        else:
            assert got.feasible and got.objective == want
        agreements += 1
    elapsed = time.monotonic() - t0
    assert agreements == 200
    assert elapsed < 60.0
    _report(f"ilp-oracle-equivalence (200/200 agree, {elapsed:.1f}s < 60s)")


def test_property_suites(pipeline, mixer):
    # reduce maximality and idempotence
    design, ann = pipeline
    artifact = infer(design, ann)
    g = build_depgraph(design)
    rg = reduce_graph(g, artifact.vartime_map, ann.sinks, True)
    rg2 = reduce_graph(rg, artifact.vartime_map, ann.sinks, True)
    assert (rg.nodes, rg.data_edges, rg.ctrl_edges) == (rg2.nodes, rg2.data_edges, rg2.ctrl_edges)
    for v, w in g.edges - rg.edges:
        if v in rg.nodes and w in rg.nodes:
            assert artifact.vartime_map[v] > artifact.vartime_map[w]

    # fixpoint confluence under declaration-order permutation
    for seed in (1, 2, 3):
        assert infer(permuted_design("pipeline", seed), ann).vartime_map == artifact.vartime_map

    # assumption monotonicity
    grown = infer(
        design,
        Annotations(
            sources=ann.sources,
            sinks=ann.sinks,
            assumptions=AssumptionSet(flush=frozenset({"EX_rt"}), public=frozenset({"Stall"})),
        ),
    )
    assert artifact.final_state.ct_set <= grown.final_state.ct_set
    assert artifact.final_state.pub_set <= grown.final_state.pub_set

    # inline/modular trace bisimulation over 32 cycles
    from ctv.elaborate import elaborate
    from ctv.fixtures import fixture_program

    program = fixture_program("pipeline_mod")
    inline_design = elaborate(program, inline=True)
    modular_design = elaborate(program, inline=False)
    streams = [{"IF_pc": (3 * i + 1) % 4} for i in range(32)]
    right = [{"IF_pc": (i * i) % 4} for i in range(32)]
    ta = run_pair(inline_design, ann.sources, ann.sinks, 2, 32, streams, right)
    tb = run_pair(modular_design, ann.sources, ann.sinks, 2, 32, streams, right)
    for ca, cb in zip(ta.configs, tb.configs):
        assert ca.store_l == cb.store_l and ca.live_r == cb.live_r

    # session replay determinism
    da, aa = mixer
    r1 = run_scripted(da, aa, ["accept"])[1]
    r2 = run_scripted(da, aa, ["accept"])[1]
    assert r1 == r2
    _report("property-suites (maximality, idempotence, confluence, monotonicity, bisimulation, determinism)")


def test_scripted_sessions_reproduce_golden_transcripts(capsys, tmp_path):
    cases = [
        ("pipeline", "accept\n", "replay_pipeline_accept.txt", 0),
        ("pipeline", "reject\n" * 8, "replay_pipeline_reject_all.txt", 1),
        ("lookup", "", "replay_lookup_empty.txt", 0),
        ("mixer", "accept\n", "replay_mixer_accept.txt", 0),
    ]
    for fixture, script, goldfile, want_code in cases:
        script_file = tmp_path / f"{goldfile}.script"
        script_file.write_text(script)
        code = main(["replay", fixture, fixture, "--script", str(script_file)])
        out = capsys.readouterr().out
        assert out == golden(goldfile), goldfile
        assert code == want_code
    with capsys.disabled():
        _report("scripted-sessions (byte-identical golden transcripts, no web ui)")
