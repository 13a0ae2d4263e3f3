from __future__ import annotations

import pytest

from ctv.depgraph import (
    DepGraph,
    build_depgraph,
    counterexample,
    dump_graph,
    reduce_graph,
)
from ctv.elaborate import elaborate
from ctv.errors import CtvError
from ctv.fixtures import load_fixture
from ctv.parser import parse_program
from ctv.verify import infer, infer_all_summaries

PIPELINE_DATA = {
    ("IF_pc", "IF_inst"),
    ("IF_inst", "ID_instr"),
    ("ID_instr", "ID_rt"),
    ("ID_rt", "Stall"),
    ("ID_rt", "EX_rt"),
    ("EX_rt", "Stall"),
}
PIPELINE_CTRL = {("Stall", "ID_instr"), ("Stall", "EX_rt")}


def test_pipeline_graph_is_exact(pipeline):
    design, _ = pipeline
    g = build_depgraph(design)
    assert g.nodes == frozenset(
        {"IF_pc", "IF_inst", "ID_instr", "ID_rt", "Stall", "EX_rt"}
    )
    assert g.data_edges == frozenset(PIPELINE_DATA)
    assert g.ctrl_edges == frozenset(PIPELINE_CTRL)


def test_factored_pipeline_splices_to_the_same_graph():
    design, _ = load_fixture("pipeline_mod", inline=False)
    summaries = infer_all_summaries(design)
    spliced = build_depgraph(design, modular=True, summaries=summaries)
    flat_design, _ = load_fixture("pipeline")
    flat = build_depgraph(flat_design)
    assert spliced.nodes == flat.nodes
    assert spliced.data_edges == flat.data_edges
    assert spliced.ctrl_edges == flat.ctrl_edges


def test_modular_graph_requires_summaries():
    design, _ = load_fixture("sbox4", inline=False)
    with pytest.raises(CtvError, match="summar"):
        build_depgraph(design, modular=True, summaries=None)


def test_single_net_graph():
    design = elaborate(parse_program("module one(x);\n  input x;\nendmodule\n"))
    g = build_depgraph(design)
    assert g.nodes == frozenset({"x"})
    assert not g.edges


def test_reduce_matches_documented_reduction(pipeline):
    design, ann = pipeline
    artifact = infer(design, ann)
    g = build_depgraph(design)
    rg = reduce_graph(g, artifact.vartime_map, ann.sinks, apply_reach=False)
    assert rg.nodes == frozenset({"ID_instr", "ID_rt", "Stall", "EX_rt"})
    assert ("Stall", "ID_instr") not in rg.edges  # violates the drop order
    assert rg.edges == frozenset(
        {
            ("ID_instr", "ID_rt"),
            ("ID_rt", "Stall"),
            ("ID_rt", "EX_rt"),
            ("EX_rt", "Stall"),
            ("Stall", "EX_rt"),
        }
    )


def test_reach_condition_leaves_only_the_sink(pipeline):
    design, ann = pipeline
    artifact = infer(design, ann)
    g = build_depgraph(design)
    rg = reduce_graph(g, artifact.vartime_map, ann.sinks, apply_reach=True)
    assert rg.nodes == frozenset({"ID_instr"})
    assert not rg.edges


def test_empty_drop_map_empties_the_graph(pipeline):
    design, ann = pipeline
    g = build_depgraph(design)
    rg = reduce_graph(g, {}, ann.sinks, apply_reach=False)
    assert not rg.nodes and not rg.edges
    assert counterexample(rg) is None


def test_pipeline_counterexample(pipeline):
    design, ann = pipeline
    artifact = infer(design, ann)
    g = build_depgraph(design)
    cex = counterexample(reduce_graph(g, artifact.vartime_map, ann.sinks, True))
    assert cex is not None
    assert cex.nets == frozenset({"ID_instr"})
    assert not cex.scc_fallback
    assert cex.justifications["ID_instr"] == ("ID_instr",)


def test_mixer_counterexample(mixer):
    design, ann = mixer
    artifact = infer(design, ann)
    g = build_depgraph(design)
    rg = reduce_graph(g, artifact.vartime_map, ann.sinks, True)
    cex = counterexample(rg)
    assert cex.nets == frozenset({"r3"})
    assert cex.justifications["r3"] == ("r3", "out")


def test_equal_round_cycle_falls_back_to_scc():
    g = DepGraph(
        nodes=frozenset({"a", "b", "o"}),
        data_edges=frozenset({("a", "b"), ("b", "a"), ("a", "o")}),
        ctrl_edges=frozenset(),
    )
    rg = reduce_graph(g, {"a": 1, "b": 1, "o": 2}, frozenset({"o"}), True)
    cex = counterexample(rg)
    assert cex.scc_fallback
    assert cex.nets == frozenset({"a", "b"})


def test_reduce_is_idempotent(pipeline, mixer):
    for design, ann in (pipeline, mixer):
        artifact = infer(design, ann)
        g = build_depgraph(design)
        once = reduce_graph(g, artifact.vartime_map, ann.sinks, True)
        twice = reduce_graph(once, artifact.vartime_map, ann.sinks, True)
        assert (once.nodes, once.data_edges, once.ctrl_edges) == (
            twice.nodes,
            twice.data_edges,
            twice.ctrl_edges,
        )


def _reaches_sink(start_candidates, edges, sinks) -> bool:
    seen = set(start_candidates)
    frontier = list(seen)
    while frontier:
        v = frontier.pop()
        for x, w in edges:
            if x == v and w not in seen:
                seen.add(w)
                frontier.append(w)
    return bool(seen & sinks)


def test_reduction_is_maximal(pipeline, mixer):
    """Re-adding anything that was deleted violates an applied condition."""
    for design, ann in (pipeline, mixer):
        artifact = infer(design, ann)
        g = build_depgraph(design)
        rg = reduce_graph(g, artifact.vartime_map, ann.sinks, True)
        vt = artifact.vartime_map
        for node in g.nodes - rg.nodes:
            if node not in vt:
                continue  # condition 1 bars the node outright
            # condition 3: re-add the node with its order-respecting edges
            # into the surviving graph; it must still fail to reach a sink
            assert node not in ann.sinks
            succ = {
                w
                for v, w in g.edges
                if v == node and w in rg.nodes and vt[node] <= vt[w]
            }
            assert not _reaches_sink(succ, rg.edges, ann.sinks)
        for v, w in g.edges - rg.edges:
            if v in rg.nodes and w in rg.nodes:
                assert vt[v] > vt[w]  # condition 2 bars the edge


def test_counterexample_is_earliest(pipeline, mixer):
    for design, ann in (pipeline, mixer):
        artifact = infer(design, ann)
        g = build_depgraph(design)
        rg = reduce_graph(g, artifact.vartime_map, ann.sinks, True)
        cex = counterexample(rg)
        earliest = min(artifact.vartime_map[v] for v in rg.nodes)
        for net in cex.nets:
            assert artifact.vartime_map[net] == earliest


def test_modular_and_flat_counterexamples_agree():
    modular_design, ann = load_fixture("pipeline_mod", inline=False)
    flat_design, flat_ann = load_fixture("pipeline")
    m_art = infer(modular_design, ann, modular=True)
    f_art = infer(flat_design, flat_ann)
    mg = build_depgraph(modular_design, True, m_art.summaries)
    fg = build_depgraph(flat_design)
    m_cex = counterexample(reduce_graph(mg, m_art.vartime_map, ann.sinks, True))
    f_cex = counterexample(reduce_graph(fg, f_art.vartime_map, flat_ann.sinks, True))
    assert m_cex.nets == f_cex.nets == frozenset({"ID_instr"})


def test_graph_dump_golden(pipeline):
    from conftest import golden

    design, ann = pipeline
    artifact = infer(design, ann)
    g = build_depgraph(design)
    out = dump_graph(g, artifact.vartime_map, design.tables.order)
    rg = reduce_graph(g, artifact.vartime_map, ann.sinks, True)
    out += "reduced\n" + dump_graph(rg, artifact.vartime_map, design.tables.order)
    assert out == golden("graph_pipeline.txt")
