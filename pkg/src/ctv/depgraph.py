"""Dependency graphs, drop-order reductions, and counterexample extraction.

The dependency graph has an edge ``v -> w`` when ``v`` influences ``w``:
a *data* edge when ``v`` appears in a right-hand side assigned to ``w``, a
*control* edge when ``v`` appears in a branch condition governing an
assignment to ``w``.  Reducing the graph against a drop-order map (rounds at
which nets lost a property; absent means the property was proven) keeps the
largest subgraph in which every node was dropped, every edge respects the
drop order, and (optionally) every node still reaches a sink.  The nets left
without predecessors are the earliest causes and form the counterexample.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import networkx as nx

from .elaborate import ElaboratedDesign, ModuleTables
from .errors import CtvError
from .summaries import ModuleSummary


@dataclass(frozen=True)
class DepGraph:
    nodes: frozenset[str]
    data_edges: frozenset[tuple[str, str]]
    ctrl_edges: frozenset[tuple[str, str]]

    @property
    def edges(self) -> frozenset[tuple[str, str]]:
        return self.data_edges | self.ctrl_edges

    def predecessors(self, net: str) -> frozenset[str]:
        return frozenset(v for v, w in self.edges if w == net)

    def successors(self, net: str) -> frozenset[str]:
        return frozenset(w for v, w in self.edges if v == net)


@dataclass(frozen=True)
class ReducedGraph(DepGraph):
    drop_map: tuple[tuple[str, int], ...] = ()
    conditions: tuple[int, ...] = (1, 2, 3)
    sinks: frozenset[str] = frozenset()

    @property
    def drop_rounds(self) -> dict[str, int]:
        return dict(self.drop_map)


@dataclass(frozen=True)
class Counterexample:
    """Predecessor-free nets of a reduced graph, with display paths.

    ``justifications`` maps each net to a shortest path to the nearest sink
    (ties broken by name).  ``scc_fallback`` is set when the reduced graph
    had no predecessor-free node and whole source components are reported.
    """

    nets: frozenset[str]
    justifications: dict[str, tuple[str, ...]] = field(default_factory=dict)
    scc_fallback: bool = False


def build_depgraph(
    design: ElaboratedDesign,
    modular: bool = False,
    summaries: dict[str, ModuleSummary] | None = None,
) -> DepGraph:
    """Dependency graph of the flat design, or of the top module with child
    instances spliced in as their summary graphs.

    A summary splices as direct edges from the nets bound to input ports onto
    the net bound to the output port: control edges for inputs the summary
    requires public, data edges for inputs it only requires constant-time.
    """
    tables = design.top_tables if modular else design.flat_tables
    return graph_from_tables(tables, summaries if modular else None)


def graph_from_tables(
    tables: ModuleTables, summaries: dict[str, ModuleSummary] | None
) -> DepGraph:
    nodes = frozenset(tables.order)
    data: set[tuple[str, str]] = set()
    ctrl: set[tuple[str, str]] = set()
    for src, dst, kind in tables.all_dep_edges():
        (data if kind == "data" else ctrl).add((src, dst))
    for net, idrv in sorted(tables.instance_drivers.items()):
        if summaries is None:
            raise CtvError(f"net {net!r} is instance-driven; summaries required")
        summary = summaries.get(idrv.module)
        if summary is None or idrv.port not in summary.clauses:
            raise CtvError(f"missing summary for module {idrv.module!r}")
        clause = summary.clauses[idrv.port]
        binding = dict(idrv.input_bindings)
        for port in clause.ct_inputs:
            kind_set = ctrl if port in clause.pub_inputs else data
            for name in sorted(binding[port].reads()):
                kind_set.add((name, net))
    return DepGraph(nodes, frozenset(data), frozenset(ctrl))


def reduce_graph(
    g: DepGraph,
    drop_map: dict[str, int],
    sinks: frozenset[str],
    apply_reach: bool = True,
) -> ReducedGraph:
    """Largest subgraph satisfying the reduction conditions.

    1. every node appears in ``drop_map`` (nodes that kept the property go);
    2. every edge ``(v, w)`` has ``drop_map[v] <= drop_map[w]``;
    3. when ``apply_reach``, every node reaches some sink within the subgraph.
    """
    nodes = {v for v in g.nodes if v in drop_map}
    data = {(v, w) for v, w in g.data_edges if v in nodes and w in nodes}
    ctrl = {(v, w) for v, w in g.ctrl_edges if v in nodes and w in nodes}
    data = {(v, w) for v, w in data if drop_map[v] <= drop_map[w]}
    ctrl = {(v, w) for v, w in ctrl if drop_map[v] <= drop_map[w]}
    conditions = (1, 2, 3) if apply_reach else (1, 2)
    if apply_reach:
        reaches = set(nodes & sinks)
        preds: dict[str, set[str]] = {v: set() for v in nodes}
        for v, w in data | ctrl:
            preds[w].add(v)
        frontier = deque(reaches)
        while frontier:
            w = frontier.popleft()
            for v in preds[w]:
                if v not in reaches:
                    reaches.add(v)
                    frontier.append(v)
        nodes = reaches
        data = {(v, w) for v, w in data if v in nodes and w in nodes}
        ctrl = {(v, w) for v, w in ctrl if v in nodes and w in nodes}
    return ReducedGraph(
        nodes=frozenset(nodes),
        data_edges=frozenset(data),
        ctrl_edges=frozenset(ctrl),
        drop_map=tuple(sorted((v, r) for v, r in drop_map.items() if v in nodes)),
        conditions=conditions,
        sinks=frozenset(sinks),
    )


def _shortest_path_to_sink(
    rg: ReducedGraph, start: str
) -> tuple[str, ...]:
    """Deterministic BFS path from ``start`` to the nearest sink, ties by name."""
    succ: dict[str, list[str]] = {v: [] for v in rg.nodes}
    for v, w in rg.edges:
        succ[v].append(w)
    for v in succ:
        succ[v].sort()
    sinks = rg.sinks & rg.nodes
    best: dict[str, tuple[str, ...]] = {start: (start,)}
    frontier = deque([start])
    while frontier:
        v = frontier.popleft()
        path = best[v]
        if v in sinks:
            return path
        for w in succ[v]:
            if w not in best:
                best[w] = path + (w,)
                frontier.append(w)
    return (start,)


def counterexample(rg: ReducedGraph) -> Counterexample | None:
    """Predecessor-free nets of the reduced graph.

    Returns None for an empty reduced graph (nothing variable-time reaches a
    sink: verified or vacuous).  If residual cycles leave no node
    predecessor-free, all members of source components of the condensation
    are reported with ``scc_fallback`` set.
    """
    if not rg.nodes:
        return None
    has_pred = {w for _, w in rg.edges}
    roots = sorted(rg.nodes - has_pred)
    fallback = False
    if not roots:
        digraph = nx.DiGraph()
        digraph.add_nodes_from(rg.nodes)
        digraph.add_edges_from(rg.edges)
        cond = nx.condensation(digraph)
        members: list[str] = []
        for comp_id in cond.nodes:
            if cond.in_degree(comp_id) == 0:
                members.extend(cond.nodes[comp_id]["members"])
        roots = sorted(members)
        fallback = True
    return Counterexample(
        nets=frozenset(roots),
        justifications={v: _shortest_path_to_sink(rg, v) for v in roots},
        scc_fallback=fallback,
    )


# ---------------------------------------------------------------------------
# Text dump (consumed by the web UI and offline tooling)
# ---------------------------------------------------------------------------


def dump_graph(
    g: DepGraph,
    drop_map: dict[str, int],
    order: tuple[str, ...] | None = None,
) -> str:
    """Adjacency-list text: ``node NAME round|? ct|vartime`` then edges."""
    names = list(order) if order else sorted(g.nodes)
    names = [n for n in names if n in g.nodes]
    lines = []
    for n in names:
        if n in drop_map:
            lines.append(f"node {n} {drop_map[n]} vartime")
        else:
            lines.append(f"node {n} ⊥ ct")
    for v, w in sorted(g.data_edges):
        lines.append(f"edge {v} {w} data")
    for v, w in sorted(g.ctrl_edges):
        lines.append(f"edge {v} {w} ctrl")
    return "\n".join(lines) + "\n"
