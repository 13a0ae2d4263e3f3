"""Blame sets and assumption synthesis via 0/1 integer programming.

Once localization has produced a counterexample (the earliest nets to turn
variable-time), the nets controlling their branch choices are to blame; the
synthesizer then picks a cheapest set of nets to *mark* public so that every
blamed net becomes *derivably* public.  Per net ``v`` the problem has binary
variables ``m_v`` (marked) and ``p_v`` (derivably public) constrained over
the synthesis graph:

    (1)  m_v >= p_v                                  if v has no predecessors
    (2)  |pre(v)| * m_v + sum_{w in pre(v)} p_w >= |pre(v)| * p_v   otherwise
    (3)  p_v = 1                                     for v in Blame minus No
    (4)  m_v = 0                                     for v in No

minimizing ``sum w_v * m_v`` where ``w_v`` is one plus the hop distance from
the nearest source (so assumptions gravitate toward externally visible
inputs).  Constraint (2) is the integer form of requiring all predecessors
public unless the net is marked itself.  The solver is exact: exhaustive
over the useful marking variables when few, branch-and-bound with
feasibility propagation otherwise; ties in the objective go to the
lexicographically least marked set.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .depgraph import Counterexample, DepGraph, ReducedGraph
from .errors import StaleArtifactError


@dataclass(frozen=True)
class BlameSet:
    """Control-dependency predecessors of the counterexample in the full graph."""

    nets: frozenset[str]


def blame(g: DepGraph, cex: Counterexample) -> BlameSet:
    """Nets whose secrecy caused the earliest variable-time nets.

    An empty blame set is legal and signals a data-flow-only failure (no
    control dependency to pin the divergence on).
    """
    out: set[str] = set()
    for v in cex.nets:
        out.update(w for w, x in g.ctrl_edges if x == v)
    return BlameSet(frozenset(out))


@dataclass(frozen=True)
class IlpProblem:
    nets: tuple[str, ...]  # synthesis-graph nets, sorted
    preds: tuple[tuple[str, tuple[str, ...]], ...]  # v -> sorted predecessors
    forced_public: tuple[str, ...]  # constraint (3)
    forbidden_marks: tuple[str, ...]  # constraint (4)
    weights: tuple[tuple[str, int], ...]

    @property
    def pred_map(self) -> dict[str, tuple[str, ...]]:
        return dict(self.preds)

    @property
    def weight_map(self) -> dict[str, int]:
        return dict(self.weights)


@dataclass(frozen=True)
class IlpSolution:
    assignment: tuple[tuple[str, tuple[int, int]], ...]  # net -> (m, p)
    objective: int
    feasible: bool = True

    @property
    def marked(self) -> tuple[str, ...]:
        return tuple(n for n, (m, _) in self.assignment if m)

    @property
    def public(self) -> tuple[str, ...]:
        return tuple(n for n, (_, p) in self.assignment if p)


INFEASIBLE = IlpSolution(assignment=(), objective=-1, feasible=False)


def _hop_weights(g: DepGraph, nets: tuple[str, ...], src: frozenset[str]) -> dict[str, int]:
    """1 + BFS hop distance from any source over the full graph; unreachable
    nets cost more than everything reachable combined."""
    dist: dict[str, int] = {}
    frontier = deque()
    for s in sorted(src):
        if s in g.nodes:
            dist[s] = 0
            frontier.append(s)
    succ: dict[str, list[str]] = {}
    for v, w in g.edges:
        succ.setdefault(v, []).append(w)
    while frontier:
        v = frontier.popleft()
        for w in sorted(succ.get(v, ())):
            if w not in dist:
                dist[w] = dist[v] + 1
                frontier.append(w)
    far = len(nets) + 1
    return {n: (1 + dist[n]) if n in dist else far for n in nets}


def build_ilp(
    artifact,
    full_graph: DepGraph,
    blame_set: BlameSet,
    no: frozenset[str],
    src: frozenset[str],
) -> IlpProblem:
    """Constraints (1)-(4) over the synthesis graph of a failed proof.

    The synthesis graph is the dependency graph reduced against the
    artifact's secret map under conditions 1 and 2 only: dropping
    proven-public nets and order-violating edges breaks the cycles that
    would let ``p`` variables justify each other, while keeping blamed nets
    that cannot reach a sink.
    """
    from .depgraph import reduce_graph

    synthesis_graph = reduce_graph(
        full_graph, artifact.secret_map, artifact.annotations.sinks, apply_reach=False
    )
    return build_ilp_from_graphs(synthesis_graph, full_graph, blame_set, no, src)


def build_ilp_from_graphs(
    synthesis_graph: ReducedGraph,
    full_graph: DepGraph,
    blame_set: BlameSet,
    no: frozenset[str],
    src: frozenset[str],
) -> IlpProblem:
    """Constraints (1)-(4) over an explicitly supplied synthesis graph."""
    nets = tuple(sorted(synthesis_graph.nodes))
    net_set = set(nets)
    missing = sorted(blame_set.nets - net_set - no)
    if missing:
        raise StaleArtifactError(
            f"blame nets {missing} were proven public; artifact is stale"
        )
    pred: dict[str, set[str]] = {n: set() for n in nets}
    for v, w in synthesis_graph.edges:
        pred[w].add(v)
    weights = _hop_weights(full_graph, nets, src)
    return IlpProblem(
        nets=nets,
        preds=tuple((n, tuple(sorted(pred[n]))) for n in nets),
        forced_public=tuple(sorted(blame_set.nets - no)),
        forbidden_marks=tuple(sorted(no & net_set)),
        weights=tuple((n, weights[n]) for n in nets),
    )


# ---------------------------------------------------------------------------
# Exact solving
# ---------------------------------------------------------------------------


def closure(problem: IlpProblem, marked: frozenset[str]) -> frozenset[str]:
    """Greatest set of derivably public nets consistent with the constraints.

    Start from everything and strip nets whose constraint cannot hold: an
    unmarked predecessor-free net, or an unmarked net with a non-public
    predecessor.  Mutually supporting cycles survive, matching the relaxed
    integer constraints.
    """
    pred = problem.pred_map
    public = set(problem.nets)
    changed = True
    while changed:
        changed = False
        for n in problem.nets:
            if n not in public or n in marked:
                continue
            ps = pred[n]
            if not ps or any(w not in public for w in ps):
                public.discard(n)
                changed = True
    return frozenset(public)


def _feasible(problem: IlpProblem, marked: frozenset[str]) -> bool:
    if marked & set(problem.forbidden_marks):
        return False
    return set(problem.forced_public) <= closure(problem, marked)


def solve_ilp(problem: IlpProblem, exhaustive_limit: int = 12) -> IlpSolution:
    """Exact optimum; ties broken by lexicographically least marked set.

    Only markings of nets that can influence a forced-public net matter, so
    the search runs over that candidate set: exhaustively when it is small,
    branch-and-bound with feasibility propagation and weight pruning
    otherwise.  All weights are positive, so a proper superset of a feasible
    marking is never optimal.  Infeasibility (the No set blocks every cut)
    is a result, not an error.
    """
    targets = set(problem.forced_public)
    if not targets:
        assignment = tuple((n, (0, 0)) for n in problem.nets)
        return IlpSolution(assignment=assignment, objective=0)

    pred = problem.pred_map
    # candidate marks: ancestors of the targets (and targets themselves)
    ancestors: set[str] = set()
    stack = sorted(targets)
    while stack:
        v = stack.pop()
        if v in ancestors:
            continue
        ancestors.add(v)
        stack.extend(pred[v])
    forbidden = set(problem.forbidden_marks)
    candidates = tuple(sorted(ancestors - forbidden))
    weights = problem.weight_map

    if not _feasible(problem, frozenset(candidates)):
        return INFEASIBLE

    best: tuple[int, tuple[str, ...]] | None = None

    def consider(marked: tuple[str, ...]) -> None:
        nonlocal best
        cost = sum(weights[n] for n in marked)
        key = (cost, tuple(sorted(marked)))
        if best is not None and key >= best:
            return
        if _feasible(problem, frozenset(marked)):
            best = key

    if len(candidates) <= exhaustive_limit:
        for bits in range(1 << len(candidates)):
            marked = tuple(c for i, c in enumerate(candidates) if bits >> i & 1)
            consider(marked)
    else:

        def bnb(i: int, marked: tuple[str, ...], cost: int) -> None:
            if best is not None and (cost, tuple(sorted(marked))) >= best:
                return
            if _feasible(problem, frozenset(marked)):
                consider(marked)
                return  # supersets cost strictly more
            if i == len(candidates):
                return
            if not _feasible(problem, frozenset(marked + candidates[i:])):
                return  # no completion can cover the blame set
            bnb(i + 1, marked, cost)
            c = candidates[i]
            bnb(i + 1, marked + (c,), cost + weights[c])

        bnb(0, (), 0)

    if best is None:
        return INFEASIBLE
    marked = frozenset(best[1])
    public = closure(problem, marked)
    assignment = tuple(
        (n, (1 if n in marked else 0, 1 if n in public else 0)) for n in problem.nets
    )
    return IlpSolution(assignment=assignment, objective=best[0])


def decode(solution: IlpSolution, graph_nets: frozenset[str]):
    """Turn a feasible solution into an assumption set.

    Public is the marked set; everything else in the synthesis graph is
    assumed flushed (equal at the initial state), matching the convention
    that accepting a suggestion also pins down the rest of the involved
    state.
    """
    from .ast import AssumptionSet

    if not solution.feasible:
        raise StaleArtifactError("cannot decode an infeasible solution")
    public = frozenset(solution.marked)
    return AssumptionSet(flush=frozenset(graph_nets) - public, public=public)


# ---------------------------------------------------------------------------
# Problem dump (debugging aid, frozen by golden files)
# ---------------------------------------------------------------------------


def dump_ilp(problem: IlpProblem) -> str:
    weights = problem.weight_map
    pred = problem.pred_map
    lines = ["min: " + " + ".join(f"{weights[n]} m_{n}" for n in problem.nets)]
    lines.append("st:")
    for n in problem.nets:
        ps = pred[n]
        if not ps:
            lines.append(f"  m_{n} - p_{n} >= 0")
        else:
            k = len(ps)
            terms = " + ".join(f"p_{w}" for w in ps)
            lines.append(f"  {k} m_{n} + {terms} - {k} p_{n} >= 0")
    for n in problem.forced_public:
        lines.append(f"  p_{n} = 1")
    for n in problem.forbidden_marks:
        lines.append(f"  m_{n} = 0")
    names = " ".join(f"m_{n} p_{n}" for n in problem.nets)
    lines.append(f"binary: {names}")
    return "\n".join(lines) + "\n"
