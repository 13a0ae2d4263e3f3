"""Round-based weakening prover for constant-time execution.

The prover maintains one candidate predicate per net and per property:
``pub`` (value equal in both runs at every cycle) and ``ct`` (liveness bit
equal in both runs at every cycle).  Starting from the optimistic candidate
set it repeatedly drops every predicate whose support condition fails against
the surviving candidates, until nothing changes.  What survives is a product
invariant; the round at which a predicate fell is recorded in the secret map
(``pub`` drops) and the variable-time map (``ct`` drops), and those maps
drive fault localization and assumption synthesis downstream.

Support conditions, per driven net ``x``:

``pub(x)`` needs every data and control dependency of every assignment to be
public, a registered ``x`` to be flushed or assumed public (its initial value
is unconstrained otherwise), and an undriven input to be assumed public.

``ct(x)`` holds in one of two ways.  (A) Every governing condition is public
(both runs take the same branch) and constant-time, and all read nets are
constant-time.  (B) The statement assigns ``x`` on every path, the governing
conditions are constant-time, and the per-branch read sets are equal up to
color equivalence: whichever branches the runs take, they OR together
bit-for-bit equal liveness, so the branch choice cannot leak.  Inputs are
constant-time by construction (the environment sets their bits symmetrically
in both runs), as are nets with no dependency path from any source and nets
assumed public.

The final candidate sets do not depend on iteration order; rounds advance by
simultaneous sweeps.  Value equality cascades through combinational logic
within a clock step, so a secret-map round marks one transition of the
product circuit and wires dropped by the same sweep share the round of the
drop that triggered them.  Liveness rounds advance one dependency edge per
round, which orders the variable-time map by causal distance from the nets
where timing variability originates.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .ast import Annotations, NetKind
from .depgraph import DepGraph, graph_from_tables
from .elaborate import Driver, ElaboratedDesign, ModuleTables
from .errors import CtvError
from .summaries import ModuleSummary, SummaryClause


@dataclass(frozen=True)
class PredicateState:
    """Surviving predicates plus the within-run liveness equivalence classes."""

    ct_set: frozenset[str]
    pub_set: frozenset[str]
    eq_classes: tuple[frozenset[str], ...]


@dataclass
class ProofArtifact:
    """Everything a failed (or successful) proof attempt communicates.

    ``vartime_map``/``secret_map`` are partial: a net outside the map kept
    the property.  Smaller rounds fell earlier; simultaneous drops share a
    round.  ``summaries`` is populated in modular mode.
    """

    final_state: PredicateState
    vartime_map: dict[str, int]
    secret_map: dict[str, int]
    summaries: dict[str, ModuleSummary]
    verified: bool
    failed_sinks: tuple[str, ...]
    drop_log: tuple[tuple[str, int, tuple[str, ...]], ...]
    annotations: Annotations
    modular: bool

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(repr(sorted(self.vartime_map.items())).encode())
        h.update(repr(sorted(self.secret_map.items())).encode())
        h.update(repr(sorted(self.final_state.ct_set)).encode())
        h.update(repr(sorted(self.final_state.pub_set)).encode())
        h.update(repr(self.verified).encode())
        return h.hexdigest()[:12]


# ---------------------------------------------------------------------------
# Color equivalence
# ---------------------------------------------------------------------------


def color_equivalence(
    tables: ModuleTables,
    sources: frozenset[str] = frozenset(),
    isolated: bool = False,
) -> tuple[frozenset[str], ...]:
    """Greatest partition of nets with provably equal liveness bits per run.

    Two nets may share a class only if both or neither are sources, their
    driving assignments sit under syntactically identical guard lists, and
    their per-branch read sets are pointwise related by the partition.  In
    isolated mode (summary inference) input bits are unconstrained and every
    input stays alone.
    """
    nets = list(tables.order)
    if not nets:
        return ()
    # representative = smallest member name; refinement only ever splits, so
    # the loop terminates after at most |nets| rounds
    rep = {n: min(nets) for n in nets}

    def signature(net: str) -> tuple:
        if net in tables.instance_drivers:
            idrv = tables.instance_drivers[net]
            binds = tuple(
                (port, tuple(sorted(rep[r] for r in expr.reads())))
                for port, expr in idrv.input_bindings
            )
            return ("inst", idrv.module, idrv.port, binds)
        drv = tables.drivers.get(net)
        if drv is None:
            if isolated:
                return ("input", net)
            return ("input", net in sources)
        arms = tuple(
            (a.guard_sig, tuple(sorted({rep[r] for r in a.data_nets})))
            for a in drv.arms
        )
        return ("drv", drv.clocked, drv.fully_assigned, net in sources, arms)

    while True:
        groups: dict[tuple[str, str], list[str]] = {}
        for n in nets:
            groups.setdefault((rep[n], repr(signature(n))), []).append(n)
        new_rep = {n: min(members) for members in groups.values() for n in members}
        if new_rep == rep:
            break
        rep = new_rep

    classes: dict[str, set[str]] = {}
    for n, r in rep.items():
        classes.setdefault(r, set()).add(n)
    return tuple(frozenset(classes[r]) for r in sorted(classes))


# ---------------------------------------------------------------------------
# Support conditions
# ---------------------------------------------------------------------------


@dataclass
class _Config:
    tables: ModuleTables
    sources: frozenset[str]
    public: frozenset[str]
    flush: frozenset[str]
    summaries: dict[str, ModuleSummary]
    seeded_ct: frozenset[str]
    class_of: dict[str, int]


def _instance_clause(cfg: _Config, net: str) -> tuple[SummaryClause, dict[str, frozenset[str]]]:
    idrv = cfg.tables.instance_drivers[net]
    summary = cfg.summaries.get(idrv.module)
    if summary is None or idrv.port not in summary.clauses:
        raise CtvError(f"missing summary for module {idrv.module!r}")
    binds = {port: expr.reads() for port, expr in idrv.input_bindings}
    return summary.clauses[idrv.port], binds


def _pub_supported(cfg: _Config, net: str, pub: set[str]) -> bool:
    if net in cfg.public:
        return True
    tables = cfg.tables
    if net in tables.instance_drivers:
        clause, binds = _instance_clause(cfg, net)
        if not clause.gives_pub:
            return False
        if clause.pub_requires_flush and net not in cfg.flush:
            return False
        return all(
            r in pub for p in clause.pub_premise_inputs for r in binds[p]
        )
    drv = tables.drivers.get(net)
    if drv is None:
        return False  # input driven by an unconstrained environment
    if drv.clocked and net not in cfg.flush:
        return False  # initial value unconstrained
    return all(arm.ctrl_nets <= pub and arm.data_nets <= pub for arm in drv.arms)


def _ct_supported(cfg: _Config, net: str, ct: set[str], pub_final: frozenset[str]) -> bool:
    if net in cfg.seeded_ct:
        return True
    tables = cfg.tables
    if net in tables.instance_drivers:
        clause, binds = _instance_clause(cfg, net)
        if not clause.provable:
            return False
        for port in clause.ct_inputs:
            if not binds[port] <= ct:
                return False
        for port in clause.pub_inputs:
            if not all(r in pub_final for r in binds[port]):
                return False
        return True
    drv = tables.drivers[net]
    ctrl = drv.ctrl_nets
    data = drv.data_nets
    if not data <= ct:
        return False
    if ctrl <= ct and ctrl <= pub_final:
        return True  # both runs take the same branches
    if drv.fully_assigned and ctrl <= ct:
        shapes = {
            frozenset(cfg.class_of[n] for n in arm.data_nets) for arm in drv.arms
        }
        if len(shapes) == 1:
            return True  # diverging branches OR together equal bits
    return False


# ---------------------------------------------------------------------------
# Fixpoints
# ---------------------------------------------------------------------------


def _is_transparent(cfg: _Config, net: str) -> bool:
    """Nets whose value updates within the same clock step (not registers)."""
    drv = cfg.tables.drivers.get(net)
    if drv is None:
        return net in cfg.tables.instance_drivers
    return not drv.clocked


def _pub_fixpoint(cfg: _Config):
    nets = set(cfg.tables.order)
    pub: set[str] = set(nets - (cfg.sources - cfg.public))
    secret: dict[str, int] = {s: 0 for s in sorted(cfg.sources - cfg.public) if s in nets}
    log: list[tuple[str, int, tuple[str, ...]]] = []
    rnd = 0
    while True:
        rnd += 1
        drops = sorted(n for n in pub if not _pub_supported(cfg, n, pub))
        if not drops:
            break
        dropped_this_round = list(drops)
        for n in drops:
            pub.discard(n)
            secret[n] = rnd
        while True:
            more = sorted(
                n
                for n in pub
                if _is_transparent(cfg, n) and not _pub_supported(cfg, n, pub)
            )
            if not more:
                break
            for n in more:
                pub.discard(n)
                secret[n] = rnd
            dropped_this_round += more
        log.append(("secret", rnd, tuple(dropped_this_round)))
    return frozenset(pub), secret, log


def _ct_fixpoint(cfg: _Config, pub_final: frozenset[str]):
    nets = set(cfg.tables.order)
    ct: set[str] = set(nets)
    vartime: dict[str, int] = {}
    log: list[tuple[str, int, tuple[str, ...]]] = []
    rnd = 0
    while True:
        rnd += 1
        drops = sorted(
            n for n in ct if n not in cfg.seeded_ct and not _ct_supported(cfg, n, ct, pub_final)
        )
        if not drops:
            break
        for n in drops:
            ct.discard(n)
            vartime[n] = rnd
        log.append(("vartime", rnd, tuple(drops)))
    return frozenset(ct), vartime, log


def _never_tainted(tables: ModuleTables, summaries, origins: frozenset[str]) -> frozenset[str]:
    graph = graph_from_tables(tables, summaries)
    succ: dict[str, set[str]] = {}
    for v, w in graph.edges:
        succ.setdefault(v, set()).add(w)
    reached = set(origins & graph.nodes)
    stack = list(reached)
    while stack:
        v = stack.pop()
        for w in succ.get(v, ()):
            if w not in reached:
                reached.add(w)
                stack.append(w)
    return frozenset(graph.nodes - reached)


def _make_config(
    tables: ModuleTables,
    sources: frozenset[str],
    public: frozenset[str],
    flush: frozenset[str],
    summaries: dict[str, ModuleSummary],
    isolated: bool,
    ct_inputs: frozenset[str] = frozenset(),
) -> _Config:
    taint_origins = frozenset(tables.inputs) if isolated else sources
    never = _never_tainted(tables, summaries if tables.instance_drivers else None, taint_origins)
    if isolated:
        seeded = ct_inputs | never | public
    else:
        seeded = frozenset(tables.inputs) | never | public
    classes = color_equivalence(tables, sources, isolated)
    class_of = {n: i for i, cls in enumerate(classes) for n in cls}
    return _Config(
        tables=tables,
        sources=sources,
        public=public,
        flush=flush,
        summaries=summaries,
        seeded_ct=seeded,
        class_of=class_of,
    )


# ---------------------------------------------------------------------------
# Top-level inference
# ---------------------------------------------------------------------------


def infer(
    design: ElaboratedDesign, ann: Annotations, modular: bool = False
) -> ProofArtifact:
    """Run the weakening fixpoint and assemble the proof artifact.

    In modular mode the analysis works on the top module with instantiated
    children represented by their inferred summaries; otherwise on the
    flattened design.  Verified iff every sink keeps the ``ct`` predicate.
    """
    tables = design.top_tables if modular else design.flat_tables
    summaries = infer_all_summaries(design) if modular else {}
    cfg = _make_config(
        tables,
        sources=ann.sources,
        public=ann.assumptions.public,
        flush=ann.assumptions.flush,
        summaries=summaries,
        isolated=False,
    )
    pub_final, secret_map, log1 = _pub_fixpoint(cfg)
    ct_final, vartime_map, log2 = _ct_fixpoint(cfg, pub_final)
    classes = color_equivalence(tables, ann.sources)
    failed = tuple(sorted(s for s in ann.sinks if s not in ct_final))
    return ProofArtifact(
        final_state=PredicateState(ct_final, pub_final, classes),
        vartime_map=vartime_map,
        secret_map=secret_map,
        summaries=summaries,
        verified=not failed,
        failed_sinks=failed,
        drop_log=tuple(log1 + log2),
        annotations=ann,
        modular=modular,
    )


# ---------------------------------------------------------------------------
# Summary inference
# ---------------------------------------------------------------------------


def _isolated_sets(
    tables: ModuleTables,
    summaries: dict[str, ModuleSummary],
    ct_inputs: frozenset[str],
    pub_inputs: frozenset[str],
    flush_all: bool,
) -> tuple[frozenset[str], frozenset[str]]:
    """Final (ct, pub) sets of a module analyzed with port assumptions only."""
    flush = frozenset(tables.order) if flush_all else frozenset()
    cfg = _make_config(
        tables,
        sources=frozenset(),
        public=pub_inputs,
        flush=flush,
        summaries=summaries,
        isolated=True,
        ct_inputs=ct_inputs,
    )
    pub_final, _, _ = _pub_fixpoint(cfg)
    ct_final, _, _ = _ct_fixpoint(cfg, pub_final)
    return ct_final, pub_final


def _relevant_inputs(tables: ModuleTables, summaries, output: str) -> tuple[str, ...]:
    graph = graph_from_tables(tables, summaries if tables.instance_drivers else None)
    pred: dict[str, set[str]] = {}
    for v, w in graph.edges:
        pred.setdefault(w, set()).add(v)
    seen = {output}
    stack = [output]
    while stack:
        w = stack.pop()
        for v in pred.get(w, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return tuple(p for p in tables.inputs if p in seen)


def _subsets_in_order(items: tuple[str, ...]):
    """Subsets by size then position order: (), (a,), (b,), ... (a,b), ..."""
    import itertools

    for size in range(len(items) + 1):
        yield from itertools.combinations(items, size)


def infer_summary(
    design: ElaboratedDesign,
    module: str,
    summaries: dict[str, ModuleSummary] | None = None,
) -> ModuleSummary:
    """Infer the weakest port-level clause for each output of ``module``.

    For every output, premises are searched weakest first: no assumptions,
    then all path-relevant inputs constant-time, then the same plus each
    subset of relevant inputs public (subsets by size, inputs in declaration
    order).  A separate row records whether the output's value is provably
    public when all relevant inputs are public, first without and then with
    flushed internal state.
    """
    tables = design.module_tables[module]
    child_summaries = summaries if summaries is not None else {}
    cache: dict[tuple, tuple[frozenset[str], frozenset[str]]] = {}

    def sets_for(ct: frozenset[str], pub: frozenset[str], flush: bool):
        key = (ct, pub, flush)
        if key not in cache:
            cache[key] = _isolated_sets(tables, child_summaries, ct, pub, flush)
        return cache[key]

    clauses: dict[str, SummaryClause] = {}
    for output in tables.outputs:
        relevant = _relevant_inputs(tables, child_summaries, output)
        rel_set = frozenset(relevant)
        found: SummaryClause | None = None
        if not relevant:
            ct0, _ = sets_for(frozenset(), frozenset(), False)
            if output in ct0:
                found = SummaryClause((), (), provable=True)
        else:
            for subset in _subsets_in_order(relevant):
                ct_set, _ = sets_for(rel_set, frozenset(subset), False)
                if output in ct_set:
                    found = SummaryClause(relevant, tuple(subset), provable=True)
                    break
        if found is None:
            found = SummaryClause(relevant, relevant, provable=False)
        gives_pub = False
        requires_flush = False
        for flush_flag in (False, True):
            _, pub_set = sets_for(rel_set, rel_set, flush_flag)
            if output in pub_set:
                gives_pub = True
                requires_flush = flush_flag
                break
        clauses[output] = SummaryClause(
            ct_inputs=found.ct_inputs,
            pub_inputs=found.pub_inputs,
            provable=found.provable,
            gives_pub=gives_pub,
            pub_premise_inputs=relevant if gives_pub else (),
            pub_requires_flush=requires_flush,
        )
    return ModuleSummary(module=module, clauses=clauses)


def infer_all_summaries(design: ElaboratedDesign) -> dict[str, ModuleSummary]:
    """Summaries for every instantiated module, children before parents."""
    out: dict[str, ModuleSummary] = {}
    for name in design.summary_order:
        out[name] = infer_summary(design, name, out)
    return out
