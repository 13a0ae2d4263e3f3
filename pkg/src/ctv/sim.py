"""Concrete pair-run semantics with liveness-bit tracking.

Runs two executions of a design side by side and tracks, per net and per
run, whether the net is currently influenced by the computation injected at
the initial cycle ``t`` (its *liveness bit*).  At cycle ``t`` the bits of all
source nets are forced active in both runs; afterwards a bit propagates to an
assigned net as the OR of the bits of every net read by the chosen right-hand
side and by every enclosing branch condition.  Registers that are not
assigned in a cycle keep both value and bit.

This module is the ground-truth oracle: the prover is tested against
exhaustive searches performed here, and every counterexample the toolkit
reports can be replayed as a concrete trace.

Values are plain unsigned integers masked to their declared widths; width
overflow wraps and is never an error.  Registers start at zero (the prover
treats initial register values as unconstrained unless flushed, so it never
relies on this).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .ast import (
    Assign,
    AssumptionSet,
    Binary,
    Block,
    Case,
    Concat,
    Const,
    Expression,
    If,
    Mux,
    Process,
    ProcessKind,
    Statement,
    Unary,
    Var,
)
from .elaborate import ElaboratedDesign, ModuleTables, expr_width
from .errors import CtvError


# ---------------------------------------------------------------------------
# Expression evaluation
# ---------------------------------------------------------------------------


def _eval(e: Expression, values: dict[str, int], widths: dict[str, int]) -> int:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return values[e.name]
    if isinstance(e, Unary):
        v = _eval(e.operand, values, widths)
        if e.op == "!":
            return 0 if v else 1
        w = expr_width(e.operand, widths)
        mask = (1 << w) - 1 if w else ~0
        if e.op == "~":
            return (~v) & mask
        if e.op == "-":
            return (-v) & mask
        raise CtvError(f"unknown unary operator {e.op!r}")
    if isinstance(e, Binary):
        a = _eval(e.left, values, widths)
        b = _eval(e.right, values, widths)
        op = e.op
        if op == "&&":
            return 1 if (a and b) else 0
        if op == "||":
            return 1 if (a or b) else 0
        if op == "==":
            return 1 if a == b else 0
        if op == "!=":
            return 1 if a != b else 0
        if op == "<":
            return 1 if a < b else 0
        if op == ">":
            return 1 if a > b else 0
        if op == ">=":
            return 1 if a >= b else 0
        w = expr_width(e, widths)
        mask = (1 << w) - 1 if w else ~0
        if op == "&":
            return a & b
        if op == "|":
            return a | b
        if op == "^":
            return a ^ b
        if op == "+":
            return (a + b) & mask
        if op == "-":
            return (a - b) & mask
        raise CtvError(f"unknown binary operator {op!r}")
    if isinstance(e, Concat):
        acc = 0
        for part in e.parts:
            w = expr_width(part, widths)
            if w is None:
                raise CtvError("unsized constant inside concatenation")
            acc = (acc << w) | (_eval(part, values, widths) & ((1 << w) - 1))
        return acc
    if isinstance(e, Mux):
        if _eval(e.cond, values, widths):
            return _eval(e.if_true, values, widths)
        return _eval(e.if_false, values, widths)
    raise TypeError(f"unknown expression {e!r}")




class _Run:
    """Mutable single-run state; one clock cycle per ``advance`` call."""

    __slots__ = ("tables", "values", "live", "widths")

    def _reads_of(self, e: Expression) -> frozenset[str]:
        cache = self.tables.reads_cache
        got = cache.get(id(e))
        if got is None:
            got = e.reads()
            cache[id(e)] = got
        return got

    def _case_table(self, stmt: Case) -> dict[int, Statement]:
        cache = self.tables.case_cache
        got = cache.get(id(stmt))
        if got is None:
            got = {arm.key.value: arm.body for arm in stmt.arms}
            cache[id(stmt)] = got
        return got

    def __init__(self, tables: ModuleTables, inputs0: dict[str, int]):
        self.tables = tables
        self.widths = tables.widths
        self.values = {net: 0 for net in tables.order}
        self.live = {net: False for net in tables.order}
        self._apply_inputs(inputs0)
        self._settle(set())

    def _apply_inputs(self, inputs: dict[str, int]) -> None:
        for net in self.tables.inputs:
            if net not in inputs:
                raise CtvError(f"missing input value for {net!r}")
            mask = (1 << self.widths[net]) - 1
            self.values[net] = inputs[net] & mask
            self.live[net] = False

    def _exec(
        self,
        stmt: Statement,
        ctrl_live: bool,
        old_values: dict[str, int],
        old_live: dict[str, bool],
        out_values: dict[str, int],
        out_live: dict[str, bool],
    ) -> None:
        """Execute a statement; reads come from old state, writes go to out."""
        if isinstance(stmt, Assign):
            val = _eval(stmt.rhs, old_values, self.widths)
            bit = ctrl_live
            if not bit:
                for name in self._reads_of(stmt.rhs):
                    if old_live[name]:
                        bit = True
                        break
            mask = (1 << self.widths[stmt.lhs]) - 1
            out_values[stmt.lhs] = val & mask
            out_live[stmt.lhs] = bit
            return
        if isinstance(stmt, If):
            taken = bool(_eval(stmt.cond, old_values, self.widths))
            cl = ctrl_live
            if not cl:
                for name in self._reads_of(stmt.cond):
                    if old_live[name]:
                        cl = True
                        break
            branch = stmt.then_branch if taken else stmt.else_branch
            if branch is not None:
                self._exec(branch, cl, old_values, old_live, out_values, out_live)
            return
        if isinstance(stmt, Case):
            subj = _eval(stmt.subject, old_values, self.widths)
            cl = ctrl_live
            if not cl:
                for name in self._reads_of(stmt.subject):
                    if old_live[name]:
                        cl = True
                        break
            branch = self._case_table(stmt).get(subj, stmt.default)
            if branch is not None:
                self._exec(branch, cl, old_values, old_live, out_values, out_live)
            return
        if isinstance(stmt, Block):
            for child in stmt.body:
                self._exec(child, ctrl_live, old_values, old_live, out_values, out_live)
            return
        raise TypeError(f"unknown statement {stmt!r}")

    def _settle(self, forced_sources: set[str]) -> None:
        """Evaluate combinational logic in dependency order."""
        tables = self.tables
        done: set[int] = set()
        for net in tables.comb_order:
            proc = tables.processes_by_net[net]
            if id(proc) in done:
                continue
            done.add(id(proc))
            # blocking semantics: writes land immediately in current state
            self._exec(proc.body, False, self.values, self.live, self.values, self.live)
        for s in forced_sources:
            self.live[s] = True

    def advance(self, inputs: dict[str, int], inject_sources: frozenset[str]) -> None:
        """One clock edge: latch registers, apply inputs, settle wires."""
        tables = self.tables
        old_values = dict(self.values)
        old_live = dict(self.live)
        done: set[int] = set()
        for net, drv in tables.drivers.items():
            if not drv.clocked:
                continue
            proc = tables.processes_by_net[net]
            if id(proc) in done:
                continue
            done.add(id(proc))
            # nonblocking: all right-hand sides read the pre-edge state
            self._exec(proc.body, False, old_values, old_live, self.values, self.live)
        self._apply_inputs(inputs)
        for s in inject_sources:
            if s in self.values and s not in tables.comb_order:
                self.live[s] = True
        self._settle({s for s in inject_sources if s in tables.comb_order})


# ---------------------------------------------------------------------------
# Pair configurations and traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairConfiguration:
    """Product-circuit state at one cycle: both stores, both liveness maps."""

    store_l: dict[str, int]
    store_r: dict[str, int]
    live_l: dict[str, bool]
    live_r: dict[str, bool]
    cycle: int
    initial_cycle: int
    sources: frozenset[str]


@dataclass
class PairTrace:
    """A run pair of length ``n``; configuration ``i`` is cycle ``i``."""

    configs: list[PairConfiguration]
    inputs_l: list[dict[str, int]]
    inputs_r: list[dict[str, int]]
    sources: frozenset[str]
    assumptions: AssumptionSet = AssumptionSet()
    assumption_violated: bool = False
    violated_net: str | None = None

    def __len__(self) -> int:
        return len(self.configs)


@dataclass(frozen=True)
class Verdict:
    """ConstantTime, or the first sink/cycle where liveness bits diverge."""

    constant_time: bool
    sink: str | None = None
    cycle: int | None = None
    live_l: bool | None = None
    live_r: bool | None = None


def step(
    cfg: PairConfiguration,
    design: ElaboratedDesign,
    inputs_l: dict[str, int],
    inputs_r: dict[str, int],
) -> PairConfiguration:
    """Advance both runs one clock cycle independently.

    At cycle ``t`` (the configuration being produced) every source's liveness
    bit is forced active in both runs.
    """
    tables = design.flat_tables
    next_cycle = cfg.cycle + 1
    inject = cfg.sources if next_cycle == cfg.initial_cycle else frozenset()
    out = []
    for store, live, inputs in (
        (cfg.store_l, cfg.live_l, inputs_l),
        (cfg.store_r, cfg.live_r, inputs_r),
    ):
        run = _Run.__new__(_Run)
        run.tables = tables
        run.widths = tables.widths
        run.values = dict(store)
        run.live = dict(live)
        run.advance(inputs, inject)
        out.append(run)
    return PairConfiguration(
        store_l=out[0].values,
        store_r=out[1].values,
        live_l=out[0].live,
        live_r=out[1].live,
        cycle=next_cycle,
        initial_cycle=cfg.initial_cycle,
        sources=cfg.sources,
    )


def initial_configuration(
    design: ElaboratedDesign,
    sources: frozenset[str],
    t: int,
    inputs_l: dict[str, int],
    inputs_r: dict[str, int],
) -> PairConfiguration:
    """Cycle-0 configuration: registers zero, all liveness bits dead."""
    tables = design.flat_tables
    runs = [_Run(tables, inputs_l), _Run(tables, inputs_r)]
    return PairConfiguration(
        store_l=runs[0].values,
        store_r=runs[1].values,
        live_l=runs[0].live,
        live_r=runs[1].live,
        cycle=0,
        initial_cycle=t,
        sources=sources,
    )


def run_pair(
    design: ElaboratedDesign,
    src: frozenset[str],
    snk: frozenset[str],
    t: int,
    n: int,
    inputs_l: list[dict[str, int]],
    inputs_r: list[dict[str, int]],
    assumptions: AssumptionSet = AssumptionSet(),
) -> PairTrace:
    """Simulate a pair of runs for ``n`` cycles with assumption enforcement.

    Public input nets are forced equal by copying the left stream onto the
    right; equality of public non-input nets is checked, and a difference
    flags the trace ``assumption_violated`` (unusable as a witness).  Flushed
    registers start equal by construction (both runs reset to zero).
    """
    if n == 0:
        raise CtvError("trace length n must be positive")
    if t >= n:
        raise CtvError(f"initial cycle t={t} must be below trace length n={n}")
    if t < 1:
        raise CtvError("initial cycle t must be at least 1 (cycle 0 is all-dead)")
    tables = design.flat_tables
    if len(inputs_l) < n or len(inputs_r) < n:
        raise CtvError(f"need {n} cycles of inputs for both runs")
    input_set = set(tables.inputs)
    public_inputs = assumptions.public & input_set
    checked_public = sorted(assumptions.public - input_set)

    forced_r: list[dict[str, int]] = []
    for i in range(n):
        row = dict(inputs_r[i])
        for net in public_inputs:
            row[net] = inputs_l[i][net]
        forced_r.append(row)

    cfg = initial_configuration(design, src, t, inputs_l[0], forced_r[0])
    trace = PairTrace(
        configs=[cfg],
        inputs_l=[dict(inputs_l[0])],
        inputs_r=[dict(forced_r[0])],
        sources=src,
        assumptions=assumptions,
    )

    def check_public(c: PairConfiguration) -> None:
        for net in checked_public:
            if c.store_l[net] != c.store_r[net]:
                trace.assumption_violated = True
                trace.violated_net = net
                return

    check_public(cfg)
    for i in range(1, n):
        cfg = step(cfg, design, inputs_l[i], forced_r[i])
        trace.configs.append(cfg)
        trace.inputs_l.append(dict(inputs_l[i]))
        trace.inputs_r.append(dict(forced_r[i]))
        check_public(cfg)
    return trace


def check_ct_on_trace(trace: PairTrace, snk: frozenset[str]) -> Verdict:
    """ConstantTime iff every sink's liveness bits agree at every cycle."""
    for cfg in trace.configs:
        for sink in sorted(snk):
            bl, br = cfg.live_l[sink], cfg.live_r[sink]
            if bl != br:
                return Verdict(False, sink, cfg.cycle, bl, br)
    return Verdict(True)


# ---------------------------------------------------------------------------
# Bounded witness search
# ---------------------------------------------------------------------------


def _value_space(tables: ModuleTables, nets: tuple[str, ...]) -> int:
    space = 1
    for net in nets:
        space *= 1 << tables.widths[net]
        if space > 1 << 62:
            return 1 << 62
    return space


def _single_run_signature(
    design: ElaboratedDesign,
    values: tuple[int, ...],
    t: int,
    n: int,
    sources: frozenset[str],
    sinks: tuple[str, ...],
    tracked: tuple[str, ...],
) -> tuple[tuple[bool, ...], tuple[int, ...]]:
    """Sink liveness bits and tracked-net values over one constant-input run."""
    tables = design.flat_tables
    inputs = dict(zip(tables.inputs, values))
    run = _Run(tables, inputs)
    live_bits: list[bool] = []
    store_vals: list[int] = []
    for cycle in range(n):
        if cycle > 0:
            run.advance(inputs, sources if cycle == t else frozenset())
        live_bits.extend(run.live[s] for s in sinks)
        store_vals.extend(run.values[net] for net in tracked)
    return tuple(live_bits), tuple(store_vals)


def search_witness(
    design: ElaboratedDesign,
    src: frozenset[str],
    snk: frozenset[str],
    assumptions: AssumptionSet = AssumptionSet(),
    bound: int = 8,
    budget: int = 65536,
    seed: int = 0,
) -> PairTrace | None:
    """Bounded, deterministic search for a constant-time violation.

    Enumerates pairs of constant input assignments, initial cycle ascending
    and value pairs in lexicographic order.  The search is exhaustive when
    the whole (t, pair) space fits in ``budget``; when only the pair space
    fits, every pair is tried at the smallest initial cycles; otherwise
    ``budget`` seeded pseudo-random trials are sampled.  A returned trace
    satisfies the assumptions and fails :func:`check_ct_on_trace`.
    """
    if bound < 2:
        raise CtvError("bound must be at least 2")
    tables = design.flat_tables
    inputs = tables.inputs
    input_set = set(inputs)
    public_inputs = tuple(n for n in inputs if n in assumptions.public)
    free_inputs = tuple(n for n in inputs if n not in assumptions.public)
    sinks = tuple(sorted(snk))
    tracked = tuple(sorted(assumptions.public - input_set))

    ts = list(range(1, bound - 1)) or [1]
    ts = [t for t in ts if t < bound]
    space_l = _value_space(tables, inputs)
    space_r = _value_space(tables, free_inputs)
    pair_space = space_l * space_r
    total = pair_space * len(ts)

    memo: dict[tuple[tuple[int, ...], int], tuple[tuple[bool, ...], tuple[int, ...]]] = {}

    def run_sig(values: tuple[int, ...], t: int):
        key = (values, t)
        got = memo.get(key)
        if got is None:
            got = _single_run_signature(design, values, t, bound, src, sinks, tracked)
            memo[key] = got
        return got

    def try_pair(vl: tuple[int, ...], vr: tuple[int, ...], t: int) -> PairTrace | None:
        live_l, pub_l = run_sig(vl, t)
        live_r, pub_r = run_sig(vr, t)
        if pub_l != pub_r:
            return None  # assumption-violating environment
        if live_l == live_r:
            return None
        stream_l = [dict(zip(inputs, vl)) for _ in range(bound)]
        stream_r = [dict(zip(inputs, vr)) for _ in range(bound)]
        trace = run_pair(design, src, snk, t, bound, stream_l, stream_r, assumptions)
        if trace.assumption_violated:
            return None
        if check_ct_on_trace(trace, snk).constant_time:
            return None
        return trace

    def right_values(vl: tuple[int, ...], free: tuple[int, ...]) -> tuple[int, ...]:
        by_name = dict(zip(free_inputs, free))
        tied = dict(zip(inputs, vl))
        return tuple(by_name.get(n, tied[n]) for n in inputs)

    def all_values(nets: tuple[str, ...]):
        ranges = [range(1 << tables.widths[n]) for n in nets]
        return itertools.product(*ranges)

    if total <= budget or pair_space <= budget:
        trials = 0
        for t in ts:
            for vl in all_values(inputs):
                for free in all_values(free_inputs):
                    if trials >= budget and total > budget:
                        return None
                    trials += 1
                    hit = try_pair(vl, right_values(vl, free), t)
                    if hit is not None:
                        return hit
        return None

    rng = random.Random(seed)
    for _ in range(budget):
        t = rng.choice(ts)
        vl = tuple(rng.randrange(1 << tables.widths[n]) for n in inputs)
        free = tuple(rng.randrange(1 << tables.widths[n]) for n in free_inputs)
        hit = try_pair(vl, right_values(vl, free), t)
        if hit is not None:
            return hit
    return None


# ---------------------------------------------------------------------------
# Trace dump
# ---------------------------------------------------------------------------


def dump_trace(trace: PairTrace, design: ElaboratedDesign) -> str:
    """One line per cycle per run: ``cycle run net=value:bit`` (tab-separated)."""
    tables = design.flat_tables
    lines = []
    for cfg in trace.configs:
        for run, store, live in (("L", cfg.store_l, cfg.live_l), ("R", cfg.store_r, cfg.live_r)):
            cells = [
                f"{net}=0x{store[net]:x}:{'active' if live[net] else 'dead'}"
                for net in tables.order
            ]
            lines.append("\t".join([str(cfg.cycle), run] + cells))
    return "\n".join(lines) + "\n"
