"""Design elaboration: validation, driver extraction, and flattening.

Elaboration turns a parsed :class:`~ctv.ast.Program` into an
:class:`ElaboratedDesign` that every analysis shares.  Per module it checks
identifier resolution, the single-driver rule, clock discipline and port
bindings, and compiles each driven net into a list of *arms*: one entry per
reachable assignment, carrying the canonical guard text, the control nets
(nets read by enclosing branch conditions) and the data nets (nets read by
the right-hand side).  The simulator, the prover and the dependency graph all
consume these tables, so they cannot disagree about what a net depends on.

Flattening replaces instances by their bodies.  A port bound to a plain net
is aliased (the two names become one net, keeping the outermost name), so a
factored design flattens to exactly the same net names as its hand-inlined
equivalent; internal child nets get dot-separated instance prefixes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .ast import (
    Annotations,
    Assign,
    Binary,
    Block,
    Case,
    Concat,
    Const,
    Direction,
    Expression,
    If,
    Instance,
    ModuleDef,
    Mux,
    Net,
    NetKind,
    Port,
    Process,
    ProcessKind,
    Program,
    Statement,
    Unary,
    Var,
)
from .errors import AnnotationError, ElaborationError
from .parser import format_expr


# ---------------------------------------------------------------------------
# Expression widths
# ---------------------------------------------------------------------------


def expr_width(e: Expression, widths: dict[str, int]) -> int | None:
    """Width of an expression; None for unsized constants."""
    if isinstance(e, Const):
        return e.width
    if isinstance(e, Var):
        return widths[e.name]
    if isinstance(e, Unary):
        if e.op == "!":
            return 1
        return expr_width(e.operand, widths)
    if isinstance(e, Binary):
        if e.op in ("==", "!=", "<", ">", ">=", "&&", "||"):
            return 1
        lw = expr_width(e.left, widths)
        rw = expr_width(e.right, widths)
        if lw is None:
            return rw
        if rw is None:
            return lw
        return max(lw, rw)
    if isinstance(e, Concat):
        total = 0
        for p in e.parts:
            w = p and expr_width(p, widths)
            if w is None:
                raise ElaborationError("unsized constant inside concatenation")
            total += w
        return total
    if isinstance(e, Mux):
        tw = expr_width(e.if_true, widths)
        fw = expr_width(e.if_false, widths)
        if tw is None:
            return fw
        if fw is None:
            return tw
        return max(tw, fw)
    raise TypeError(f"unknown expression {e!r}")


# ---------------------------------------------------------------------------
# Drivers and arms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Arm:
    """One reachable assignment of a driven net."""

    guard_sig: tuple[str, ...]  # canonical guard text, outermost first
    ctrl_nets: frozenset[str]
    data_nets: frozenset[str]
    rhs: Expression


@dataclass(frozen=True)
class Driver:
    net: str
    clocked: bool
    arms: tuple[Arm, ...]
    fully_assigned: bool  # every path through the process assigns the net

    @property
    def ctrl_nets(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for a in self.arms:
            out |= a.ctrl_nets
        return out

    @property
    def data_nets(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for a in self.arms:
            out |= a.data_nets
        return out


@dataclass(frozen=True)
class InstanceDriver:
    """A net driven by a child instance's output port (modular view)."""

    net: str
    instance: str
    module: str
    port: str
    input_bindings: tuple[tuple[str, Expression], ...]


def _collect_arms(
    stmt: Statement,
    guards: tuple[str, ...],
    ctrl: frozenset[str],
    out: dict[str, list[Arm]],
) -> frozenset[str]:
    """Collect arms; returns nets assigned on some path through ``stmt``."""
    if isinstance(stmt, Assign):
        out.setdefault(stmt.lhs, []).append(
            Arm(guards, ctrl, stmt.rhs.reads(), stmt.rhs)
        )
        return frozenset([stmt.lhs])
    if isinstance(stmt, If):
        text = format_expr(stmt.cond)
        cond_reads = stmt.cond.reads()
        assigned = _collect_arms(stmt.then_branch, guards + (text,), ctrl | cond_reads, out)
        if stmt.else_branch is not None:
            assigned |= _collect_arms(
                stmt.else_branch, guards + (f"!({text})",), ctrl | cond_reads, out
            )
        return assigned
    if isinstance(stmt, Case):
        text = format_expr(stmt.subject)
        subject_reads = stmt.subject.reads()
        assigned: frozenset[str] = frozenset()
        for arm in stmt.arms:
            assigned |= _collect_arms(
                arm.body,
                guards + (f"{text}=={format_expr(arm.key)}",),
                ctrl | subject_reads,
                out,
            )
        if stmt.default is not None:
            assigned |= _collect_arms(
                stmt.default, guards + (f"{text}==default",), ctrl | subject_reads, out
            )
        return assigned
    if isinstance(stmt, Block):
        assigned: frozenset[str] = frozenset()
        for child in stmt.body:
            child_assigned = _collect_arms(child, guards, ctrl, out)
            overlap = assigned & child_assigned
            if overlap:
                raise ElaborationError(
                    f"net {sorted(overlap)[0]!r} may be assigned twice in one cycle"
                )
            assigned |= child_assigned
        return assigned
    raise TypeError(f"unknown statement {stmt!r}")


def _assigns_all_paths(stmt: Statement, net: str, widths: dict[str, int]) -> bool:
    if isinstance(stmt, Assign):
        return stmt.lhs == net
    if isinstance(stmt, If):
        if stmt.else_branch is None:
            return False
        return _assigns_all_paths(stmt.then_branch, net, widths) and _assigns_all_paths(
            stmt.else_branch, net, widths
        )
    if isinstance(stmt, Case):
        arms_ok = all(_assigns_all_paths(a.body, net, widths) for a in stmt.arms)
        if stmt.default is not None:
            return arms_ok and _assigns_all_paths(stmt.default, net, widths)
        width = expr_width(stmt.subject, widths)
        if width is None:
            return False
        covered = {a.key.value for a in stmt.arms}
        return arms_ok and covered >= set(range(1 << width))
    if isinstance(stmt, Block):
        return any(_assigns_all_paths(child, net, widths) for child in stmt.body)
    raise TypeError(f"unknown statement {stmt!r}")


# ---------------------------------------------------------------------------
# Per-module tables
# ---------------------------------------------------------------------------


@dataclass
class ModuleTables:
    """Everything an analysis needs to know about one module."""

    module: ModuleDef
    clock: str | None
    nets: dict[str, Net]  # clock excluded
    widths: dict[str, int]  # clock included
    inputs: tuple[str, ...]  # non-clock inputs, port order
    outputs: tuple[str, ...]
    order: tuple[str, ...]  # declaration order, clock excluded
    drivers: dict[str, Driver]
    instance_drivers: dict[str, InstanceDriver] = field(default_factory=dict)
    comb_order: tuple[str, ...] = ()
    processes_by_net: dict[str, Process] = field(default_factory=dict)
    # per-design evaluation caches (safe to key by id: this table keeps the
    # statement objects alive)
    reads_cache: dict[int, frozenset[str]] = field(default_factory=dict, repr=False)
    case_cache: dict[int, dict[int, Statement]] = field(default_factory=dict, repr=False)

    def driven_by_instance(self, net: str) -> bool:
        return net in self.instance_drivers

    def all_dep_edges(self):
        """Yield (src, dst, kind) dependency edges over this module's nets."""
        for net, drv in sorted(self.drivers.items()):
            for arm in drv.arms:
                for d in sorted(arm.data_nets):
                    yield d, net, "data"
                for c in sorted(arm.ctrl_nets):
                    yield c, net, "ctrl"


def _module_clock(m: ModuleDef, child_clock_ports: dict[str, str | None]) -> str | None:
    clocks = {p.clock for p in m.processes if p.kind == ProcessKind.CLOCKED}
    for inst in m.instances:
        child_clock = child_clock_ports.get(inst.module)
        if child_clock is None:
            continue
        bound = dict(inst.bindings).get(child_clock)
        if bound is None:
            raise ElaborationError(
                f"instance {inst.name!r}: clock port {child_clock!r} is unbound"
            )
        if not isinstance(bound, Var):
            raise ElaborationError(
                f"instance {inst.name!r}: clock port {child_clock!r} must be bound to a net"
            )
        clocks.add(bound.name)
    clocks.discard(None)
    if len(clocks) > 1:
        raise ElaborationError(
            f"module {m.name!r} mixes clocks {sorted(clocks)}; a single clock is required"
        )
    return next(iter(clocks)) if clocks else None


def _build_tables(m: ModuleDef, program: Program, clock: str | None) -> ModuleTables:
    declared = {n.name for n in m.nets}
    port_dirs = {p.name: p.direction for p in m.ports}
    widths = {n.name: n.width for n in m.nets}
    by_name = {mod.name: mod for mod in program.modules}

    def check_reads(e: Expression, where: str) -> None:
        for name in e.reads():
            if name not in declared:
                raise ElaborationError(f"{m.name}: unresolved identifier {name!r} in {where}")
            if name == clock:
                raise ElaborationError(f"{m.name}: clock {name!r} read as data in {where}")

    arm_map: dict[str, list[Arm]] = {}
    full: dict[str, bool] = {}
    clocked_for: dict[str, bool] = {}
    proc_for: dict[str, Process] = {}

    for proc in m.processes:
        collected: dict[str, list[Arm]] = {}
        assigned = _collect_arms(proc.body, (), frozenset(), collected)
        for net in assigned:
            if net not in declared:
                raise ElaborationError(f"{m.name}: assignment to undeclared net {net!r}")
            if net == clock:
                raise ElaborationError(f"{m.name}: clock {net!r} may not be assigned")
            kind = next(n.kind for n in m.nets if n.name == net)
            if proc.kind == ProcessKind.CLOCKED and kind != NetKind.REG:
                raise ElaborationError(f"{m.name}: clocked assignment target {net!r} must be a reg")
            if proc.kind != ProcessKind.CLOCKED and kind != NetKind.WIRE:
                raise ElaborationError(f"{m.name}: combinational target {net!r} must be a wire")
            if port_dirs.get(net) == Direction.INPUT:
                raise ElaborationError(f"{m.name}: input port {net!r} may not be driven")
            if net in arm_map:
                raise ElaborationError(f"{m.name}: net {net!r} has more than one driver")
            arm_map[net] = collected[net]
            is_full = _assigns_all_paths(proc.body, net, widths)
            if proc.kind != ProcessKind.CLOCKED and not is_full:
                raise ElaborationError(
                    f"{m.name}: combinational net {net!r} not assigned on every path (latch)"
                )
            full[net] = is_full
            clocked_for[net] = proc.kind == ProcessKind.CLOCKED
            proc_for[net] = proc
        for arms in collected.values():
            for arm in arms:
                check_reads(arm.rhs, f"assignment in {proc.kind.value} process")
        # condition reads were folded into ctrl_nets; validate them too
        for arms in collected.values():
            for arm in arms:
                for name in arm.ctrl_nets:
                    if name not in declared:
                        raise ElaborationError(f"{m.name}: unresolved identifier {name!r} in condition")
                    if name == clock:
                        raise ElaborationError(f"{m.name}: clock {name!r} used in a condition")

    instance_drivers: dict[str, InstanceDriver] = {}
    for inst in m.instances:
        child = by_name[inst.module]
        child_clock = _clock_port_of(child, program)
        bound_ports = dict(inst.bindings)
        for p in child.ports:
            if p.name not in bound_ports:
                raise ElaborationError(f"instance {inst.name!r}: port {p.name!r} is unbound")
        for port_name, expr in inst.bindings:
            try:
                port = child.port(port_name)
            except KeyError:
                raise ElaborationError(
                    f"instance {inst.name!r}: module {child.name!r} has no port {port_name!r}"
                ) from None
            if port_name == child_clock:
                continue
            check_reads(expr, f"binding of {inst.name}.{port_name}")
            w = expr_width(expr, widths)
            if w is not None and w != port.width:
                raise ElaborationError(
                    f"instance {inst.name!r}: port {port_name!r} is {port.width} bits, "
                    f"bound expression is {w}"
                )
            if port.direction == Direction.OUTPUT:
                if not isinstance(expr, Var):
                    raise ElaborationError(
                        f"instance {inst.name!r}: output port {port_name!r} must be bound to a net"
                    )
                net = expr.name
                if net in arm_map or net in instance_drivers:
                    raise ElaborationError(f"{m.name}: net {net!r} has more than one driver")
                if port_dirs.get(net) == Direction.INPUT:
                    raise ElaborationError(f"{m.name}: input port {net!r} may not be driven")
                instance_drivers[net] = InstanceDriver(
                    net,
                    inst.name,
                    inst.module,
                    port_name,
                    tuple(
                        (pn, ex)
                        for pn, ex in inst.bindings
                        if child.port(pn).direction == Direction.INPUT and pn != child_clock
                    ),
                )

    # undriven non-input nets are errors (dangling wires, constant regs)
    for n in m.nets:
        if n.name == clock or port_dirs.get(n.name) == Direction.INPUT:
            continue
        if n.name not in arm_map and n.name not in instance_drivers:
            raise ElaborationError(f"{m.name}: net {n.name!r} has no driver")

    drivers = {
        net: Driver(net, clocked_for[net], tuple(arms), full[net])
        for net, arms in arm_map.items()
    }

    comb_order = _comb_topo_order(m, drivers, clock)

    non_clock = [n for n in m.nets if n.name != clock]
    return ModuleTables(
        module=m,
        clock=clock,
        nets={n.name: n for n in non_clock},
        widths=widths,
        inputs=tuple(
            p.name for p in m.ports if p.direction == Direction.INPUT and p.name != clock
        ),
        outputs=tuple(p.name for p in m.ports if p.direction == Direction.OUTPUT),
        order=tuple(n.name for n in non_clock),
        drivers=drivers,
        instance_drivers=instance_drivers,
        comb_order=comb_order,
        processes_by_net=proc_for,
    )


def _clock_port_of(m: ModuleDef, program: Program) -> str | None:
    """The input port a module uses as its clock (transitively), if any."""
    by_name = {mod.name: mod for mod in program.modules}
    child_clock_ports = {}
    for mod in program.modules:
        child_clock_ports[mod.name] = None
    # modules are acyclic; resolve children-first by iterating to fixpoint
    changed = True
    while changed:
        changed = False
        for mod in program.modules:
            clock = _module_clock(mod, child_clock_ports)
            if clock != child_clock_ports[mod.name]:
                child_clock_ports[mod.name] = clock
                changed = True
    return child_clock_ports[m.name]


def _comb_topo_order(
    m: ModuleDef, drivers: dict[str, Driver], clock: str | None
) -> tuple[str, ...]:
    comb = [net for net in (n.name for n in m.nets) if net in drivers and not drivers[net].clocked]
    comb_set = set(comb)
    deps = {
        net: sorted((drivers[net].data_nets | drivers[net].ctrl_nets) & comb_set)
        for net in comb
    }
    placed: list[str] = []
    placed_set: set[str] = set()
    remaining = list(comb)
    while remaining:
        progress = False
        for net in list(remaining):
            if all(d in placed_set for d in deps[net]):
                placed.append(net)
                placed_set.add(net)
                remaining.remove(net)
                progress = True
        if not progress:
            raise ElaborationError(
                f"{m.name}: combinational cycle through {sorted(remaining)}"
            )
    return tuple(placed)


# ---------------------------------------------------------------------------
# Flattening
# ---------------------------------------------------------------------------


class _Aliases:
    """Union-find over qualified net names, keeping the outermost name."""

    def __init__(self) -> None:
        self.parent: dict[str, str] = {}

    def find(self, name: str) -> str:
        root = name
        while self.parent.get(root, root) != root:
            root = self.parent[root]
        while self.parent.get(name, name) != name:
            self.parent[name], name = root, self.parent[name]
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        # fewer dots = closer to the top; ties broken lexicographically
        keep, drop = sorted((ra, rb), key=lambda n: (n.count("."), n))
        self.parent[drop] = keep


def _rename_expr(e: Expression, rename) -> Expression:
    if isinstance(e, Const):
        return e
    if isinstance(e, Var):
        return replace(e, name=rename(e.name))
    if isinstance(e, Unary):
        return replace(e, operand=_rename_expr(e.operand, rename))
    if isinstance(e, Binary):
        return replace(e, left=_rename_expr(e.left, rename), right=_rename_expr(e.right, rename))
    if isinstance(e, Concat):
        return replace(e, parts=tuple(_rename_expr(p, rename) for p in e.parts))
    if isinstance(e, Mux):
        return replace(
            e,
            cond=_rename_expr(e.cond, rename),
            if_true=_rename_expr(e.if_true, rename),
            if_false=_rename_expr(e.if_false, rename),
        )
    raise TypeError(f"unknown expression {e!r}")


def _rename_stmt(s: Statement, rename) -> Statement:
    if isinstance(s, Assign):
        return replace(s, lhs=rename(s.lhs), rhs=_rename_expr(s.rhs, rename))
    if isinstance(s, If):
        return replace(
            s,
            cond=_rename_expr(s.cond, rename),
            then_branch=_rename_stmt(s.then_branch, rename),
            else_branch=_rename_stmt(s.else_branch, rename) if s.else_branch else None,
        )
    if isinstance(s, Case):
        from .ast import CaseArm

        return replace(
            s,
            subject=_rename_expr(s.subject, rename),
            arms=tuple(CaseArm(a.key, _rename_stmt(a.body, rename)) for a in s.arms),
            default=_rename_stmt(s.default, rename) if s.default else None,
        )
    if isinstance(s, Block):
        return replace(s, body=tuple(_rename_stmt(c, rename) for c in s.body))
    raise TypeError(f"unknown statement {s!r}")


def _flatten(program: Program) -> ModuleDef:
    by_name = {m.name: m for m in program.modules}
    aliases = _Aliases()
    net_decls: list[tuple[str, Net]] = []  # (qualified name, declared net)
    processes: list[tuple[str, Process]] = []  # (prefix, process)
    extra_assigns: list[Process] = []

    def qualify(prefix: str, name: str) -> str:
        return f"{prefix}{name}"

    def walk(module: ModuleDef, prefix: str) -> None:
        for n in module.nets:
            net_decls.append((qualify(prefix, n.name), n))
        for p in module.processes:
            processes.append((prefix, p))
        for inst in module.instances:
            child = by_name[inst.module]
            child_prefix = f"{prefix}{inst.name}."
            for port_name, expr in inst.bindings:
                port_q = qualify(child_prefix, port_name)
                if isinstance(expr, Var):
                    aliases.union(port_q, qualify(prefix, expr.name))
                else:
                    # expression-bound input: connect with a synthesized wire
                    renamed = _rename_expr(expr, lambda n: qualify(prefix, n))
                    extra_assigns.append(
                        Process(
                            ProcessKind.CONTINUOUS,
                            Assign(port_q, renamed, blocking=True),
                        )
                    )
            walk(child, child_prefix)

    top = program.top_module
    walk(top, "")

    canon = aliases.find
    # merge declarations per canonical name
    merged: dict[str, Net] = {}
    order: list[str] = []
    for qname, net in net_decls:
        cname = canon(qname)
        if cname not in merged:
            merged[cname] = Net(cname, net.kind, net.width)
            order.append(cname)
        else:
            prev = merged[cname]
            kind = NetKind.REG if NetKind.REG in (prev.kind, net.kind) else NetKind.WIRE
            merged[cname] = Net(cname, kind, prev.width)

    flat_processes: list[Process] = []
    for prefix, proc in processes:
        rename = lambda n, _p=prefix: canon(qualify(_p, n))
        body = _rename_stmt(proc.body, rename)
        clock = canon(qualify(prefix, proc.clock)) if proc.clock else None
        flat_processes.append(Process(proc.kind, body, clock=clock, loc=proc.loc))
    for proc in extra_assigns:
        assert isinstance(proc.body, Assign)
        body = Assign(canon(proc.body.lhs), _rename_expr(proc.body.rhs, canon), blocking=True)
        flat_processes.append(Process(ProcessKind.CONTINUOUS, body))

    ports = tuple(Port(p.name, p.direction, p.width) for p in top.ports)
    return ModuleDef(
        name=top.name,
        ports=ports,
        nets=tuple(merged[name] for name in order),
        processes=tuple(flat_processes),
        instances=(),
        loc=top.loc,
    )


# ---------------------------------------------------------------------------
# Elaborated design
# ---------------------------------------------------------------------------


@dataclass
class ElaboratedDesign:
    """A validated design plus the analysis tables for every view of it.

    ``flat`` is always available and is what the simulator runs; when
    ``inline`` is False the verifier and dependency graph work on
    ``top_tables`` with child instances represented by their summaries.
    Both views denote the same transition system.
    """

    program: Program
    inline: bool
    flat: ModuleDef
    flat_tables: ModuleTables
    top_tables: ModuleTables
    module_tables: dict[str, ModuleTables]
    summary_order: tuple[str, ...]  # instantiated modules, children first

    @property
    def tables(self) -> ModuleTables:
        """Tables for the analysis view selected by ``inline``."""
        return self.flat_tables if self.inline else self.top_tables

    @property
    def name(self) -> str:
        return self.program.top


def elaborate(program: Program, inline: bool = True) -> ElaboratedDesign:
    """Validate a program and build its flat and modular analysis views."""
    by_name = {m.name: m for m in program.modules}
    if program.top not in by_name:
        raise ElaborationError(f"top module {program.top!r} does not exist")

    module_tables: dict[str, ModuleTables] = {}
    for m in program.modules:
        clock = _clock_port_of(m, program)
        module_tables[m.name] = _build_tables(m, program, clock)

    flat = _flatten(program)
    flat_program = Program((flat,), flat.name)
    flat_clock = _clock_port_of(flat, flat_program)
    flat_tables = _build_tables(flat, flat_program, flat_clock)

    order: list[str] = []
    seen: set[str] = set()

    def visit(name: str) -> None:
        for inst in by_name[name].instances:
            if inst.module not in seen:
                seen.add(inst.module)
                visit(inst.module)
                order.append(inst.module)

    visit(program.top)

    return ElaboratedDesign(
        program=program,
        inline=inline,
        flat=flat,
        flat_tables=flat_tables,
        top_tables=module_tables[program.top],
        module_tables=module_tables,
        summary_order=tuple(order),
    )


# ---------------------------------------------------------------------------
# Annotation validation
# ---------------------------------------------------------------------------


def validate_annotations(design: ElaboratedDesign, ann: Annotations) -> Annotations:
    """Check annotation names against a design and return them unchanged.

    Sources and sinks must be nets of the top module; assumption and
    exclusion sets may also name flattened child nets (``inst.net``).
    """
    top = design.top_tables
    flat = design.flat_tables
    if not ann.sinks:
        raise AnnotationError("no sinks: constant-time is defined relative to at least one sink")
    for name in sorted(ann.sources | ann.sinks):
        if name not in top.nets:
            if name in flat.nets:
                raise AnnotationError(
                    f"{name!r} is not a top-level net; sources and sinks must be "
                    f"declared on the top module"
                )
            raise AnnotationError(f"unknown net {name!r} in sources/sinks")
    for name in sorted(ann.assumptions.flush | ann.assumptions.public | ann.excluded):
        if name not in flat.nets and name not in top.nets:
            raise AnnotationError(f"unknown net {name!r} in assumptions")
    overlap = ann.excluded & ann.assumptions.public
    if overlap:
        raise AnnotationError(
            f"nets {sorted(overlap)} are both excluded and assumed public"
        )
    return ann
