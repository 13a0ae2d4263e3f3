"""Render the proof obligations as a Horn-clause document.

The toolkit discharges its obligations internally (see :mod:`ctv.verify`);
this module renders the same obligations as constrained Horn clauses over a
product-circuit invariant so they can be inspected or handed to an external
solver.  One clause per line, prefix notation, with a header declaring the
relation signatures.  A monolithic document has exactly one ``init`` clause,
one ``cons`` clause whose transition inlines every instantiated module, and
one ``ct`` clause per sink.  A modular document keeps one body per module:
the top transition applies ``sum_<child>`` at each instantiation site, and
every instantiated module contributes its own ``cons`` clause plus the
linking clause ``inv_<m> => sum_<m>``.  The format is frozen by golden
files; structure matters, not solver compatibility.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import Annotations
from .elaborate import ElaboratedDesign, ModuleTables
from .parser import format_expr


@dataclass(frozen=True)
class HornDocument:
    text: str
    clauses: tuple[tuple[str, str], ...]  # (kind, module-or-sink)
    modular: bool

    @property
    def clause_count(self) -> int:
        return len(self.clauses)

    def count_symbol(self, symbol: str) -> int:
        return self.text.count(symbol)


def _rel_lines(name: str, tables: ModuleTables) -> list[str]:
    vals = " ".join(f"{n}:bv{tables.widths[n]}" for n in tables.order)
    bits = " ".join(f"live_{n}:bool" for n in tables.order)
    return [f"rel inv_{name} runs=2 ({vals}) ({bits}) (c:int t:int)"]


def _sum_rel_line(name: str, tables: ModuleTables) -> str:
    io = [p for p in tables.inputs] + [p for p in tables.outputs]
    vals = " ".join(f"{p}:bv{tables.widths[p]}" for p in io)
    bits = " ".join(f"live_{p}:bool" for p in io)
    return f"rel sum_{name} runs=2 ({vals}) ({bits}) (t:int)"


def _next_formula(tables: ModuleTables, sources: frozenset[str]) -> str:
    parts: list[str] = []
    if sources:
        parts.append(f"inject(t {' '.join(sorted(sources))})")
    for net in tables.order:
        if net in tables.instance_drivers:
            idrv = tables.instance_drivers[net]
            binds = " ".join(
                f".{port}({format_expr(expr)})" for port, expr in idrv.input_bindings
            )
            parts.append(f"(sum_{idrv.module} {binds} .{idrv.port}({net}) t)")
            continue
        drv = tables.drivers.get(net)
        if drv is None:
            parts.append(f"(= {net}' env)")
            continue
        value = f"keep({net})"
        bit = f"live_{net}"
        for arm in reversed(drv.arms):
            cond = " && ".join(arm.guard_sig) if arm.guard_sig else "true"
            reads = sorted(arm.ctrl_nets | arm.data_nets)
            taint = (
                "(or " + " ".join(f"live_{r}" for r in reads) + ")" if reads else "false"
            )
            value = f"(ite {cond} {format_expr(arm.rhs)} {value})"
            bit = f"(ite {cond} {taint} {bit})"
        parts.append(f"(= {net}' {value})")
        parts.append(f"(= live_{net}' {bit})")
    return " ".join(parts)


def _assumption_formulas(ann: Annotations) -> str:
    flush = " ".join(sorted(ann.assumptions.flush))
    pub = " ".join(sorted(ann.assumptions.public))
    return f"(flush{' ' if flush else ''}{flush}) (pub{' ' if pub else ''}{pub})"


def export_horn(
    design: ElaboratedDesign, ann: Annotations, modular: bool = False
) -> HornDocument:
    """Emit the verification conditions as a Horn-clause text document."""
    top_name = design.program.top
    lines: list[str] = [
        f"horn-ct v1 design={top_name} mode={'modular' if modular else 'monolithic'}"
    ]
    clauses: list[tuple[str, str]] = []
    assume = _assumption_formulas(ann)

    if modular:
        mod_tables = design.top_tables
        summarized = list(design.summary_order)
    else:
        mod_tables = design.flat_tables
        summarized = []

    lines += _rel_lines(top_name, mod_tables)
    for name in summarized:
        lines += _rel_lines(name, design.module_tables[name])
        lines.append(_sum_rel_line(name, design.module_tables[name]))

    dead = " ".join(f"(dead live_{n})" for n in mod_tables.order)
    lines.append(
        f"clause init {top_name}: {dead} {assume} => (inv_{top_name} vs 0 t)"
    )
    clauses.append(("init", top_name))

    next_top = _next_formula(mod_tables, ann.sources)
    lines.append(
        f"clause cons {top_name}: (inv_{top_name} vs c t) (next {next_top}) {assume}"
        f" => (inv_{top_name} vs' (+ c 1) t)"
    )
    clauses.append(("cons", top_name))

    for sink in sorted(ann.sinks):
        lines.append(
            f"clause ct {sink}: (inv_{top_name} vs c t) {assume}"
            f" => (= live_{sink}.l live_{sink}.r)"
        )
        clauses.append(("ct", sink))

    for name in summarized:
        tables = design.module_tables[name]
        next_m = _next_formula(tables, frozenset())
        lines.append(
            f"clause cons {name}: (inv_{name} vs c t) (next {next_m})"
            f" => (inv_{name} vs' (+ c 1) t)"
        )
        clauses.append(("cons", name))
        lines.append(f"clause sum {name}: (inv_{name} vs c t) => (sum_{name} io t)")
        clauses.append(("sum", name))

    return HornDocument(
        text="\n".join(lines) + "\n", clauses=tuple(clauses), modular=modular
    )
