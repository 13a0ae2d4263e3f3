"""MiniVerilog abstract syntax.

The subset is deliberately small: one implicit positive-edge clock, two-valued
logic, no memories, no delays, no parameters.  Everything a node needs for
analysis is explicit in the tree; source locations ride along for error
messages but never participate in equality (the pretty-printer round-trip
test relies on that).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Union


@dataclass(frozen=True)
class Loc:
    """1-indexed source position; (0, 0) means synthetic."""

    line: int = 0
    col: int = 0


NO_LOC = Loc()


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Expression:
    """Base class; concrete forms below."""

    def reads(self) -> frozenset[str]:
        """Names of all nets this expression reads."""
        return frozenset(_walk_reads(self))


@dataclass(frozen=True)
class Const(Expression):
    value: int
    width: int | None = None  # None: unsized decimal literal
    loc: Loc = field(default=NO_LOC, compare=False)


@dataclass(frozen=True)
class Var(Expression):
    name: str
    loc: Loc = field(default=NO_LOC, compare=False)


@dataclass(frozen=True)
class Unary(Expression):
    op: str  # '~' bitwise not, '!' logical not, '-' negate
    operand: Expression
    loc: Loc = field(default=NO_LOC, compare=False)


@dataclass(frozen=True)
class Binary(Expression):
    op: str  # & | ^ && || + - == != < > >=
    left: Expression
    right: Expression
    loc: Loc = field(default=NO_LOC, compare=False)


@dataclass(frozen=True)
class Concat(Expression):
    parts: tuple[Expression, ...]
    loc: Loc = field(default=NO_LOC, compare=False)


@dataclass(frozen=True)
class Mux(Expression):
    """Conditional expression ``cond ? if_true : if_false``.

    The selector is a data read: the taint of a mux output includes the
    selector's taint, unlike an if-statement whose condition is a control
    dependency of the assigned net.
    """

    cond: Expression
    if_true: Expression
    if_false: Expression
    loc: Loc = field(default=NO_LOC, compare=False)


def _walk_reads(e: Expression) -> Iterator[str]:
    if isinstance(e, Var):
        yield e.name
    elif isinstance(e, Unary):
        yield from _walk_reads(e.operand)
    elif isinstance(e, Binary):
        yield from _walk_reads(e.left)
        yield from _walk_reads(e.right)
    elif isinstance(e, Concat):
        for p in e.parts:
            yield from _walk_reads(p)
    elif isinstance(e, Mux):
        yield from _walk_reads(e.cond)
        yield from _walk_reads(e.if_true)
        yield from _walk_reads(e.if_false)


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Statement:
    """Base class; concrete forms below."""


@dataclass(frozen=True)
class Assign(Statement):
    lhs: str
    rhs: Expression
    blocking: bool  # '=' in combinational processes, '<=' in clocked ones
    loc: Loc = field(default=NO_LOC, compare=False)


@dataclass(frozen=True)
class If(Statement):
    cond: Expression
    then_branch: Statement
    else_branch: Statement | None = None
    loc: Loc = field(default=NO_LOC, compare=False)


@dataclass(frozen=True)
class CaseArm:
    key: Const
    body: Statement


@dataclass(frozen=True)
class Case(Statement):
    subject: Expression
    arms: tuple[CaseArm, ...]
    default: Statement | None = None
    loc: Loc = field(default=NO_LOC, compare=False)


@dataclass(frozen=True)
class Block(Statement):
    body: tuple[Statement, ...]
    loc: Loc = field(default=NO_LOC, compare=False)


# ---------------------------------------------------------------------------
# Module structure
# ---------------------------------------------------------------------------


class ProcessKind(Enum):
    CONTINUOUS = "continuous"  # assign lhs = expr;
    COMBINATIONAL = "combinational"  # always @(*)
    CLOCKED = "clocked"  # always @(posedge <clock>)


@dataclass(frozen=True)
class Process:
    kind: ProcessKind
    body: Statement
    clock: str | None = None  # net in the posedge sensitivity, clocked only
    loc: Loc = field(default=NO_LOC, compare=False)


class Direction(Enum):
    INPUT = "input"
    OUTPUT = "output"


@dataclass(frozen=True)
class Port:
    name: str
    direction: Direction
    width: int


class NetKind(Enum):
    WIRE = "wire"
    REG = "reg"


@dataclass(frozen=True)
class Net:
    name: str
    kind: NetKind
    width: int


@dataclass(frozen=True)
class Instance:
    name: str
    module: str
    bindings: tuple[tuple[str, Expression], ...]  # (port, bound expression)
    loc: Loc = field(default=NO_LOC, compare=False)


@dataclass(frozen=True)
class ModuleDef:
    name: str
    ports: tuple[Port, ...]
    nets: tuple[Net, ...]  # every declared net, ports included
    processes: tuple[Process, ...]
    instances: tuple[Instance, ...]
    loc: Loc = field(default=NO_LOC, compare=False)

    def net(self, name: str) -> Net:
        for n in self.nets:
            if n.name == name:
                return n
        raise KeyError(name)

    @property
    def net_names(self) -> tuple[str, ...]:
        return tuple(n.name for n in self.nets)

    def port(self, name: str) -> Port:
        for p in self.ports:
            if p.name == name:
                return p
        raise KeyError(name)


@dataclass(frozen=True)
class Program:
    modules: tuple[ModuleDef, ...]
    top: str

    def module(self, name: str) -> ModuleDef:
        for m in self.modules:
            if m.name == name:
                return m
        raise KeyError(name)

    @property
    def top_module(self) -> ModuleDef:
        return self.module(self.top)


# ---------------------------------------------------------------------------
# Analysis annotations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AssumptionSet:
    """Secrecy assumptions restricting which run pairs are considered.

    ``flush``: equal in both runs at the initial state only.
    ``public``: equal in both runs at every cycle.
    """

    flush: frozenset[str] = frozenset()
    public: frozenset[str] = frozenset()

    def merged(self, other: AssumptionSet) -> AssumptionSet:
        public = self.public | other.public
        return AssumptionSet(flush=(self.flush | other.flush) - public, public=public)


@dataclass(frozen=True)
class Annotations:
    """Sources and sinks of the tracked computation plus user assumptions.

    ``excluded`` is the running set of nets the user has declined to assume
    public; the assumption synthesizer never proposes them again.
    """

    sources: frozenset[str]
    sinks: frozenset[str]
    assumptions: AssumptionSet = AssumptionSet()
    excluded: frozenset[str] = frozenset()


ExpressionLike = Union[Const, Var, Unary, Binary, Concat, Mux]
StatementLike = Union[Assign, If, Case, Block]
