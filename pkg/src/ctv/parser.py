"""MiniVerilog concrete syntax: lexer, recursive-descent parser, printer.

Grammar (statements and declarations end in ';' except blocks):

    module NAME ( name, ... ) ;  decls  items  endmodule
    decl  := (input|output|wire|reg) [W-1:0]? name (, name)* ;
    item  := assign lhs = expr ;
           | always @(*) stmt
           | always @(posedge NAME) stmt
           | NAME inst ( .port(expr), ... ) ;
    stmt  := lhs = expr ;  |  lhs <= expr ;
           | if (expr) stmt [else stmt]
           | case (expr) K : stmt ... [default : stmt] endcase
           | begin stmt* end
    expr  := C-style precedence over  ?:  ||  &&  |  ^  &  ==/!=  </>/>=
             +/-  unary ~ ! -  with {a, b} concatenation and literals
             8'h3f / 8'd12 / 8'b0101 / bare decimal.

The printer emits a canonical form; parsing its output yields an equal tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (
    Annotations,
    Assign,
    AssumptionSet,
    Binary,
    Block,
    Case,
    CaseArm,
    Concat,
    Const,
    Direction,
    Expression,
    If,
    Instance,
    Loc,
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
from .errors import AnnotationError, ParseError

KEYWORDS = {
    "module",
    "endmodule",
    "input",
    "output",
    "wire",
    "reg",
    "assign",
    "always",
    "posedge",
    "if",
    "else",
    "case",
    "endcase",
    "default",
    "begin",
    "end",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<sized>\d+'[hbd][0-9a-fA-F_]+)
  | (?P<num>\d+)
  | (?P<id>[A-Za-z_][A-Za-z0-9_.$]*)
  | (?P<op><=|==|!=|>=|&&|\|\||@|\(|\)|\[|\]|\{|\}|<|>|=|\+|-|\^|&|\||~|!|\?|:|;|,|\.|\*)
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'id', 'num', 'sized', 'op', 'eof'
    text: str
    line: int
    col: int


def _lex(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            col = pos - line_start + 1
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup or ""
        tok_text = m.group()
        col = pos - line_start + 1
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, tok_text, line, col))
        newlines = tok_text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + tok_text.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, n - line_start + 1))
    return tokens


def _parse_sized_literal(text: str, line: int, col: int) -> Const:
    width_s, rest = text.split("'", 1)
    base, digits = rest[0], rest[1:].replace("_", "")
    width = int(width_s)
    try:
        value = int(digits, {"h": 16, "d": 10, "b": 2}[base])
    except ValueError:
        raise ParseError(f"bad literal {text!r}", line, col) from None
    if width <= 0 or value >= (1 << width):
        raise ParseError(f"literal {text!r} does not fit its width", line, col)
    return Const(value, width, Loc(line, col))


class _Parser:
    def __init__(self, text: str):
        self.tokens = _lex(text)
        self.i = 0

    # -- token helpers ------------------------------------------------

    @property
    def cur(self) -> Token:
        return self.tokens[self.i]

    def _advance(self) -> Token:
        tok = self.cur
        self.i += 1
        return tok

    def _fail(self, message: str) -> ParseError:
        return ParseError(message, self.cur.line, self.cur.col)

    def _expect(self, text: str) -> Token:
        if self.cur.text != text:
            raise self._fail(f"expected {text!r}, found {self.cur.text!r}")
        return self._advance()

    def _expect_name(self) -> Token:
        tok = self.cur
        if tok.kind != "id" or tok.text in KEYWORDS:
            raise self._fail(f"expected identifier, found {tok.text!r}")
        return self._advance()

    def _at(self, text: str) -> bool:
        return self.cur.text == text

    # -- program ------------------------------------------------------

    def parse_program(self) -> Program:
        modules: list[ModuleDef] = []
        while not self._at(""):
            if self.cur.kind == "eof":
                break
            modules.append(self._module())
        if not modules:
            raise self._fail("no modules in input")
        names = [m.name for m in modules]
        for name in names:
            if names.count(name) > 1:
                raise ParseError(f"duplicate module {name!r}")
        top = _pick_top(modules)
        _check_instantiations(modules)
        return Program(tuple(modules), top)

    def _module(self) -> ModuleDef:
        loc = Loc(self.cur.line, self.cur.col)
        self._expect("module")
        name = self._expect_name().text
        self._expect("(")
        port_names: list[str] = []
        if not self._at(")"):
            port_names.append(self._expect_name().text)
            while self._at(","):
                self._advance()
                port_names.append(self._expect_name().text)
        self._expect(")")
        self._expect(";")

        directions: dict[str, Direction] = {}
        widths: dict[str, int] = {}
        kinds: dict[str, NetKind] = {}
        order: list[str] = []
        processes: list[Process] = []
        instances: list[Instance] = []

        def declare(name_tok: Token, kind: NetKind | None, direction: Direction | None, width: int) -> None:
            net = name_tok.text
            if direction is not None:
                if net in directions:
                    raise ParseError(f"duplicate direction for {net!r}", name_tok.line, name_tok.col)
                if net not in port_names:
                    raise ParseError(f"{net!r} declared {direction.value} but not a port", name_tok.line, name_tok.col)
                directions[net] = direction
            if kind is not None:
                if net in kinds:
                    raise ParseError(f"duplicate declaration of {net!r}", name_tok.line, name_tok.col)
                kinds[net] = kind
            if net in widths and widths[net] != width:
                raise ParseError(f"conflicting widths for {net!r}", name_tok.line, name_tok.col)
            widths[net] = width
            if net not in order:
                order.append(net)

        while self.cur.text in ("input", "output", "wire", "reg"):
            kw = self._advance().text
            width = self._opt_width()
            while True:
                tok = self._expect_name()
                if kw == "input":
                    declare(tok, None, Direction.INPUT, width)
                elif kw == "output":
                    declare(tok, None, Direction.OUTPUT, width)
                else:
                    declare(tok, NetKind.WIRE if kw == "wire" else NetKind.REG, None, width)
                if not self._at(","):
                    break
                self._advance()
            self._expect(";")

        for p in port_names:
            if p not in directions:
                raise self._fail(f"port {p!r} has no input/output declaration")

        while not self._at("endmodule"):
            if self._at("assign"):
                processes.append(self._continuous())
            elif self._at("always"):
                processes.append(self._always())
            elif self.cur.kind == "id" and self.cur.text not in KEYWORDS:
                instances.append(self._instance())
            else:
                raise self._fail(f"expected module item, found {self.cur.text!r}")
        self._expect("endmodule")

        nets = tuple(
            Net(n, kinds.get(n, NetKind.WIRE), widths[n])
            for n in order
        )
        ports = tuple(
            Port(p, directions[p], widths[p])
            for p in port_names
        )
        return ModuleDef(name, ports, nets, tuple(processes), tuple(instances), loc)

    def _opt_width(self) -> int:
        if not self._at("["):
            return 1
        self._advance()
        hi_tok = self.cur
        if hi_tok.kind != "num":
            raise self._fail("expected width bound")
        hi = int(self._advance().text)
        self._expect(":")
        lo_tok = self.cur
        if lo_tok.kind != "num" or int(lo_tok.text) != 0:
            raise ParseError("width must be of the form [W-1:0]", lo_tok.line, lo_tok.col)
        self._advance()
        self._expect("]")
        return hi + 1

    # -- module items ---------------------------------------------------

    def _continuous(self) -> Process:
        loc = Loc(self.cur.line, self.cur.col)
        self._expect("assign")
        lhs = self._expect_name().text
        self._expect("=")
        rhs = self._expr()
        self._expect(";")
        return Process(ProcessKind.CONTINUOUS, Assign(lhs, rhs, blocking=True, loc=loc), loc=loc)

    def _always(self) -> Process:
        loc = Loc(self.cur.line, self.cur.col)
        self._expect("always")
        self._expect("@")
        self._expect("(")
        if self._at("*"):
            self._advance()
            self._expect(")")
            body = self._stmt(clocked=False)
            return Process(ProcessKind.COMBINATIONAL, body, loc=loc)
        if self.cur.text == "posedge":
            self._advance()
            clock = self._expect_name().text
            self._expect(")")
            body = self._stmt(clocked=True)
            return Process(ProcessKind.CLOCKED, body, clock=clock, loc=loc)
        raise self._fail("expected posedge or * in sensitivity list")

    def _instance(self) -> Instance:
        loc = Loc(self.cur.line, self.cur.col)
        module = self._expect_name().text
        name = self._expect_name().text
        self._expect("(")
        bindings: list[tuple[str, Expression]] = []
        if not self._at(")"):
            while True:
                self._expect(".")
                port = self._expect_name().text
                self._expect("(")
                expr = self._expr()
                self._expect(")")
                bindings.append((port, expr))
                if not self._at(","):
                    break
                self._advance()
        self._expect(")")
        self._expect(";")
        seen = [p for p, _ in bindings]
        for p in seen:
            if seen.count(p) > 1:
                raise ParseError(f"port {p!r} bound twice on instance {name!r}", loc.line, loc.col)
        return Instance(name, module, tuple(bindings), loc)

    # -- statements -----------------------------------------------------

    def _stmt(self, clocked: bool) -> Statement:
        loc = Loc(self.cur.line, self.cur.col)
        if self._at("begin"):
            self._advance()
            body: list[Statement] = []
            while not self._at("end"):
                body.append(self._stmt(clocked))
            self._expect("end")
            return Block(tuple(body), loc)
        if self._at("if"):
            self._advance()
            self._expect("(")
            cond = self._expr()
            self._expect(")")
            then_branch = self._stmt(clocked)
            else_branch = None
            if self._at("else"):
                self._advance()
                else_branch = self._stmt(clocked)
            return If(cond, then_branch, else_branch, loc)
        if self._at("case"):
            self._advance()
            self._expect("(")
            subject = self._expr()
            self._expect(")")
            arms: list[CaseArm] = []
            default: Statement | None = None
            while not self._at("endcase"):
                if self._at("default"):
                    self._advance()
                    self._expect(":")
                    if default is not None:
                        raise self._fail("duplicate default arm")
                    default = self._stmt(clocked)
                else:
                    key = self._primary()
                    if not isinstance(key, Const):
                        raise self._fail("case keys must be constants")
                    self._expect(":")
                    arms.append(CaseArm(key, self._stmt(clocked)))
            self._expect("endcase")
            keys = [a.key.value for a in arms]
            for k in keys:
                if keys.count(k) > 1:
                    raise ParseError(f"duplicate case key {k}", loc.line, loc.col)
            return Case(subject, tuple(arms), default, loc)
        lhs = self._expect_name().text
        if self._at("<="):
            self._advance()
            blocking = False
        elif self._at("="):
            self._advance()
            blocking = True
        else:
            raise self._fail("expected '=' or '<=' after assignment target")
        rhs = self._expr()
        self._expect(";")
        if clocked and blocking:
            raise ParseError(f"clocked assignment to {lhs!r} must use '<='", loc.line, loc.col)
        if not clocked and not blocking:
            raise ParseError(f"combinational assignment to {lhs!r} must use '='", loc.line, loc.col)
        return Assign(lhs, rhs, blocking, loc)

    # -- expressions ------------------------------------------------------
    # Precedence, loose to tight: ?:  ||  &&  |  ^  &  ==/!=  </>/>=  +/-  unary

    def _expr(self) -> Expression:
        return self._ternary()

    def _ternary(self) -> Expression:
        cond = self._logic_or()
        if self._at("?"):
            loc = Loc(self.cur.line, self.cur.col)
            self._advance()
            if_true = self._ternary()
            self._expect(":")
            if_false = self._ternary()
            return Mux(cond, if_true, if_false, loc)
        return cond

    def _binary_level(self, ops: tuple[str, ...], next_level) -> Expression:
        left = next_level()
        while self.cur.text in ops:
            loc = Loc(self.cur.line, self.cur.col)
            op = self._advance().text
            right = next_level()
            left = Binary(op, left, right, loc)
        return left

    def _logic_or(self) -> Expression:
        return self._binary_level(("||",), self._logic_and)

    def _logic_and(self) -> Expression:
        return self._binary_level(("&&",), self._bit_or)

    def _bit_or(self) -> Expression:
        return self._binary_level(("|",), self._bit_xor)

    def _bit_xor(self) -> Expression:
        return self._binary_level(("^",), self._bit_and)

    def _bit_and(self) -> Expression:
        return self._binary_level(("&",), self._equality)

    def _equality(self) -> Expression:
        return self._binary_level(("==", "!="), self._relational)

    def _relational(self) -> Expression:
        return self._binary_level(("<", ">", ">="), self._additive)

    def _additive(self) -> Expression:
        return self._binary_level(("+", "-"), self._unary)

    def _unary(self) -> Expression:
        if self.cur.text in ("~", "!", "-"):
            loc = Loc(self.cur.line, self.cur.col)
            op = self._advance().text
            return Unary(op, self._unary(), loc)
        return self._primary()

    def _primary(self) -> Expression:
        tok = self.cur
        loc = Loc(tok.line, tok.col)
        if tok.kind == "sized":
            self._advance()
            return _parse_sized_literal(tok.text, tok.line, tok.col)
        if tok.kind == "num":
            self._advance()
            return Const(int(tok.text), None, loc)
        if tok.kind == "id" and tok.text not in KEYWORDS:
            self._advance()
            return Var(tok.text, loc)
        if self._at("("):
            self._advance()
            inner = self._expr()
            self._expect(")")
            return inner
        if self._at("{"):
            self._advance()
            parts = [self._expr()]
            while self._at(","):
                self._advance()
                parts.append(self._expr())
            self._expect("}")
            return Concat(tuple(parts), loc)
        raise self._fail(f"expected expression, found {tok.text!r}")


def _pick_top(modules: list[ModuleDef]) -> str:
    instantiated = {inst.module for m in modules for inst in m.instances}
    roots = [m.name for m in modules if m.name not in instantiated]
    if not roots:
        raise ParseError("instantiation cycle: no root module")
    return roots[-1]


def _check_instantiations(modules: list[ModuleDef]) -> None:
    by_name = {m.name: m for m in modules}
    for m in modules:
        for inst in m.instances:
            if inst.module not in by_name:
                raise ParseError(f"instance {inst.name!r} references unknown module {inst.module!r}")
    # depth-first cycle check over the instantiation graph
    state: dict[str, int] = {}  # 1 = on stack, 2 = done

    def visit(name: str, chain: tuple[str, ...]) -> None:
        if state.get(name) == 2:
            return
        if state.get(name) == 1:
            raise ParseError("recursive module instantiation: " + " -> ".join(chain + (name,)))
        state[name] = 1
        for inst in by_name[name].instances:
            visit(inst.module, chain + (name,))
        state[name] = 2

    for m in modules:
        visit(m.name, ())


def parse_program(text: str) -> Program:
    """Parse MiniVerilog source into a structurally checked :class:`Program`.

    The top module is the one no other module instantiates (the last such
    module if several are roots).  Identifier resolution, driver uniqueness
    and widths are checked later by :func:`ctv.elaborate.elaborate`.
    """
    return _Parser(text).parse_program()


# ---------------------------------------------------------------------------
# Pretty printer
# ---------------------------------------------------------------------------

_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4,
    "&": 5,
    "==": 6,
    "!=": 6,
    "<": 7,
    ">": 7,
    ">=": 7,
    "+": 8,
    "-": 8,
}


def format_expr(e: Expression, parent_prec: int = 0) -> str:
    if isinstance(e, Const):
        if e.width is None:
            return str(e.value)
        digits = max(1, (e.width + 3) // 4)
        return f"{e.width}'h{e.value:0{digits}x}"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        return f"{e.op}{format_expr(e.operand, 99)}"
    if isinstance(e, Binary):
        prec = _PRECEDENCE[e.op]
        text = f"{format_expr(e.left, prec)} {e.op} {format_expr(e.right, prec + 1)}"
        return f"({text})" if prec < parent_prec else text
    if isinstance(e, Concat):
        return "{" + ", ".join(format_expr(p) for p in e.parts) + "}"
    if isinstance(e, Mux):
        text = f"{format_expr(e.cond, 1)} ? {format_expr(e.if_true)} : {format_expr(e.if_false)}"
        return f"({text})" if parent_prec > 0 else text
    raise TypeError(f"unknown expression {e!r}")


def _format_stmt(s: Statement, indent: int) -> list[str]:
    pad = "  " * indent
    if isinstance(s, Assign):
        op = "=" if s.blocking else "<="
        return [f"{pad}{s.lhs} {op} {format_expr(s.rhs)};"]
    if isinstance(s, If):
        lines = [f"{pad}if ({format_expr(s.cond)})"]
        lines += _format_stmt(s.then_branch, indent + 1)
        if s.else_branch is not None:
            lines.append(f"{pad}else")
            lines += _format_stmt(s.else_branch, indent + 1)
        return lines
    if isinstance(s, Case):
        lines = [f"{pad}case ({format_expr(s.subject)})"]
        for arm in s.arms:
            lines.append(f"{pad}  {format_expr(arm.key)}:")
            lines += _format_stmt(arm.body, indent + 2)
        if s.default is not None:
            lines.append(f"{pad}  default:")
            lines += _format_stmt(s.default, indent + 2)
        lines.append(f"{pad}endcase")
        return lines
    if isinstance(s, Block):
        lines = [f"{pad}begin"]
        for child in s.body:
            lines += _format_stmt(child, indent + 1)
        lines.append(f"{pad}end")
        return lines
    raise TypeError(f"unknown statement {s!r}")


def pretty_print(program: Program) -> str:
    """Render a program back to canonical MiniVerilog source."""
    out: list[str] = []
    for m in program.modules:
        out.append(f"module {m.name}({', '.join(p.name for p in m.ports)});")
        for p in m.ports:
            w = f" [{p.width - 1}:0]" if p.width > 1 else ""
            out.append(f"  {p.direction.value}{w} {p.name};")
        port_names = {p.name for p in m.ports}
        for n in m.nets:
            explicit_kind = n.kind == NetKind.REG or n.name not in port_names
            if explicit_kind:
                w = f" [{n.width - 1}:0]" if n.width > 1 else ""
                out.append(f"  {n.kind.value}{w} {n.name};")
        for proc in m.processes:
            if proc.kind == ProcessKind.CONTINUOUS:
                assert isinstance(proc.body, Assign)
                out.append(f"  assign {proc.body.lhs} = {format_expr(proc.body.rhs)};")
            elif proc.kind == ProcessKind.COMBINATIONAL:
                out.append("  always @(*)")
                out += _format_stmt(proc.body, 2)
            elif proc.kind == ProcessKind.CLOCKED:
                out.append(f"  always @(posedge {proc.clock})")
                out += _format_stmt(proc.body, 2)
        for inst in m.instances:
            binds = ", ".join(f".{p}({format_expr(e)})" for p, e in inst.bindings)
            out.append(f"  {inst.module} {inst.name}({binds});")
        out.append("endmodule")
        out.append("")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# Annotation documents
# ---------------------------------------------------------------------------

_ANNOTATION_KEYS = ("sources", "sinks", "flush", "public", "excluded")


def parse_annotations(text: str) -> Annotations:
    """Parse the plain-text annotation document.

    One section per line, ``key: name name ...`` with the fixed keys
    ``sources``, ``sinks``, ``flush``, ``public``, ``excluded``.  Missing
    sections default to empty; '#' starts a comment.
    """
    sections: dict[str, frozenset[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise AnnotationError(f"line {lineno}: expected 'key: names...'")
        key, _, rest = line.partition(":")
        key = key.strip()
        if key not in _ANNOTATION_KEYS:
            raise AnnotationError(f"line {lineno}: unknown section {key!r}")
        if key in sections:
            raise AnnotationError(f"line {lineno}: duplicate section {key!r}")
        sections[key] = frozenset(rest.split())
    return Annotations(
        sources=sections.get("sources", frozenset()),
        sinks=sections.get("sinks", frozenset()),
        assumptions=AssumptionSet(
            flush=sections.get("flush", frozenset()),
            public=sections.get("public", frozenset()),
        ),
        excluded=sections.get("excluded", frozenset()),
    )


def format_annotations(ann: Annotations) -> str:
    """Render annotations back to the document format."""
    def fmt(names: frozenset[str]) -> str:
        return " ".join(sorted(names))

    return "\n".join(
        [
            f"sources: {fmt(ann.sources)}",
            f"sinks: {fmt(ann.sinks)}",
            f"flush: {fmt(ann.assumptions.flush)}",
            f"public: {fmt(ann.assumptions.public)}",
            f"excluded: {fmt(ann.excluded)}",
            "",
        ]
    )
