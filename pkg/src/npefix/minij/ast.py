"""AST node definitions for MiniJ.

Node equality is structural: spans and analysis annotations are excluded
from comparison, so ``parse(print(ast)) == ast`` holds whenever the printed
text re-parses to the same structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    """Byte-offset range [start, end) into the source text of one unit."""

    start: int
    end: int


NO_SPAN = Span(0, 0)


@dataclass
class SourceUnit:
    path: str
    text: str

    def line_col(self, offset: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, offset) + 1
        last_nl = self.text.rfind("\n", 0, offset)
        return line, offset - last_nl

    def snippet(self, span: Span) -> str:
        return self.text[span.start:span.end]


def _span_field() -> Span:
    return NO_SPAN


@dataclass
class Node:
    span: Span = field(default_factory=_span_field, compare=False, repr=False, kw_only=True)


# --- expressions -----------------------------------------------------------


@dataclass
class Expr(Node):
    # Static type name, filled in by the type checker ("int", "bool",
    # "string", "null", "void" or a class name).
    ty: str | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass
class IntLit(Expr):
    value: int = 0


@dataclass
class BoolLit(Expr):
    value: bool = False


@dataclass
class StringLit(Expr):
    value: str = ""


@dataclass
class NullLit(Expr):
    pass


@dataclass
class ThisExpr(Expr):
    pass


@dataclass
class VarRef(Expr):
    name: str = ""
    # Resolution kind: "local", "param", "field" (implicit this), "static"
    # (unqualified static of the current class), or "class" (type name used
    # as a static qualifier). Set by the type checker.
    binding: str | None = field(default=None, compare=False, repr=False, kw_only=True)
    owner: str | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass
class FieldAccess(Expr):
    receiver: Expr = None  # type: ignore[assignment]
    name: str = ""
    # True when the receiver is a class name (static field access).
    is_static: bool = field(default=False, compare=False, repr=False, kw_only=True)
    owner: str | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass
class MethodCall(Expr):
    receiver: Expr | None = None
    name: str = ""
    args: list[Expr] = field(default_factory=list)
    # For receiver-less calls: "builtin", "intrinsic" or "this_method".
    binding: str | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass
class NewObject(Expr):
    type_name: str = ""
    args: list[Expr] = field(default_factory=list)


@dataclass
class Binary(Expr):
    op: str = ""
    left: Expr = None  # type: ignore[assignment]
    right: Expr = None  # type: ignore[assignment]


@dataclass
class Unary(Expr):
    op: str = ""
    operand: Expr = None  # type: ignore[assignment]


# --- statements ------------------------------------------------------------


@dataclass
class Stmt(Node):
    pass


@dataclass
class Block(Node):
    stmts: list[Stmt] = field(default_factory=list)


@dataclass
class VarDecl(Stmt):
    type_name: str = ""
    name: str = ""
    init: Expr | None = None


@dataclass
class Assign(Stmt):
    target: Expr = None  # type: ignore[assignment]
    value: Expr = None  # type: ignore[assignment]


@dataclass
class ExprStmt(Stmt):
    expr: Expr = None  # type: ignore[assignment]


@dataclass
class If(Stmt):
    cond: Expr = None  # type: ignore[assignment]
    then_block: Block = None  # type: ignore[assignment]
    else_block: Block | None = None


@dataclass
class While(Stmt):
    cond: Expr = None  # type: ignore[assignment]
    body: Block = None  # type: ignore[assignment]


@dataclass
class Return(Stmt):
    value: Expr | None = None


@dataclass
class Throw(Stmt):
    value: Expr = None  # type: ignore[assignment]


@dataclass
class CatchClause(Node):
    type_name: str = ""
    var_name: str = ""
    body: Block = None  # type: ignore[assignment]


@dataclass
class Try(Stmt):
    body: Block = None  # type: ignore[assignment]
    catches: list[CatchClause] = field(default_factory=list)
    finally_block: Block | None = None


# --- declarations ----------------------------------------------------------


@dataclass
class Param(Node):
    type_name: str = ""
    name: str = ""


@dataclass
class FieldDecl(Node):
    is_static: bool = False
    type_name: str = ""
    name: str = ""
    init: Expr | None = None


@dataclass
class ConstructorDecl(Node):
    name: str = ""
    params: list[Param] = field(default_factory=list)
    body: Block = None  # type: ignore[assignment]


@dataclass
class MethodDecl(Node):
    return_type: str = "void"
    name: str = ""
    params: list[Param] = field(default_factory=list)
    body: Block = None  # type: ignore[assignment]


@dataclass
class ClassDecl(Node):
    name: str = ""
    base: str | None = None
    is_abstract: bool = False
    fields: list[FieldDecl] = field(default_factory=list)
    constructors: list[ConstructorDecl] = field(default_factory=list)
    methods: list[MethodDecl] = field(default_factory=list)
    # Source file the class came from; lets multi-file programs keep
    # per-file identity after merging.
    path: str = field(default="<memory>", compare=False, kw_only=True)


@dataclass
class ProgramAst(Node):
    classes: list[ClassDecl] = field(default_factory=list)


def combine(*programs: ProgramAst) -> ProgramAst:
    """Merge several parsed units into one program."""
    classes: list[ClassDecl] = []
    for p in programs:
        classes.extend(p.classes)
    return ProgramAst(classes=classes)


PRIMITIVES = ("int", "bool", "string")


def is_primitive(name: str) -> bool:
    return name in PRIMITIVES


def default_value_literal(type_name: str) -> Expr:
    """Manufactured default for a declared type (0, false, "" or null)."""
    if type_name == "int":
        return IntLit(0)
    if type_name == "bool":
        return BoolLit(False)
    if type_name == "string":
        return StringLit("")
    return NullLit()
