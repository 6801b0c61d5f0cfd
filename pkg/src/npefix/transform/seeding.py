"""Null-check removal for fault seeding.

Removes every ``if`` whose condition is exactly ``x == null`` or
``x != null`` on a variable or field: the branch that runs when x is
non-null is inlined, the protective branch is dropped. Matching is purely
syntactic so the removal count is reproducible.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from ..minij.ast import (
    Assign, Binary, Block, CatchClause, ClassDecl, ConstructorDecl, ExprStmt,
    FieldAccess, If, MethodDecl, NullLit, ProgramAst, Return, Span, Stmt,
    Throw, Try, VarDecl, VarRef, While,
)


@dataclass
class SeedRemoval:
    span: Span
    path: str
    check_op: str  # "==" or "!="
    guarded_kind: str  # kind of the first statement under the guard


@dataclass
class SeedReport:
    removed: list[SeedRemoval] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.removed)

    def merge(self, other: "SeedReport"):
        self.removed.extend(other.removed)


def _stmt_kind(stmt: Stmt | None) -> str:
    match stmt:
        case None:
            return "empty"
        case VarDecl():
            return "decl"
        case Assign():
            return "assign"
        case ExprStmt():
            return "call"
        case Return():
            return "return"
        case Throw():
            return "throw"
        case If():
            return "if"
        case While():
            return "while"
        case Try():
            return "try"
    return "other"


def _match_null_check(stmt: Stmt) -> str | None:
    """Return the comparison operator when the statement is a null-check
    guard, else None."""
    if not isinstance(stmt, If):
        return None
    cond = stmt.cond
    if isinstance(cond, Binary) and cond.op in ("==", "!=") \
            and isinstance(cond.left, (VarRef, FieldAccess)) \
            and isinstance(cond.right, NullLit):
        return cond.op
    return None


def seed_remove_null_checks(program: ProgramAst) -> tuple[ProgramAst, SeedReport]:
    """Strip syntactic null-check guards from every method and constructor.

    Returns the seeded program (a fresh AST) and a report listing each
    removed guard. The input may be unchecked; the caller re-typechecks.
    """
    report = SeedReport()

    def seed_block(blk: Block, path: str) -> Block:
        out: list[Stmt] = []
        for s in blk.stmts:
            op = _match_null_check(s)
            if op is not None:
                assert isinstance(s, If)
                guarded = s.then_block.stmts
                report.removed.append(SeedRemoval(
                    span=s.span, path=path, check_op=op,
                    guarded_kind=_stmt_kind(guarded[0] if guarded else None)))
                kept = s.then_block if op == "!=" else s.else_block
                if kept is not None:
                    out.extend(seed_block(kept, path).stmts)
                continue
            match s:
                case If(cond=cond, then_block=tb, else_block=eb):
                    out.append(If(cond, seed_block(tb, path),
                                  None if eb is None else seed_block(eb, path),
                                  span=s.span))
                case While(cond=cond, body=body):
                    out.append(While(cond, seed_block(body, path), span=s.span))
                case Try(body=body, catches=catches, finally_block=fb):
                    new_catches = [CatchClause(c.type_name, c.var_name,
                                               seed_block(c.body, path), span=c.span)
                                   for c in catches]
                    out.append(Try(seed_block(body, path), new_catches,
                                   None if fb is None else seed_block(fb, path),
                                   span=s.span))
                case _:
                    out.append(s)
        return Block(stmts=out, span=blk.span)

    new_classes = []
    for cls in program.classes:
        new_cls = ClassDecl(
            name=cls.name, base=cls.base, is_abstract=cls.is_abstract,
            fields=[copy.deepcopy(f) for f in cls.fields],
            constructors=[ConstructorDecl(c.name, copy.deepcopy(c.params),
                                          seed_block(copy.deepcopy(c.body), cls.path),
                                          span=c.span)
                          for c in cls.constructors],
            methods=[MethodDecl(m.return_type, m.name, copy.deepcopy(m.params),
                                seed_block(copy.deepcopy(m.body), cls.path),
                                span=m.span)
                     for m in cls.methods],
            span=cls.span, path=cls.path)
        new_classes.append(new_cls)
    return ProgramAst(classes=new_classes, span=program.span), report
