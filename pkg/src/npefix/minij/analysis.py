"""Dereference-site enumeration and skippability analysis.

A dereference site is a field access or method call whose receiver is an
expression other than ``this`` or a class name. Each site gets a stable
crash-point key derived from (file, byte span), which is the identity used
by the runtime for strategy bookkeeping and deployment.

A site is *unskippable* (its statement cannot be wrapped in a skip guard)
when:

* the dereference sits in an ``if``/``while`` condition,
* the statement is a declaration whose variable is read later in the
  method (guarding only the initialization would leave those reads without
  a definite value),
* the statement is a ``return``/``throw`` in a value-returning method and
  removing it would leave a path that falls off the end.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    Assign, Block, ClassDecl, ConstructorDecl, Expr, ExprStmt, FieldAccess,
    If, MethodCall, MethodDecl, NewObject, ProgramAst, Return, Stmt,
    ThisExpr, Throw, Try, Unary, Binary, VarDecl, VarRef, While,
)


def crash_key(path: str, span) -> str:
    return f"{path}@{span.start}-{span.end}"


@dataclass
class DerefSite:
    key: str
    node: Expr  # the FieldAccess / MethodCall being guarded
    receiver: Expr
    receiver_type: str
    class_name: str
    member_signature: str
    member: MethodDecl | ConstructorDecl
    stmt: Stmt
    in_condition: bool
    skippable: bool


def member_signature(cls: ClassDecl, member: MethodDecl | ConstructorDecl) -> str:
    params = ",".join(p.type_name for p in member.params)
    if isinstance(member, ConstructorDecl):
        return f"{cls.name}({params})"
    return f"{cls.name}.{member.name}({params})"


# -- definite exit ----------------------------------------------------------


def block_exits(blk: Block, exclude: Stmt | None = None) -> bool:
    """True when every path through the block returns or throws.

    ``exclude`` treats one statement as removed, which answers whether a
    return/throw has a control-flow counterpart elsewhere.
    """
    return any(_stmt_exits(s, exclude) for s in blk.stmts)


def _stmt_exits(stmt: Stmt, exclude: Stmt | None) -> bool:
    if stmt is exclude:
        return False
    match stmt:
        case Return() | Throw():
            return True
        case If(then_block=tb, else_block=eb):
            return eb is not None and block_exits(tb, exclude) \
                and block_exits(eb, exclude)
        case Try(body=body, catches=catches, finally_block=fb):
            if fb is not None and block_exits(fb, exclude):
                return True
            return block_exits(body, exclude) and all(
                block_exits(c.body, exclude) for c in catches)
        case _:
            return False


# -- expression walking -----------------------------------------------------


def _is_site(expr: Expr) -> bool:
    if isinstance(expr, FieldAccess):
        return not expr.is_static and not isinstance(expr.receiver, ThisExpr)
    if isinstance(expr, MethodCall):
        return expr.receiver is not None and not isinstance(expr.receiver, ThisExpr)
    return False


def site_nodes(expr: Expr) -> list[Expr]:
    """All dereference-site nodes inside an expression, in evaluation
    (source) order."""
    out: list[Expr] = []

    def walk(e: Expr | None):
        if e is None:
            return
        match e:
            case FieldAccess(receiver=recv):
                walk(recv)
                if _is_site(e):
                    out.append(e)
            case MethodCall(receiver=recv, args=args):
                walk(recv)
                for a in args:
                    walk(a)
                if _is_site(e):
                    out.append(e)
            case NewObject(args=args):
                for a in args:
                    walk(a)
            case Binary(left=left, right=right):
                walk(left)
                walk(right)
            case Unary(operand=operand):
                walk(operand)
            case _:
                pass

    walk(expr)
    return out


def stmt_exprs(stmt: Stmt) -> list[Expr]:
    """Top-level expressions evaluated directly by a simple statement
    (compound statements report only their conditions)."""
    match stmt:
        case VarDecl(init=init):
            return [init] if init is not None else []
        case Assign(target=target, value=value):
            return [target, value]
        case ExprStmt(expr=expr):
            return [expr]
        case Return(value=value):
            return [value] if value is not None else []
        case Throw(value=value):
            return [value]
        case If(cond=cond) | While(cond=cond):
            return [cond]
        case Try():
            return []
    return []


def is_pure_receiver(expr: Expr) -> bool:
    """Receivers that can be re-evaluated without side effects; only these
    are extracted into skip-guard pre-tests."""
    match expr:
        case VarRef():
            return True
        case ThisExpr():
            return True
        case FieldAccess(receiver=recv):
            return is_pure_receiver(recv)
        case _:
            return False


def reads_of(name: str, stmts: list[Stmt]) -> list[VarRef]:
    """VarRef reads of ``name`` anywhere below the given statements.
    Plain assignment targets are writes and do not count."""
    found: list[VarRef] = []

    def walk_expr(e: Expr | None):
        if e is None:
            return
        match e:
            case VarRef(name=n):
                if n == name:
                    found.append(e)
            case FieldAccess(receiver=recv):
                walk_expr(recv)
            case MethodCall(receiver=recv, args=args):
                walk_expr(recv)
                for a in args:
                    walk_expr(a)
            case NewObject(args=args):
                for a in args:
                    walk_expr(a)
            case Binary(left=left, right=right):
                walk_expr(left)
                walk_expr(right)
            case Unary(operand=operand):
                walk_expr(operand)
            case _:
                pass

    def walk_stmt(s: Stmt):
        match s:
            case Assign(target=target, value=value):
                if not isinstance(target, VarRef):
                    walk_expr(target)
                walk_expr(value)
            case If(cond=cond, then_block=tb, else_block=eb):
                walk_expr(cond)
                for x in tb.stmts:
                    walk_stmt(x)
                if eb is not None:
                    for x in eb.stmts:
                        walk_stmt(x)
            case While(cond=cond, body=body):
                walk_expr(cond)
                for x in body.stmts:
                    walk_stmt(x)
            case Try(body=body, catches=catches, finally_block=fb):
                for x in body.stmts:
                    walk_stmt(x)
                for c in catches:
                    for x in c.body.stmts:
                        walk_stmt(x)
                if fb is not None:
                    for x in fb.stmts:
                        walk_stmt(x)
            case _:
                for e in stmt_exprs(s):
                    walk_expr(e)

    for s in stmts:
        walk_stmt(s)
    return found


def decl_used_later(decl: VarDecl, body: Block) -> bool:
    """Is the declared variable read anywhere after the declaration?

    Works on source spans: reads strictly after the declaration's span end
    count. Synthesized nodes carry empty spans and never count.
    """
    for ref in reads_of(decl.name, body.stmts):
        if ref.span.start >= decl.span.end and ref.span.end > ref.span.start:
            return True
    return False


# -- enumeration ------------------------------------------------------------


def _stmt_skippable(stmt: Stmt, in_condition: bool, body: Block,
                    return_type: str) -> bool:
    if in_condition:
        return False
    match stmt:
        case VarDecl():
            return not decl_used_later(stmt, body)
        case Return() | Throw():
            if return_type == "void":
                return True
            return block_exits(body, exclude=stmt)
        case Assign() | ExprStmt():
            return True
        case _:
            return False


def enumerate_dereferences(program: ProgramAst) -> list[DerefSite]:
    """List every dereference site of a type-checked program, in source
    order, with its crash-point key and skippability."""
    sites: list[DerefSite] = []

    def member_sites(cls: ClassDecl, member: MethodDecl | ConstructorDecl):
        return_type = member.return_type if isinstance(member, MethodDecl) else "void"
        sig = member_signature(cls, member)
        body = member.body

        def visit_stmt(stmt: Stmt):
            match stmt:
                case If(cond=cond, then_block=tb, else_block=eb):
                    collect(cond, stmt, in_condition=True)
                    for s in tb.stmts:
                        visit_stmt(s)
                    if eb is not None:
                        for s in eb.stmts:
                            visit_stmt(s)
                case While(cond=cond, body=wbody):
                    collect(cond, stmt, in_condition=True)
                    for s in wbody.stmts:
                        visit_stmt(s)
                case Try(body=tbody, catches=catches, finally_block=fb):
                    for s in tbody.stmts:
                        visit_stmt(s)
                    for c in catches:
                        for s in c.body.stmts:
                            visit_stmt(s)
                    if fb is not None:
                        for s in fb.stmts:
                            visit_stmt(s)
                case _:
                    for e in stmt_exprs(stmt):
                        collect(e, stmt, in_condition=False)

        def collect(expr: Expr, stmt: Stmt, in_condition: bool):
            for node in site_nodes(expr):
                receiver = node.receiver  # type: ignore[union-attr]
                rtype = receiver.ty
                if rtype is None:
                    raise ValueError("enumerate_dereferences needs a type-checked AST")
                sites.append(DerefSite(
                    key=crash_key(cls.path, node.span),
                    node=node,
                    receiver=receiver,
                    receiver_type=rtype,
                    class_name=cls.name,
                    member_signature=sig,
                    member=member,
                    stmt=stmt,
                    in_condition=in_condition,
                    skippable=_stmt_skippable(stmt, in_condition, body, return_type),
                ))

        for s in body.stmts:
            visit_stmt(s)

    for cls in program.classes:
        for ctor in cls.constructors:
            member_sites(cls, ctor)
        for method in cls.methods:
            member_sites(cls, method)
    return sites
