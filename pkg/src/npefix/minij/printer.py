"""Pretty-printer emitting compilable MiniJ text.

print_program(parse(x)) re-parses to a structurally identical AST, which is
the round-trip contract the frontend tests pin down.
"""

from __future__ import annotations

from .ast import (
    Assign, Binary, Block, BoolLit, ClassDecl, Expr, ExprStmt, FieldAccess,
    If, IntLit, MethodCall, NewObject, NullLit, ProgramAst, Return,
    SourceUnit, Stmt, StringLit, ThisExpr, Throw, Try, Unary, VarDecl,
    VarRef, While,
)
from .lexer import escape_string

INDENT = "    "

# Precedence table mirrors the parser's climbing order.
_PREC = {
    "||": 1, "&&": 2, "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5, "*": 6, "/": 6, "%": 6,
}
_UNARY_PREC = 7


def expr_text(expr: Expr) -> str:
    return _expr(expr, 0)


def _expr(expr: Expr, parent_prec: int) -> str:
    match expr:
        case IntLit(value=v):
            return str(v)
        case BoolLit(value=v):
            return "true" if v else "false"
        case StringLit(value=v):
            return f'"{escape_string(v)}"'
        case NullLit():
            return "null"
        case ThisExpr():
            return "this"
        case VarRef(name=name):
            return name
        case FieldAccess(receiver=recv, name=name):
            return f"{_expr(recv, _UNARY_PREC + 1)}.{name}"
        case MethodCall(receiver=recv, name=name, args=args):
            arg_text = ", ".join(_expr(a, 0) for a in args)
            if recv is None:
                return f"{name}({arg_text})"
            return f"{_expr(recv, _UNARY_PREC + 1)}.{name}({arg_text})"
        case NewObject(type_name=tname, args=args):
            arg_text = ", ".join(_expr(a, 0) for a in args)
            return f"new {tname}({arg_text})"
        case Unary(op=op, operand=operand):
            text = f"{op}{_expr(operand, _UNARY_PREC)}"
            return f"({text})" if parent_prec > _UNARY_PREC else text
        case Binary(op=op, left=left, right=right):
            prec = _PREC[op]
            # Left-associative: right child needs one level more.
            text = f"{_expr(left, prec)} {op} {_expr(right, prec + 1)}"
            return f"({text})" if parent_prec > prec else text
    raise TypeError(f"unknown expression node: {expr!r}")


def stmt_lines(stmt: Stmt, depth: int = 0) -> list[str]:
    pad = INDENT * depth
    match stmt:
        case VarDecl(type_name=t, name=n, init=init):
            if init is None:
                return [f"{pad}{t} {n};"]
            return [f"{pad}{t} {n} = {expr_text(init)};"]
        case Assign(target=target, value=value):
            return [f"{pad}{expr_text(target)} = {expr_text(value)};"]
        case ExprStmt(expr=expr):
            return [f"{pad}{expr_text(expr)};"]
        case Return(value=value):
            if value is None:
                return [f"{pad}return;"]
            return [f"{pad}return {expr_text(value)};"]
        case Throw(value=value):
            return [f"{pad}throw {expr_text(value)};"]
        case If(cond=cond, then_block=then_block, else_block=else_block):
            lines = [f"{pad}if ({expr_text(cond)}) {{"]
            lines += block_lines(then_block, depth + 1)
            if else_block is None:
                lines.append(f"{pad}}}")
            else:
                lines.append(f"{pad}}} else {{")
                lines += block_lines(else_block, depth + 1)
                lines.append(f"{pad}}}")
            return lines
        case While(cond=cond, body=body):
            lines = [f"{pad}while ({expr_text(cond)}) {{"]
            lines += block_lines(body, depth + 1)
            lines.append(f"{pad}}}")
            return lines
        case Try(body=body, catches=catches, finally_block=finally_block):
            lines = [f"{pad}try {{"]
            lines += block_lines(body, depth + 1)
            for clause in catches:
                lines.append(f"{pad}}} catch ({clause.type_name} {clause.var_name}) {{")
                lines += block_lines(clause.body, depth + 1)
            if finally_block is not None:
                lines.append(f"{pad}}} finally {{")
                lines += block_lines(finally_block, depth + 1)
            lines.append(f"{pad}}}")
            return lines
    raise TypeError(f"unknown statement node: {stmt!r}")


def stmt_text(stmt: Stmt, depth: int = 0) -> str:
    return "\n".join(stmt_lines(stmt, depth))


def block_lines(block: Block, depth: int) -> list[str]:
    lines: list[str] = []
    for stmt in block.stmts:
        lines += stmt_lines(stmt, depth)
    return lines


def class_lines(decl: ClassDecl) -> list[str]:
    head = "abstract class" if decl.is_abstract else "class"
    extends = f" extends {decl.base}" if decl.base else ""
    lines = [f"{head} {decl.name}{extends} {{"]
    for f in decl.fields:
        static = "static " if f.is_static else ""
        init = f" = {expr_text(f.init)}" if f.init is not None else ""
        lines.append(f"{INDENT}{static}{f.type_name} {f.name}{init};")
    for ctor in decl.constructors:
        params = ", ".join(f"{p.type_name} {p.name}" for p in ctor.params)
        lines.append(f"{INDENT}{decl.name}({params}) {{")
        lines += block_lines(ctor.body, 2)
        lines.append(f"{INDENT}}}")
    for m in decl.methods:
        params = ", ".join(f"{p.type_name} {p.name}" for p in m.params)
        lines.append(f"{INDENT}{m.return_type} {m.name}({params}) {{")
        lines += block_lines(m.body, 2)
        lines.append(f"{INDENT}}}")
    lines.append("}")
    return lines


def print_program(program: ProgramAst, path: str = "<printed>") -> SourceUnit:
    """Emit the program as MiniJ text. The result re-parses to an AST
    structurally equal to the input."""
    lines: list[str] = []
    for decl in program.classes:
        lines += class_lines(decl)
        lines.append("")
    return SourceUnit(path, "\n".join(lines))
