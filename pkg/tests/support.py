"""Shared helpers for the test suite."""

from __future__ import annotations

from npefix import names
from npefix.minij import parse, typecheck
from npefix.minij.ast import (
    Block, ExprStmt, MethodCall, ProgramAst, StringLit, Throw,
)
from npefix.runtime import prepare, run_prepared
from npefix.transform import TransformConfig, transform_all

from gen_trycatch import GenProgram

CATCH_STACK_ONLY = TransformConfig(
    enable_catch_stack=True, enable_deref_checks=False,
    enable_value_pool=False, enable_line_skip=False,
    enable_method_skip=False)


def _is_probe_marker(stmt) -> bool:
    return (isinstance(stmt, ExprStmt)
            and isinstance(stmt.expr, MethodCall)
            and stmt.expr.receiver is None and stmt.expr.name == "print"
            and len(stmt.expr.args) == 1
            and isinstance(stmt.expr.args[0], StringLit)
            and stmt.expr.args[0].value == "PROBEPOINT")


def insert_probe_before_throw(program: ProgramAst, thrown: str) -> bool:
    """Insert ``print("WILL:" + __npefix_willCatch("<thrown>"))`` between
    the PROBEPOINT marker and the probed throw that follows it. Churn-unit
    throws are not touched. Returns False when no marker exists."""
    will_catch = names.intrinsic(names.WILL_CATCH)
    probe_call = MethodCall(None, "print", [
        _concat("WILL:", MethodCall(None, will_catch, [StringLit(thrown)]))])

    def visit_block(blk: Block) -> bool:
        from npefix.minij.ast import If, Try, While
        for i, stmt in enumerate(blk.stmts):
            if _is_probe_marker(stmt):
                assert isinstance(blk.stmts[i + 1], Throw)
                blk.stmts.insert(i + 1, ExprStmt(probe_call))
                return True
            match stmt:
                case If(then_block=tb, else_block=eb):
                    if visit_block(tb) or (eb is not None and visit_block(eb)):
                        return True
                case While(body=body):
                    if visit_block(body):
                        return True
                case Try(body=body, catches=catches, finally_block=fb):
                    if visit_block(body):
                        return True
                    for c in catches:
                        if visit_block(c.body):
                            return True
                    if fb is not None and visit_block(fb):
                        return True
        return False

    for cls in program.classes:
        for member in list(cls.constructors) + list(cls.methods):
            if visit_block(member.body):
                return True
    return False


def _concat(prefix: str, expr):
    from npefix.minij.ast import Binary
    return Binary("+", StringLit(prefix), expr)


def oracle_check(gen: GenProgram) -> tuple[bool, bool] | None:
    """Returns (model prediction, actual caught) for the probed throw, or
    None when the probe did not execute."""
    program = parse(gen.text, "gen.mj")
    typecheck(program)
    instrumented = transform_all(program, CATCH_STACK_ONLY)
    assert insert_probe_before_throw(instrumented, gen.thrown)
    prepared = prepare([instrumented])
    result = run_prepared(prepared)
    probe_lines = [ln for ln in result.stdout_lines if ln.startswith("WILL:")]
    if not probe_lines:
        return None
    assert len(probe_lines) == 1, "the probe must execute exactly once"
    predicted = probe_lines[0] == "WILL:true"
    actually_caught = result.status == "normal"
    return predicted, actually_caught
