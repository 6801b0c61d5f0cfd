"""High-level execution: parse, instrument, run, in one place.

A "program" here may span several source units (application files plus an
uninstrumented driver, as in the seeding experiments); instrumentation is
applied per unit group before merging.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .. import names
from ..minij import combine, parse
from ..minij.ast import Block, Expr, MethodCall, ProgramAst, SourceUnit, StringLit
from ..minij.typecheck import TypeTable, find_entry_class, typecheck
from ..transform import TransformConfig, is_instrumented, transform_all
from .controller import RepairController
from .interpreter import ExecutionResult, Interpreter, MAX_STEPS
from .pool import DEFAULT_DEPTH_BUDGET
from .strategies import Strategy


def load_unit(path: str | Path) -> SourceUnit:
    p = Path(path)
    return SourceUnit(str(p), p.read_text(encoding="utf-8"))


def walk_calls(program: ProgramAst):
    """Yield every MethodCall node in the program."""

    def from_expr(e: Expr | None):
        if e is None:
            return
        for child in _expr_children(e):
            yield from from_expr(child)
        if isinstance(e, MethodCall):
            yield e

    def from_block(blk: Block):
        from ..minij.ast import (
            Assign, ExprStmt, If, Return, Throw, Try, VarDecl, While,
        )
        for s in blk.stmts:
            match s:
                case VarDecl(init=init):
                    yield from from_expr(init)
                case Assign(target=target, value=value):
                    yield from from_expr(target)
                    yield from from_expr(value)
                case ExprStmt(expr=e):
                    yield from from_expr(e)
                case Return(value=value):
                    yield from from_expr(value)
                case Throw(value=value):
                    yield from from_expr(value)
                case If(cond=cond, then_block=tb, else_block=eb):
                    yield from from_expr(cond)
                    yield from from_block(tb)
                    if eb is not None:
                        yield from from_block(eb)
                case While(cond=cond, body=body):
                    yield from from_expr(cond)
                    yield from from_block(body)
                case Try(body=body, catches=catches, finally_block=fb):
                    yield from from_block(body)
                    for c in catches:
                        yield from from_block(c.body)
                    if fb is not None:
                        yield from from_block(fb)

    for cls in program.classes:
        for f in cls.fields:
            yield from from_expr(f.init)
        for ctor in cls.constructors:
            yield from from_block(ctor.body)
        for m in cls.methods:
            yield from from_block(m.body)


def _expr_children(e: Expr):
    from ..minij.ast import Binary, FieldAccess, NewObject, Unary
    match e:
        case FieldAccess(receiver=recv):
            yield recv
        case MethodCall(receiver=recv, args=args):
            if recv is not None:
                yield recv
            yield from args
        case NewObject(args=args):
            yield from args
        case Binary(left=left, right=right):
            yield left
            yield right
        case Unary(operand=operand):
            yield operand
        case _:
            return


def collect_site_types(program: ProgramAst,
                       prefix: str = names.DEFAULT_PREFIX) -> dict[str, str]:
    """Map crash-point key -> receiver static type, read off the
    instrumented AST's null-check literals."""
    check_name = names.intrinsic(names.CHECK_FOR_NULL, prefix)
    out: dict[str, str] = {}
    for call in walk_calls(program):
        if call.receiver is None and call.name == check_name and len(call.args) == 3:
            key, tname = call.args[1], call.args[2]
            if isinstance(key, StringLit) and isinstance(tname, StringLit):
                out[key.value] = tname.value
    return out


@dataclass
class Prepared:
    program: ProgramAst  # checked, possibly instrumented
    table: TypeTable
    entry: str
    site_types: dict[str, str]


def prepare(units: list[ProgramAst] | ProgramAst, entry: str | None = None,
            instrument: bool = False,
            config: TransformConfig | None = None) -> Prepared:
    """Combine units into one checked program, optionally instrumenting
    everything first. Already-instrumented input is run as-is."""
    if isinstance(units, ProgramAst):
        units = [units]
    config = config or TransformConfig()
    if instrument:
        parts = []
        for u in units:
            if is_instrumented(u, config.prefix):
                parts.append(u)
            else:
                typecheck(u, config.prefix)
                parts.append(transform_all(u, config))
        program = combine(*parts)
    else:
        program = combine(*units)
    table = typecheck(program, config.prefix)
    entry_class = find_entry_class(program, table, entry)
    return Prepared(program, table, entry_class,
                    collect_site_types(program, config.prefix))


def prepare_split(app_units: list[ProgramAst], driver_units: list[ProgramAst],
                  entry: str | None = None,
                  config: TransformConfig | None = None) -> Prepared:
    """Instrument the application units only; drivers (test code) run
    uninstrumented, exactly like test suites in the seeding protocol."""
    config = config or TransformConfig()
    app = combine(*app_units) if app_units else ProgramAst()
    typecheck(app, config.prefix)
    instrumented = transform_all(app, config)
    program = combine(instrumented, *driver_units)
    table = typecheck(program, config.prefix)
    entry_class = find_entry_class(program, table, entry)
    return Prepared(program, table, entry_class,
                    collect_site_types(program, config.prefix))


def run_prepared(prepared: Prepared, controller: RepairController | None = None,
                 max_steps: int = MAX_STEPS, trace_catch: bool = False,
                 prefix: str = names.DEFAULT_PREFIX) -> ExecutionResult:
    interp = Interpreter(prepared.program, prepared.table, controller,
                         max_steps=max_steps, trace_catch=trace_catch,
                         prefix=prefix)
    return interp.run_main(prepared.entry)


def make_controller(mode: str, strategy: Strategy | None = None, seed: int = 0,
                    depth: int = DEFAULT_DEPTH_BUDGET,
                    deployments: dict[str, Strategy] | None = None,
                    site_types: dict[str, str] | None = None) -> RepairController:
    return RepairController(mode=mode, strategy=strategy, seed=seed,
                            depth=depth, deployments=deployments,
                            site_types=site_types)


def run(source: str | SourceUnit | ProgramAst, entry: str | None = None,
        repair: str | Strategy = "off", seed: int = 0,
        depth: int = DEFAULT_DEPTH_BUDGET,
        deployments: dict[str, Strategy] | None = None,
        max_steps: int = MAX_STEPS, trace_catch: bool = False) -> ExecutionResult:
    """One-shot convenience runner.

    ``repair``: "off" runs the program as given; "idle" instruments but
    activates no strategy; a Strategy runs fixed-strategy repair; "explore"
    runs seeded strategy exploration.
    """
    if isinstance(source, (str, SourceUnit)):
        program = parse(source)
    else:
        program = source
    if repair == "off":
        prepared = prepare([program])
        return run_prepared(prepared, None, max_steps, trace_catch)
    prepared = prepare([program], entry=entry, instrument=True)
    if repair == "idle":
        controller = make_controller("idle", site_types=prepared.site_types)
    elif repair == "explore":
        controller = make_controller("explore", seed=seed, depth=depth,
                                     deployments=deployments,
                                     site_types=prepared.site_types)
    else:
        assert isinstance(repair, Strategy)
        controller = make_controller("fixed", strategy=repair, seed=seed,
                                     depth=depth, deployments=deployments,
                                     site_types=prepared.site_types)
    return run_prepared(prepared, controller, max_steps, trace_catch)
