"""Source-to-source instrumentation passes.

Five AST-to-AST rewrites prepare a program for runtime repair:

* value pool     -- register locals/params so replacement values can be found
* catch stack    -- mirror open try frames so harmfulness is decidable
* method skip    -- catch the force-return signal at every method boundary
* line skip      -- guard skippable statements with a pre-execution test
* deref checks   -- wrap every instrumentable receiver in a null check

``transform_all`` applies them in that order (later passes see the code the
earlier ones produced) and re-typechecks between passes, so the output is
always annotated, parseable and checkable. Instrumented output is plain
MiniJ text: all hooks are reserved-prefix calls.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

from .. import names
from ..errors import AlreadyInstrumentedError
from ..minij import analysis, printer
from ..minij.ast import (
    Assign, Binary, Block, CatchClause, ClassDecl, ConstructorDecl, Expr,
    ExprStmt, FieldAccess, If, IntLit, MethodCall, MethodDecl, NewObject,
    NullLit, ProgramAst, Return, Stmt, StringLit, ThisExpr, Throw, Try,
    Unary, VarDecl, VarRef, While, default_value_literal,
)
from ..minij.typecheck import TypeTable, typecheck


@dataclass
class TransformConfig:
    enable_catch_stack: bool = True
    enable_deref_checks: bool = True
    enable_value_pool: bool = True
    enable_line_skip: bool = True
    enable_method_skip: bool = True
    prefix: str = names.DEFAULT_PREFIX


def _call(name: str, args: list[Expr]) -> MethodCall:
    return MethodCall(None, name, args)


def _call_stmt(name: str, args: list[Expr]) -> ExprStmt:
    return ExprStmt(_call(name, args))


# -- instrumentation detection ----------------------------------------------


def collect_identifiers(program: ProgramAst) -> set[str]:
    found: set[str] = set()

    def expr(e: Expr | None):
        if e is None:
            return
        match e:
            case VarRef(name=n):
                found.add(n)
            case FieldAccess(receiver=recv, name=n):
                found.add(n)
                expr(recv)
            case MethodCall(receiver=recv, name=n, args=args):
                found.add(n)
                expr(recv)
                for a in args:
                    expr(a)
            case NewObject(type_name=t, args=args):
                found.add(t)
                for a in args:
                    expr(a)
            case Binary(left=l, right=r):
                expr(l)
                expr(r)
            case Unary(operand=o):
                expr(o)
            case _:
                pass

    def block(blk: Block):
        for s in blk.stmts:
            stmt(s)

    def stmt(s: Stmt):
        match s:
            case VarDecl(type_name=t, name=n, init=init):
                found.update((t, n))
                expr(init)
            case Assign(target=target, value=value):
                expr(target)
                expr(value)
            case ExprStmt(expr=e):
                expr(e)
            case If(cond=cond, then_block=tb, else_block=eb):
                expr(cond)
                block(tb)
                if eb is not None:
                    block(eb)
            case While(cond=cond, body=body):
                expr(cond)
                block(body)
            case Return(value=value):
                expr(value)
            case Throw(value=value):
                expr(value)
            case Try(body=body, catches=catches, finally_block=fb):
                block(body)
                for c in catches:
                    found.update((c.type_name, c.var_name))
                    block(c.body)
                if fb is not None:
                    block(fb)

    for cls in program.classes:
        found.add(cls.name)
        if cls.base:
            found.add(cls.base)
        for f in cls.fields:
            found.update((f.type_name, f.name))
            expr(f.init)
        for ctor in cls.constructors:
            for p in ctor.params:
                found.update((p.type_name, p.name))
            block(ctor.body)
        for m in cls.methods:
            found.add(m.name)
            for p in m.params:
                found.update((p.type_name, p.name))
            block(m.body)
    return found


def is_instrumented(program: ProgramAst, prefix: str = names.DEFAULT_PREFIX) -> bool:
    return any(ident.startswith(prefix) for ident in collect_identifiers(program))


def reject_instrumented(program: ProgramAst, prefix: str):
    if is_instrumented(program, prefix):
        raise AlreadyInstrumentedError(
            f"program already contains identifiers with reserved prefix '{prefix}'")


# -- generic per-member rewriting -------------------------------------------


def _map_members(program: ProgramAst, rewrite) -> ProgramAst:
    """Copy the program, passing every constructor/method body through
    ``rewrite(cls, member, body) -> Block``."""
    new_classes = []
    for cls in program.classes:
        new_cls = ClassDecl(
            name=cls.name, base=cls.base, is_abstract=cls.is_abstract,
            fields=[copy.deepcopy(f) for f in cls.fields],
            constructors=[], methods=[], span=cls.span, path=cls.path)
        for ctor in cls.constructors:
            body = rewrite(cls, ctor, copy.deepcopy(ctor.body))
            new_cls.constructors.append(ConstructorDecl(
                ctor.name, [copy.deepcopy(p) for p in ctor.params], body,
                span=ctor.span))
        for m in cls.methods:
            body = rewrite(cls, m, copy.deepcopy(m.body))
            new_cls.methods.append(MethodDecl(
                m.return_type, m.name, [copy.deepcopy(p) for p in m.params],
                body, span=m.span))
        new_classes.append(new_cls)
    return ProgramAst(classes=new_classes, span=program.span)


def _map_blocks(blk: Block, fn) -> Block:
    """Rebuild a block, applying ``fn(stmt) -> list[Stmt]`` to every simple
    statement and recursing through compound ones."""
    out: list[Stmt] = []
    for s in blk.stmts:
        match s:
            case If(cond=cond, then_block=tb, else_block=eb):
                out.append(If(cond, _map_blocks(tb, fn),
                              None if eb is None else _map_blocks(eb, fn),
                              span=s.span))
            case While(cond=cond, body=body):
                out.append(While(cond, _map_blocks(body, fn), span=s.span))
            case Try(body=body, catches=catches, finally_block=fb):
                new_catches = [CatchClause(c.type_name, c.var_name,
                                           _map_blocks(c.body, fn), span=c.span)
                               for c in catches]
                out.append(Try(_map_blocks(body, fn), new_catches,
                               None if fb is None else _map_blocks(fb, fn),
                               span=s.span))
            case _:
                out.extend(fn(s))
    return Block(stmts=out, span=blk.span)


# -- pass 1: value pool ------------------------------------------------------


def inject_value_pool(program: ProgramAst,
                      prefix: str = names.DEFAULT_PREFIX) -> ProgramAst:
    """Register every local initialization and assignment with the runtime
    pool; guarantee start/end bookkeeping on all exits."""
    init_var = names.intrinsic(names.INIT_VAR, prefix)
    modif_var = names.intrinsic(names.MODIF_VAR, prefix)
    start = names.intrinsic(names.START_METHOD, prefix)
    end = names.intrinsic(names.END_METHOD, prefix)
    next_id = iter(range(1, 1 << 30))

    def rewrite(cls, member, body: Block) -> Block:
        mid = next(next_id)
        local_types: dict[str, str] = {p.name: p.type_name for p in member.params}

        def wrap(stmt: Stmt) -> list[Stmt]:
            match stmt:
                case VarDecl(type_name=t, name=n, init=init) if init is not None:
                    local_types[n] = t
                    wrapped = _call(init_var, [init, IntLit(mid), StringLit(n),
                                               StringLit(t)])
                    return [VarDecl(t, n, wrapped, span=stmt.span)]
                case VarDecl(type_name=t, name=n):
                    local_types[n] = t
                    return [stmt]
                case Assign(target=VarRef() as target, value=value) \
                        if target.binding in ("local", "param"):
                    t = local_types.get(target.name, "")
                    wrapped = _call(modif_var, [value, IntLit(mid),
                                                StringLit(target.name), StringLit(t)])
                    return [Assign(target, wrapped, span=stmt.span)]
                case _:
                    return [stmt]

        inner = _map_blocks(body, wrap)
        pool_try = Try(inner, [], Block(stmts=[_call_stmt(end, [IntLit(mid)])]))
        opener = _call_stmt(start, [IntLit(mid), ThisExpr()])
        return Block(stmts=[opener, pool_try], span=body.span)

    return _map_members(program, rewrite)


# -- pass 2: catch stack -----------------------------------------------------


def inject_catch_stack(program: ProgramAst,
                       prefix: str = names.DEFAULT_PREFIX) -> ProgramAst:
    """Give every try a fresh id; announce entry at the head of the try body
    and exit at the head of every catch and of the finally (synthesized when
    absent)."""
    add = names.intrinsic(names.CATCH_ADD, prefix)
    remove = names.intrinsic(names.CATCH_REMOVE, prefix)
    next_id = iter(range(1, 1 << 30))

    def rewrite_block(blk: Block) -> Block:
        out: list[Stmt] = []
        for s in blk.stmts:
            match s:
                case Try(body=body, catches=catches, finally_block=fb):
                    tid = next(next_id)
                    add_stmt = _call_stmt(add, [IntLit(tid)] + [
                        StringLit(c.type_name) for c in catches])
                    new_body = rewrite_block(body)
                    new_body.stmts.insert(0, add_stmt)
                    new_catches = []
                    for c in catches:
                        cb = rewrite_block(c.body)
                        cb.stmts.insert(0, _call_stmt(remove, [IntLit(tid)]))
                        new_catches.append(CatchClause(c.type_name, c.var_name,
                                                       cb, span=c.span))
                    new_fb = rewrite_block(fb) if fb is not None else Block(stmts=[])
                    new_fb.stmts.insert(0, _call_stmt(remove, [IntLit(tid)]))
                    out.append(Try(new_body, new_catches, new_fb, span=s.span))
                case If(cond=cond, then_block=tb, else_block=eb):
                    out.append(If(cond, rewrite_block(tb),
                                  None if eb is None else rewrite_block(eb),
                                  span=s.span))
                case While(cond=cond, body=body):
                    out.append(While(cond, rewrite_block(body), span=s.span))
                case _:
                    out.append(s)
        return Block(stmts=out, span=blk.span)

    def rewrite(cls, member, body: Block) -> Block:
        return rewrite_block(body)

    return _map_members(program, rewrite)


# -- pass 3: method skip -----------------------------------------------------


def inject_method_skip(program: ProgramAst, table: TypeTable,
                       prefix: str = names.DEFAULT_PREFIX) -> ProgramAst:
    """Wrap each method body in a handler for the force-return signal.

    Value-returning methods dispatch on the active strategy (null, pooled
    value, manufactured value); void methods and constructors plainly
    return. A terminal default return keeps the method well-typed.
    """
    strategy_is = names.intrinsic(names.STRATEGY_IS, prefix)
    get_var = names.intrinsic(names.GET_VAR, prefix)
    new_var = names.intrinsic(names.NEW_VAR, prefix)
    signal_type = names.force_return_type(prefix)
    err_var = prefix + "err"

    def guard(strategy_id: str, value: Expr) -> If:
        return If(_call(strategy_is, [StringLit(strategy_id)]),
                  Block(stmts=[Return(value)]), None)

    def rewrite(cls, member, body: Block) -> Block:
        return_type = member.return_type if isinstance(member, MethodDecl) else "void"
        handler: list[Stmt] = []
        if return_type == "void":
            handler.append(Return(None))
        else:
            if table.is_nullable(return_type):
                handler.append(guard("S4a", NullLit()))
            handler.append(guard("S4b", _call(get_var, [StringLit(return_type)])))
            handler.append(guard("S4c", _call(new_var, [StringLit(return_type)])))
            handler.append(Return(default_value_literal(return_type)))
        clause = CatchClause(signal_type, err_var, Block(stmts=handler))
        return Block(stmts=[Try(body, [clause], None)], span=body.span)

    return _map_members(program, rewrite)


# -- pass 4: line skip -------------------------------------------------------


def inject_line_skip(program: ProgramAst,
                     prefix: str = names.DEFAULT_PREFIX) -> ProgramAst:
    """Guard every skippable statement containing a dereference with a
    skip-line pre-test; declarations are split so only the first
    initialization sits under the guard."""
    skip_line = names.intrinsic(names.SKIP_LINE, prefix)

    def rewrite(cls, member, body: Block) -> Block:
        return_type = member.return_type if isinstance(member, MethodDecl) else "void"

        def guard_args(stmt: Stmt) -> list[Expr]:
            args: list[Expr] = []
            seen: set[str] = set()
            for e in analysis.stmt_exprs(stmt):
                for site in analysis.site_nodes(e):
                    recv = site.receiver  # type: ignore[union-attr]
                    if not analysis.is_pure_receiver(recv):
                        continue
                    text = printer.expr_text(recv)
                    if text in seen:
                        continue
                    seen.add(text)
                    key = analysis.crash_key(cls.path, site.span)
                    args += [copy.deepcopy(recv), StringLit(key)]
            return args

        def has_sites(stmt: Stmt) -> bool:
            return any(analysis.site_nodes(e) for e in analysis.stmt_exprs(stmt))

        def wrap(stmt: Stmt) -> list[Stmt]:
            if not isinstance(stmt, (VarDecl, Assign, ExprStmt, Return, Throw)):
                return [stmt]
            if not has_sites(stmt):
                return [stmt]
            if not analysis._stmt_skippable(stmt, False, body, return_type):
                return [stmt]
            args = guard_args(stmt)
            if isinstance(stmt, VarDecl):
                assert stmt.init is not None
                decl = VarDecl(stmt.type_name, stmt.name, None, span=stmt.span)
                assign = Assign(VarRef(stmt.name), stmt.init, span=stmt.span)
                return [decl, If(_call(skip_line, args),
                                 Block(stmts=[assign]), None, span=stmt.span)]
            return [If(_call(skip_line, args), Block(stmts=[stmt]), None,
                       span=stmt.span)]

        return _map_blocks(body, wrap)

    return _map_members(program, rewrite)


# -- pass 5: dereference checks ----------------------------------------------


def inject_deref_checks(program: ProgramAst,
                        prefix: str = names.DEFAULT_PREFIX) -> ProgramAst:
    """Rewrite every instrumentable receiver ``e`` of ``e.f`` / ``e.m(...)``
    into a runtime null check carrying the crash-point key and the
    receiver's static type."""
    check = names.intrinsic(names.CHECK_FOR_NULL, prefix)

    def rewrite_in(path: str):
        def rewrite_expr(e: Expr | None) -> Expr | None:
            if e is None:
                return None
            match e:
                case FieldAccess(receiver=recv, name=n):
                    new_recv = rewrite_expr(recv)
                    node = FieldAccess(new_recv, n, span=e.span)
                    node.is_static, node.owner, node.ty = e.is_static, e.owner, e.ty
                    if analysis._is_site(e):
                        node.receiver = _wrap(new_recv, e, path)
                    return node
                case MethodCall(receiver=recv, name=n, args=args):
                    new_recv = rewrite_expr(recv)
                    new_args = [rewrite_expr(a) for a in args]
                    node = MethodCall(new_recv, n, new_args, span=e.span)
                    node.binding, node.ty = e.binding, e.ty
                    if analysis._is_site(e):
                        node.receiver = _wrap(new_recv, e, path)
                    return node
                case NewObject(type_name=t, args=args):
                    node = NewObject(t, [rewrite_expr(a) for a in args], span=e.span)
                    node.ty = e.ty
                    return node
                case Binary(op=op, left=l, right=r):
                    node = Binary(op, rewrite_expr(l), rewrite_expr(r), span=e.span)
                    node.ty = e.ty
                    return node
                case Unary(op=op, operand=o):
                    node = Unary(op, rewrite_expr(o), span=e.span)
                    node.ty = e.ty
                    return node
                case _:
                    return e

        def _wrap(new_recv: Expr, site: Expr, path: str) -> MethodCall:
            key = analysis.crash_key(path, site.span)
            rtype = site.receiver.ty  # type: ignore[union-attr]
            if rtype is None:
                raise ValueError("inject_deref_checks needs a type-checked AST")
            wrapped = _call(check, [new_recv, StringLit(key), StringLit(rtype)])
            wrapped.ty = rtype
            return wrapped

        return rewrite_expr

    def rewrite(cls, member, body: Block) -> Block:
        rewrite_expr = rewrite_in(cls.path)

        def wrap(stmt: Stmt) -> list[Stmt]:
            match stmt:
                case VarDecl(type_name=t, name=n, init=init):
                    return [VarDecl(t, n, rewrite_expr(init), span=stmt.span)]
                case Assign(target=target, value=value):
                    return [Assign(rewrite_expr(target), rewrite_expr(value),
                                   span=stmt.span)]
                case ExprStmt(expr=e):
                    return [ExprStmt(rewrite_expr(e), span=stmt.span)]
                case Return(value=value):
                    return [Return(rewrite_expr(value), span=stmt.span)]
                case Throw(value=value):
                    return [Throw(rewrite_expr(value), span=stmt.span)]
                case _:
                    return [stmt]

        def compound(blk: Block) -> Block:
            out: list[Stmt] = []
            for s in blk.stmts:
                match s:
                    case If(cond=cond, then_block=tb, else_block=eb):
                        out.append(If(rewrite_expr(cond), compound(tb),
                                      None if eb is None else compound(eb),
                                      span=s.span))
                    case While(cond=cond, body=wb):
                        out.append(While(rewrite_expr(cond), compound(wb),
                                         span=s.span))
                    case Try(body=b, catches=catches, finally_block=fb):
                        new_catches = [CatchClause(c.type_name, c.var_name,
                                                   compound(c.body), span=c.span)
                                       for c in catches]
                        out.append(Try(compound(b), new_catches,
                                       None if fb is None else compound(fb),
                                       span=s.span))
                    case _:
                        out.extend(wrap(s))
            return Block(stmts=out, span=blk.span)

        return compound(body)

    new_program = _map_members(program, rewrite)
    # Field initializers carry dereferences too; rewrite them in place.
    for cls in new_program.classes:
        rewrite_expr = rewrite_in(cls.path)
        for f in cls.fields:
            f.init = rewrite_expr(f.init)
    return new_program


# -- composition -------------------------------------------------------------


def transform_all(program: ProgramAst, config: TransformConfig | None = None) -> ProgramAst:
    """Apply the enabled passes in order: value pool, catch stack, method
    skip, line skip, dereference checks. The input must be type-checked and
    uninstrumented; the output is re-checked (and therefore annotated).

    Raises AlreadyInstrumentedError when reserved-prefix identifiers are
    already present: double instrumentation is never silent.
    """
    config = config or TransformConfig()
    prefix = config.prefix
    reject_instrumented(program, prefix)

    current = program
    typecheck(current, prefix)

    def step(pass_fn, *extra):
        nonlocal current
        current = pass_fn(current, *extra)
        typecheck(current, prefix)

    if config.enable_value_pool:
        step(inject_value_pool, prefix)
    if config.enable_catch_stack:
        step(inject_catch_stack, prefix)
    if config.enable_method_skip:
        table = typecheck(current, prefix)
        current = inject_method_skip(current, table, prefix)
        typecheck(current, prefix)
    if config.enable_line_skip:
        step(inject_line_skip, prefix)
    if config.enable_deref_checks:
        step(inject_deref_checks, prefix)
    return current
