"""Tree-walking interpreter for (instrumented) MiniJ.

Executes type-checked ASTs directly. The repair hooks injected by the
transforms are interpreted as intrinsics: catch-stack bookkeeping, pool
registration, null checks, skip guards and force-return dispatch. With no
controller (or an idle one) the hooks are pure bookkeeping and the program
behaves exactly like its uninstrumented original.

One interpreter instance runs one program; instances are independent and
share no mutable state.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .. import names
from ..errors import InterpreterLimitError, MiniJTypeError
from ..minij.ast import (
    Assign, Binary, Block, BoolLit, ConstructorDecl, Expr, ExprStmt,
    FieldAccess, If, IntLit, MethodCall, MethodDecl, NewObject, NullLit,
    ProgramAst, Return, Stmt, StringLit, ThisExpr, Throw, Try, Unary,
    VarDecl, VarRef, While,
)
from ..minij.typecheck import (
    ARITHMETIC_ERROR, ASSERTION_ERROR, NPE, TypeTable,
)
from .catchstack import CatchStack
from .controller import Decision, RepairController, RepairEvent
from .pool import MANUFACTURE_FAILED, ValuePool
from .values import ObjectRef, Value, default_for, render, values_equal

MAX_STEPS = 5_000_000
MAX_CALL_DEPTH = 200


class MiniJException(Exception):
    """An in-flight MiniJ exception value."""

    def __init__(self, value: ObjectRef):
        super().__init__(value.class_name)
        self.value = value
        self.type_name = value.class_name


class ForceReturnSignal(Exception):
    """Framework signal aborting the rest of the current method."""

    def __init__(self, decision: Decision):
        super().__init__("force return")
        self.decision = decision


class LineSkipSignal(Exception):
    """Framework signal abandoning the innermost skip-guarded statement."""

    def __init__(self, token: int):
        super().__init__("skip line")
        self.token = token


class _Return(Exception):
    def __init__(self, value: Value):
        self.value = value


@dataclass
class Activation:
    aid: int
    class_name: str
    member: MethodDecl | ConstructorDecl | None
    this: ObjectRef | None
    env: dict[str, Value] = dc_field(default_factory=dict)
    pool: ValuePool | None = None
    force_decision: Decision | None = None

    @property
    def return_type(self) -> str:
        if isinstance(self.member, MethodDecl):
            return self.member.return_type
        return "void"


@dataclass
class ExecutionResult:
    stdout_lines: list[str]
    status: str  # "normal" or an exception type name
    assertion_failed: bool
    events: list[RepairEvent]
    catch_trace: list[str]
    steps: int

    @property
    def stdout(self) -> str:
        if not self.stdout_lines:
            return ""
        return "\n".join(self.stdout_lines) + "\n"

    @property
    def crashed(self) -> bool:
        return self.status != "normal"

    @property
    def succeeded(self) -> bool:
        return self.status == "normal" and not self.assertion_failed


class Interpreter:
    def __init__(self, program: ProgramAst, table: TypeTable,
                 controller: RepairController | None = None,
                 max_steps: int = MAX_STEPS, trace_catch: bool = False,
                 prefix: str = names.DEFAULT_PREFIX):
        self.program = program
        self.table = table
        self.controller = controller
        self.max_steps = max_steps
        self.prefix = prefix
        self.out: list[str] = []
        self.statics: dict[tuple[str, str], Value] = {}
        self.catch_trace: list[str] = []
        self.catchstack = CatchStack(table, self.catch_trace if trace_catch else None)
        self.assertion_failed = False
        self.steps = 0
        self._next_oid = 1
        self._next_aid = 1
        self._next_token = 1
        self._skip_scopes: list[tuple[int, int]] = []  # (activation id, token)
        self._call_depth = 0

    # -- entry point --

    def run_main(self, entry_class: str) -> ExecutionResult:
        if self.controller is not None:
            self.controller.begin_run()
        status = "normal"
        try:
            self._init_statics()
            instance = self._construct_entry(entry_class)
            found = self.table.find_method(entry_class, "main")
            if found is None:
                raise MiniJTypeError(f"class '{entry_class}' has no main method")
            self.invoke_method(instance, "main", [])
        except MiniJException as ex:
            status = ex.type_name
        except (ForceReturnSignal, LineSkipSignal):
            raise InterpreterLimitError("framework signal escaped to top level")
        result = ExecutionResult(
            stdout_lines=self.out, status=status,
            assertion_failed=self.assertion_failed,
            events=list(self.controller.events) if self.controller else [],
            catch_trace=self.catch_trace, steps=self.steps)
        if self.controller is not None and result.succeeded:
            self.controller.task_succeeded()
            result.events = list(self.controller.events)
        return result

    def _construct_entry(self, entry_class: str) -> ObjectRef:
        info = self.table.info(entry_class)
        if info.constructors and all(c.params for c in info.constructors):
            raise MiniJTypeError(
                f"entry class '{entry_class}' needs a zero-argument constructor")
        return self.construct_instance(entry_class, [])

    def _init_statics(self):
        for owner, fdecl in self.table.static_fields():
            self.statics[(owner, fdecl.name)] = default_for(fdecl.type_name)
        for owner, fdecl in self.table.static_fields():
            if fdecl.init is not None:
                act = self._activation(owner, None, None)
                self.statics[(owner, fdecl.name)] = self.eval(fdecl.init, act)

    # -- helpers --

    def _activation(self, class_name: str, member, this) -> Activation:
        act = Activation(self._next_aid, class_name, member, this)
        self._next_aid += 1
        return act

    def _step(self):
        self.steps += 1
        if self.steps > self.max_steps:
            raise InterpreterLimitError(f"step budget exceeded ({self.max_steps})")

    def _new_object(self, class_name: str) -> ObjectRef:
        obj = ObjectRef(class_name, {}, self._next_oid)
        self._next_oid += 1
        return obj

    def raise_builtin(self, type_name: str):
        raise MiniJException(self._new_object(type_name))

    def skip_guard_active(self, activation: Activation) -> bool:
        return any(aid == activation.aid for aid, _ in self._skip_scopes)

    def _innermost_skip_token(self, activation: Activation) -> int:
        for aid, token in reversed(self._skip_scopes):
            if aid == activation.aid:
                return token
        raise InterpreterLimitError("no active skip guard in this activation")

    # -- construction and invocation --

    def construct_instance(self, class_name: str, arg_values: list[Value]) -> ObjectRef:
        info = self.table.info(class_name)
        if info.is_abstract:
            raise MiniJTypeError(f"cannot instantiate abstract class '{class_name}'")
        obj = self._new_object(class_name)
        for owner, fdecl in self.table.instance_fields(class_name):
            obj.fields[fdecl.name] = default_for(fdecl.type_name)
        for owner, fdecl in self.table.instance_fields(class_name):
            if fdecl.init is not None:
                act = self._activation(owner, None, obj)
                obj.fields[fdecl.name] = self.eval(fdecl.init, act)
        ctors = info.constructors
        if ctors:
            matching = [c for c in ctors if len(c.params) == len(arg_values)]
            if not matching:
                raise MiniJTypeError(
                    f"no constructor of '{class_name}' takes {len(arg_values)} arguments")
            ctor = matching[0]
            act = self._activation(class_name, ctor, obj)
            for p, v in zip(ctor.params, arg_values):
                act.env[p.name] = v
            self._run_body(ctor.body, act)
        elif arg_values:
            raise MiniJTypeError(f"class '{class_name}' has no constructors")
        return obj

    def invoke_method(self, receiver: ObjectRef, name: str,
                      arg_values: list[Value]) -> Value:
        found = self.table.find_method(receiver.class_name, name)
        if found is None:
            raise MiniJTypeError(f"class '{receiver.class_name}' has no method '{name}'")
        owner, mdecl = found
        act = self._activation(owner, mdecl, receiver)
        for p, v in zip(mdecl.params, arg_values):
            act.env[p.name] = v
        return self._run_body(mdecl.body, act)

    def _run_body(self, body: Block, act: Activation) -> Value:
        self._call_depth += 1
        if self._call_depth > MAX_CALL_DEPTH:
            self._call_depth -= 1
            raise InterpreterLimitError(f"call depth exceeded ({MAX_CALL_DEPTH})")
        try:
            self.exec_block(body, act)
            return None
        except _Return as ret:
            return ret.value
        finally:
            self._call_depth -= 1

    # -- statements --

    def exec_block(self, block: Block, act: Activation):
        for stmt in block.stmts:
            self.exec_stmt(stmt, act)

    def exec_stmt(self, stmt: Stmt, act: Activation):
        self._step()
        match stmt:
            case VarDecl(type_name=t, name=n, init=init):
                act.env[n] = self.eval(init, act) if init is not None else default_for(t)
            case Assign(target=target, value=value):
                self._exec_assign(target, value, act)
            case ExprStmt(expr=expr):
                self.eval(expr, act)
            case If():
                self._exec_if(stmt, act)
            case While(cond=cond, body=body):
                while True:
                    self._step()
                    if not self.eval(cond, act):
                        break
                    self.exec_block(body, act)
            case Return(value=value):
                raise _Return(self.eval(value, act) if value is not None else None)
            case Throw(value=value):
                v = self.eval(value, act)
                if v is None:
                    self.raise_builtin(NPE)
                raise MiniJException(v)
            case Try():
                self._exec_try(stmt, act)
            case _:
                raise TypeError(f"unknown statement: {stmt!r}")

    def _exec_assign(self, target: Expr, value_expr: Expr, act: Activation):
        match target:
            case VarRef(name=n, binding=binding, owner=owner):
                v = self.eval(value_expr, act)
                if binding in ("local", "param"):
                    act.env[n] = v
                elif binding == "field":
                    assert act.this is not None
                    act.this.fields[n] = v
                else:  # static
                    self.statics[(owner, n)] = v
            case FieldAccess(receiver=recv, name=n, is_static=True, owner=owner):
                v = self.eval(value_expr, act)
                self.statics[(owner, n)] = v
            case FieldAccess(receiver=recv, name=n):
                obj = self.eval(recv, act)
                v = self.eval(value_expr, act)
                if obj is None:
                    self.raise_builtin(NPE)
                obj.fields[n] = v
            case _:
                raise TypeError(f"bad assignment target: {target!r}")

    def _is_skip_guard(self, stmt: If) -> bool:
        cond = stmt.cond
        return (isinstance(cond, MethodCall) and cond.receiver is None
                and names.intrinsic_base(cond.name, self.prefix) == names.SKIP_LINE)

    def _exec_if(self, stmt: If, act: Activation):
        if self._is_skip_guard(stmt):
            token = self._next_token
            self._next_token += 1
            self._skip_scopes.append((act.aid, token))
            try:
                if self.eval(stmt.cond, act):
                    self.exec_block(stmt.then_block, act)
            except LineSkipSignal as sig:
                if sig.token != token:
                    raise
            finally:
                self._skip_scopes.pop()
            return
        if self.eval(stmt.cond, act):
            self.exec_block(stmt.then_block, act)
        elif stmt.else_block is not None:
            self.exec_block(stmt.else_block, act)

    def _exec_try(self, stmt: Try, act: Activation):
        force_type = names.force_return_type(self.prefix)
        try:
            try:
                self.exec_block(stmt.body, act)
            except MiniJException as ex:
                for clause in stmt.catches:
                    if clause.type_name != force_type and \
                            self.table.is_subtype(ex.type_name, clause.type_name):
                        act.env[clause.var_name] = ex.value
                        self.exec_block(clause.body, act)
                        break
                else:
                    raise
            except ForceReturnSignal as sig:
                for clause in stmt.catches:
                    if clause.type_name == force_type:
                        act.env[clause.var_name] = None
                        prev = act.force_decision
                        act.force_decision = sig.decision
                        try:
                            self.exec_block(clause.body, act)
                        finally:
                            act.force_decision = prev
                        break
                else:
                    raise
        finally:
            if stmt.finally_block is not None:
                self.exec_block(stmt.finally_block, act)

    # -- expressions --

    def eval(self, expr: Expr, act: Activation) -> Value:
        self._step()
        match expr:
            case IntLit(value=v):
                return v
            case BoolLit(value=v):
                return v
            case StringLit(value=v):
                return v
            case NullLit():
                return None
            case ThisExpr():
                return act.this
            case VarRef(name=n, binding=binding, owner=owner, ty=ty):
                if binding in ("local", "param"):
                    if n in act.env:
                        return act.env[n]
                    # Declaration skipped before first read: default value.
                    return default_for(ty or "")
                if binding == "field":
                    assert act.this is not None
                    return act.this.fields[n]
                if binding == "static":
                    return self.statics[(owner, n)]
                raise MiniJTypeError(f"unresolved variable '{n}' (AST not checked?)")
            case FieldAccess(receiver=recv, name=n, is_static=True, owner=owner):
                return self.statics[(owner, n)]
            case FieldAccess(receiver=recv, name=n):
                obj = self.eval(recv, act)
                if obj is None:
                    self.raise_builtin(NPE)
                return obj.fields[n]
            case MethodCall():
                return self._eval_call(expr, act)
            case NewObject(type_name=t, args=args):
                arg_values = [self.eval(a, act) for a in args]
                return self.construct_instance(t, arg_values)
            case Unary(op=op, operand=operand):
                v = self.eval(operand, act)
                return (not v) if op == "!" else (-v)
            case Binary():
                return self._eval_binary(expr, act)
        raise TypeError(f"unknown expression: {expr!r}")

    def _eval_binary(self, expr: Binary, act: Activation) -> Value:
        op = expr.op
        if op == "&&":
            return bool(self.eval(expr.left, act)) and bool(self.eval(expr.right, act))
        if op == "||":
            return bool(self.eval(expr.left, act)) or bool(self.eval(expr.right, act))
        left = self.eval(expr.left, act)
        right = self.eval(expr.right, act)
        if op == "==":
            return values_equal(left, right)
        if op == "!=":
            return not values_equal(left, right)
        if op == "+":
            if isinstance(left, str) or isinstance(right, str):
                return render(left) + render(right)
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op in ("/", "%"):
            if right == 0:
                self.raise_builtin(ARITHMETIC_ERROR)
            q = abs(left) // abs(right)
            if (left < 0) != (right < 0):
                q = -q
            if op == "/":
                return q
            return left - right * q
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        if op == ">=":
            return left >= right
        raise TypeError(f"unknown operator {op!r}")

    # -- calls --

    def _eval_call(self, call: MethodCall, act: Activation) -> Value:
        if call.receiver is None:
            base = names.intrinsic_base(call.name, self.prefix)
            if base is not None:
                return self._intrinsic(base, call, act)
            if call.name in ("print", "assertTrue", "assertEquals"):
                return self._builtin(call, act)
            # Implicit this call.
            assert act.this is not None, f"call to {call.name} without receiver"
            arg_values = [self.eval(a, act) for a in call.args]
            return self.invoke_method(act.this, call.name, arg_values)
        recv = self.eval(call.receiver, act)
        arg_values = [self.eval(a, act) for a in call.args]
        if recv is None:
            self.raise_builtin(NPE)
        return self.invoke_method(recv, call.name, arg_values)

    def _builtin(self, call: MethodCall, act: Activation) -> Value:
        if call.name == "print":
            self.out.append(render(self.eval(call.args[0], act)))
            return None
        if call.name == "assertTrue":
            v = self.eval(call.args[0], act)
            if v is not True:
                self.assertion_failed = True
                self.raise_builtin(ASSERTION_ERROR)
            return None
        a = self.eval(call.args[0], act)
        b = self.eval(call.args[1], act)
        if not values_equal(a, b):
            self.assertion_failed = True
            self.raise_builtin(ASSERTION_ERROR)
        return None

    # -- intrinsics --

    def _intrinsic(self, base: str, call: MethodCall, act: Activation) -> Value:
        args = call.args
        if base == names.CATCH_ADD:
            try_id = self.eval(args[0], act)
            types = tuple(a.value for a in args[1:])  # type: ignore[union-attr]
            self.catchstack.add(try_id, types)
            return None
        if base == names.CATCH_REMOVE:
            self.catchstack.remove(self.eval(args[0], act))
            return None
        if base == names.START_METHOD:
            mid = self.eval(args[0], act)
            pool = ValuePool(mid, self.table, act.this, self.statics)
            if isinstance(act.member, (MethodDecl, ConstructorDecl)):
                for p in act.member.params:
                    pool.register_param(p.name, p.type_name, act.env.get(p.name))
            act.pool = pool
            return None
        if base == names.END_METHOD:
            if act.pool is not None:
                act.pool.closed = True
            return None
        if base == names.INIT_VAR or base == names.MODIF_VAR:
            value = self.eval(args[0], act)
            var_name = args[2].value  # type: ignore[union-attr]
            var_type = args[3].value  # type: ignore[union-attr]
            if act.pool is not None:
                if base == names.INIT_VAR:
                    act.pool.init_var(var_name, var_type, value)
                else:
                    act.pool.modif_var(var_name, var_type, value)
            return value
        if base == names.CHECK_FOR_NULL:
            return self._check_for_null(call, act)
        if base == names.SKIP_LINE:
            return self._skip_line(call, act)
        if base == names.STRATEGY_IS:
            wanted = args[0].value  # type: ignore[union-attr]
            decision = act.force_decision
            return (decision is not None and decision.strategy is not None
                    and decision.strategy.id == wanted)
        if base == names.GET_VAR:
            return self._force_get_var(args[0].value, act)  # type: ignore[union-attr]
        if base == names.NEW_VAR:
            return self._force_new_var(args[0].value, act)  # type: ignore[union-attr]
        if base == names.WILL_CATCH:
            return self.catchstack.will_be_caught(args[0].value)  # type: ignore[union-attr]
        raise TypeError(f"unknown intrinsic {call.name!r}")

    def _check_for_null(self, call: MethodCall, act: Activation) -> Value:
        value = self.eval(call.args[0], act)
        if value is not None:
            return value
        if self.catchstack.will_be_caught(NPE):
            # Anticipated dereference: the normal exception will be caught.
            return None
        if self.controller is None or not self.controller.active:
            return None
        key = call.args[1].value  # type: ignore[union-attr]
        required_type = call.args[2].value  # type: ignore[union-attr]
        decision = self.controller.decide(key, required_type, self, act)
        return self._apply_decision(decision, call.args[0], act, key)

    def _apply_decision(self, decision: Decision, receiver_ast: Expr,
                        act: Activation, key: str) -> Value:
        if decision.kind == "none":
            return None
        if decision.kind == "skip_line":
            raise LineSkipSignal(self._innermost_skip_token(act))
        if decision.kind == "force_return":
            raise ForceReturnSignal(decision)
        ok, value = self.controller.materialize(decision, self, act, key)
        if not ok:
            return None
        if decision.is_global:
            self._rebind(receiver_ast, value, act)
        return value

    def _skip_line(self, call: MethodCall, act: Activation) -> bool:
        controller = self.controller
        for recv_ast, key_lit in zip(call.args[::2], call.args[1::2]):
            value = self.eval(recv_ast, act)
            if value is not None:
                continue
            if self.catchstack.will_be_caught(NPE):
                continue
            if controller is None or not controller.consults_at_skipline():
                continue
            key = key_lit.value  # type: ignore[union-attr]
            decision = controller.decide(key, None, self, act)
            if decision.kind == "skip_line":
                return False
            if decision.kind == "force_return":
                raise ForceReturnSignal(decision)
            # Replacement (or nothing) happens at the dereference itself.
        return True

    # -- global injection --

    def _unwrap_check(self, expr: Expr) -> Expr:
        while isinstance(expr, MethodCall) and expr.receiver is None and \
                names.intrinsic_base(expr.name, self.prefix) == names.CHECK_FOR_NULL:
            expr = expr.args[0]
        return expr

    def _rebind(self, receiver_ast: Expr, value: Value, act: Activation):
        """Assign the replacement to the null source variable (global
        injection). Non-rebindable receiver shapes (call results) fall back
        to local injection."""
        target = self._unwrap_check(receiver_ast)
        match target:
            case VarRef(name=n, binding=binding, owner=owner, ty=ty):
                if binding in ("local", "param"):
                    act.env[n] = value
                    if act.pool is not None:
                        act.pool.modif_var(n, ty or "", value)
                elif binding == "field" and act.this is not None:
                    act.this.fields[n] = value
                elif binding == "static":
                    self.statics[(owner, n)] = value
            case FieldAccess(receiver=recv, name=n, is_static=True, owner=owner):
                self.statics[(owner, n)] = value
            case FieldAccess(receiver=recv, name=n):
                ok, obj = self._eval_pure(self._unwrap_check(recv), act)
                if ok and obj is not None:
                    obj.fields[n] = value
            case _:
                pass

    def _eval_pure(self, expr: Expr, act: Activation) -> tuple[bool, Value]:
        """Side-effect-free re-evaluation of simple receiver shapes."""
        expr = self._unwrap_check(expr)
        match expr:
            case ThisExpr():
                return True, act.this
            case VarRef(name=n, binding=binding, owner=owner, ty=ty):
                if binding in ("local", "param"):
                    return True, act.env.get(n, default_for(ty or ""))
                if binding == "field":
                    return (act.this is not None,
                            act.this.fields.get(n) if act.this else None)
                if binding == "static":
                    return True, self.statics.get((owner, n))
                return False, None
            case FieldAccess(receiver=recv, name=n, is_static=True, owner=owner):
                return True, self.statics.get((owner, n))
            case FieldAccess(receiver=recv, name=n):
                ok, obj = self._eval_pure(recv, act)
                if not ok or obj is None:
                    return False, None
                return True, obj.fields.get(n)
            case _:
                return False, None

    # -- force-return value computation --

    def _force_get_var(self, type_name: str, act: Activation) -> Value:
        decision = act.force_decision
        if decision is not None and decision.strategy is not None \
                and decision.strategy.parameter is not None and act.pool is not None:
            found, value = act.pool.lookup(decision.strategy.parameter)
            if found and value is not None:
                return value
        if act.pool is not None:
            candidates = act.pool.candidates(type_name)
            if candidates:
                return candidates[0][1]
        return default_for(type_name)

    def _force_new_var(self, type_name: str, act: Activation) -> Value:
        decision = act.force_decision
        wanted = type_name
        if decision is not None and decision.strategy is not None \
                and decision.strategy.parameter is not None:
            wanted = decision.strategy.parameter
        depth = self.controller.depth if self.controller else 3
        value = self.manufacture(wanted, depth)
        if value is MANUFACTURE_FAILED:
            return default_for(type_name)
        return value

    # -- on-the-fly construction --

    def manufacture(self, type_name: str, depth: int) -> Value:
        """Create an instance of (a concrete subtype of) the type by trying
        constructors in declaration order, recursively. Returns the failure
        sentinel when nothing can be built."""
        if type_name in ("int", "bool", "string"):
            return default_for(type_name)
        if not self.table.has_class(type_name):
            return MANUFACTURE_FAILED
        for cls in self.table.concrete_subtypes(type_name):
            value = self._manufacture_class(cls, depth)
            if value is not MANUFACTURE_FAILED:
                return value
        return MANUFACTURE_FAILED

    def _manufacture_class(self, cls: str, depth: int) -> Value:
        if depth < 1:
            return MANUFACTURE_FAILED
        ctors = self.table.constructors_of(cls)
        signatures = [[p.type_name for p in c.params] for c in ctors] if ctors else [[]]
        for sig in signatures:
            arg_values: list[Value] = []
            feasible = True
            for ptype in sig:
                v = self.manufacture(ptype, depth - 1)
                if v is MANUFACTURE_FAILED:
                    feasible = False
                    break
                arg_values.append(v)
            if not feasible:
                continue
            flag = self.assertion_failed
            try:
                return self.construct_instance(cls, arg_values)
            except MiniJException:
                # Constructor refused; an abandoned attempt does not fail
                # the task.
                self.assertion_failed = flag
                continue
        return MANUFACTURE_FAILED
