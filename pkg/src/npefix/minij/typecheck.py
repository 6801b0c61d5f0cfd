"""Type checker and type table for MiniJ.

Checking annotates the AST in place: every expression gets a static type
(``.ty``) and name references get resolution kinds (``.binding``). The
transforms and the interpreter both rely on those annotations, so programs
are always checked before being transformed or executed.

The checker also understands the instrumented dialect: reserved-prefix
intrinsic calls and the framework signal type in catch clauses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import names
from ..errors import MiniJTypeError
from .ast import (
    Assign, Binary, Block, BoolLit, CatchClause, ClassDecl, ConstructorDecl,
    Expr, ExprStmt, FieldAccess, FieldDecl, If, IntLit, MethodCall,
    MethodDecl, NewObject, NullLit, Param, ProgramAst, Return, Stmt,
    StringLit, ThisExpr, Throw, Try, Unary,VarDecl, VarRef, While,
    is_primitive,
)

EXCEPTION_ROOT = "Exception"
NPE = "NullPointerException"
ARITHMETIC_ERROR = "ArithmeticException"
ASSERTION_ERROR = "AssertionError"

BUILTIN_EXCEPTIONS = {
    EXCEPTION_ROOT: None,
    NPE: EXCEPTION_ROOT,
    ARITHMETIC_ERROR: EXCEPTION_ROOT,
    ASSERTION_ERROR: EXCEPTION_ROOT,
}

BUILTIN_FUNCTIONS = ("print", "assertTrue", "assertEquals")

RESERVED_TYPE_NAMES = {"int", "bool", "string", "void", "null"}


@dataclass
class ClassInfo:
    name: str
    base: str | None
    is_abstract: bool
    is_builtin: bool = False
    decl: ClassDecl | None = None
    fields: list[FieldDecl] = field(default_factory=list)
    constructors: list[ConstructorDecl] = field(default_factory=list)
    methods: dict[str, MethodDecl] = field(default_factory=dict)


class TypeTable:
    """Name-indexed class registry with the subtype relation.

    The subtype relation is reflexive, transitive and acyclic; builtin
    exception types are always present.
    """

    def __init__(self):
        self.classes: dict[str, ClassInfo] = {}
        self.order: list[str] = []
        for name, base in BUILTIN_EXCEPTIONS.items():
            self._add(ClassInfo(name, base, is_abstract=False, is_builtin=True))

    def _add(self, info: ClassInfo):
        self.classes[info.name] = info
        self.order.append(info.name)

    def has_class(self, name: str) -> bool:
        return name in self.classes

    def info(self, name: str) -> ClassInfo:
        return self.classes[name]

    def supertypes(self, name: str) -> list[str]:
        """name itself plus all ancestors, nearest first."""
        chain = []
        cur: str | None = name
        while cur is not None:
            chain.append(cur)
            cur = self.classes[cur].base
        return chain

    def is_subtype(self, sub: str, sup: str) -> bool:
        if sub == sup:
            return True
        if sub not in self.classes or sup not in self.classes:
            return False
        return sup in self.supertypes(sub)

    def subtypes(self, name: str) -> list[str]:
        """All subtypes of name (including itself), in declaration order."""
        return [c for c in self.order if self.is_subtype(c, name)]

    def concrete_subtypes(self, name: str) -> list[str]:
        return [c for c in self.subtypes(name) if not self.classes[c].is_abstract]

    def instance_fields(self, name: str) -> list[tuple[str, FieldDecl]]:
        """(owner, field) pairs, root superclass first, declaration order."""
        out: list[tuple[str, FieldDecl]] = []
        for cls in reversed(self.supertypes(name)):
            out += [(cls, f) for f in self.classes[cls].fields if not f.is_static]
        return out

    def static_fields(self) -> list[tuple[str, FieldDecl]]:
        """All static fields of all classes, declaration order."""
        out: list[tuple[str, FieldDecl]] = []
        for cls in self.order:
            out += [(cls, f) for f in self.classes[cls].fields if f.is_static]
        return out

    def find_instance_field(self, cls: str, fname: str) -> tuple[str, FieldDecl] | None:
        for c in self.supertypes(cls):
            for f in self.classes[c].fields:
                if f.name == fname and not f.is_static:
                    return c, f
        return None

    def find_static_field(self, cls: str, fname: str) -> tuple[str, FieldDecl] | None:
        for c in self.supertypes(cls):
            for f in self.classes[c].fields:
                if f.name == fname and f.is_static:
                    return c, f
        return None

    def find_method(self, cls: str, mname: str) -> tuple[str, MethodDecl] | None:
        for c in self.supertypes(cls):
            m = self.classes[c].methods.get(mname)
            if m is not None:
                return c, m
        return None

    def constructors_of(self, cls: str) -> list[ConstructorDecl]:
        return self.classes[cls].constructors

    def is_nullable(self, type_name: str) -> bool:
        return type_name == "string" or type_name in self.classes

    def assignable(self, src: str, dst: str) -> bool:
        if src == dst:
            return True
        if src == "null":
            return self.is_nullable(dst)
        if dst in self.classes and src in self.classes:
            return self.is_subtype(src, dst)
        return False


@dataclass
class _Ctx:
    cls: ClassDecl
    return_type: str  # "void" for void methods and constructors
    has_this: bool
    locals: dict[str, str]  # name -> declared type (params included)
    params: set[str]
    path: str


class _Checker:
    def __init__(self, program: ProgramAst, prefix: str):
        self.program = program
        self.prefix = prefix
        self.force_return_type = names.force_return_type(prefix)
        self.table = TypeTable()

    def fail(self, msg: str, node, path: str = "<memory>"):
        raise MiniJTypeError(msg, path, getattr(node, "span", None))

    # -- table construction --

    def build_table(self):
        for decl in self.program.classes:
            if decl.name in RESERVED_TYPE_NAMES:
                self.fail(f"'{decl.name}' is a reserved type name", decl, decl.path)
            if self.table.has_class(decl.name):
                self.fail(f"duplicate class '{decl.name}'", decl, decl.path)
            info = ClassInfo(decl.name, decl.base, decl.is_abstract, decl=decl)
            seen_fields: set[str] = set()
            for f in decl.fields:
                if f.name in seen_fields:
                    self.fail(f"duplicate field '{f.name}' in class {decl.name}", f, decl.path)
                seen_fields.add(f.name)
                info.fields.append(f)
            arities: set[int] = set()
            for c in decl.constructors:
                if len(c.params) in arities:
                    self.fail(f"duplicate constructor arity in class {decl.name}", c, decl.path)
                arities.add(len(c.params))
                info.constructors.append(c)
            for m in decl.methods:
                if m.name in info.methods:
                    self.fail(f"duplicate method '{m.name}' in class {decl.name}", m, decl.path)
                if m.name in BUILTIN_FUNCTIONS:
                    self.fail(f"method name '{m.name}' shadows a builtin", m, decl.path)
                info.methods[m.name] = m
            self.table._add(info)
        # Resolve bases after all classes are known.
        for decl in self.program.classes:
            if decl.base is not None:
                if not self.table.has_class(decl.base):
                    self.fail(f"unknown base class '{decl.base}'", decl, decl.path)
            # Cycle detection.
            seen = set()
            cur: str | None = decl.name
            while cur is not None:
                if cur in seen:
                    self.fail(f"inheritance cycle through '{decl.name}'", decl, decl.path)
                seen.add(cur)
                cur = self.table.info(cur).base
        # Field shadowing across the hierarchy is rejected.
        for decl in self.program.classes:
            if decl.base is None:
                continue
            for f in decl.fields:
                for sup in self.table.supertypes(decl.base):
                    for sf in self.table.info(sup).fields:
                        if sf.name == f.name:
                            self.fail(
                                f"field '{f.name}' shadows a field of {sup}",
                                f, decl.path)

    def check_type_name(self, name: str, node, path: str, allow_void: bool = False):
        if name == "void":
            if not allow_void:
                self.fail("'void' is only valid as a return type", node, path)
            return
        if is_primitive(name) or self.table.has_class(name):
            return
        self.fail(f"unknown type '{name}'", node, path)

    # -- program checking --

    def run(self) -> TypeTable:
        self.build_table()
        for decl in self.program.classes:
            self.check_class(decl)
        return self.table

    def check_class(self, decl: ClassDecl):
        path = decl.path
        for f in decl.fields:
            self.check_type_name(f.type_name, f, path)
            if f.init is not None:
                ctx = _Ctx(decl, "void", has_this=not f.is_static,
                           locals={}, params=set(), path=path)
                ty = self.expr(f.init, ctx)
                if not self.table.assignable(ty, f.type_name):
                    self.fail(f"cannot initialize {f.type_name} field '{f.name}' "
                              f"from {ty}", f.init, path)
        for ctor in decl.constructors:
            self.check_callable(decl, ctor.params, ctor.body, "void", path, ctor)
        for m in decl.methods:
            if m.return_type != "void":
                self.check_type_name(m.return_type, m, path)
            self.check_callable(decl, m.params, m.body, m.return_type, path, m)
            if m.return_type != "void" and not self._block_exits(m.body):
                self.fail(f"method '{m.name}' must return a value on all paths", m, path)

    def check_callable(self, cls: ClassDecl, params: list[Param], body: Block,
                       return_type: str, path: str, node):
        ctx = _Ctx(cls, return_type, has_this=True, locals={}, params=set(), path=path)
        for p in params:
            self.check_type_name(p.type_name, p, path)
            if p.name in ctx.locals:
                self.fail(f"duplicate parameter '{p.name}'", p, path)
            ctx.locals[p.name] = p.type_name
            ctx.params.add(p.name)
        self.block(body, ctx)

    # -- statements --

    def block(self, blk: Block, ctx: _Ctx):
        for stmt in blk.stmts:
            self.stmt(stmt, ctx)

    def stmt(self, stmt: Stmt, ctx: _Ctx):
        match stmt:
            case VarDecl(type_name=t, name=n, init=init):
                self.check_type_name(t, stmt, ctx.path)
                if n in ctx.locals:
                    self.fail(f"duplicate variable '{n}'", stmt, ctx.path)
                if init is not None:
                    ty = self.expr(init, ctx)
                    if not self.table.assignable(ty, t):
                        self.fail(f"cannot assign {ty} to {t} '{n}'", stmt, ctx.path)
                ctx.locals[n] = t
            case Assign(target=target, value=value):
                tty = self.expr(target, ctx)
                vty = self.expr(value, ctx)
                if not self.table.assignable(vty, tty):
                    self.fail(f"cannot assign {vty} to {tty}", stmt, ctx.path)
            case ExprStmt(expr=expr):
                if not isinstance(expr, (MethodCall, NewObject)):
                    self.fail("only calls may be used as statements", stmt, ctx.path)
                self.expr(expr, ctx)
            case If(cond=cond, then_block=tb, else_block=eb):
                if self.expr(cond, ctx) != "bool":
                    self.fail("if condition must be bool", cond, ctx.path)
                self.block(tb, ctx)
                if eb is not None:
                    self.block(eb, ctx)
            case While(cond=cond, body=body):
                if self.expr(cond, ctx) != "bool":
                    self.fail("while condition must be bool", cond, ctx.path)
                self.block(body, ctx)
            case Return(value=value):
                if value is None:
                    if ctx.return_type != "void":
                        self.fail("missing return value", stmt, ctx.path)
                else:
                    if ctx.return_type == "void":
                        self.fail("void method cannot return a value", stmt, ctx.path)
                    ty = self.expr(value, ctx)
                    if not self.table.assignable(ty, ctx.return_type):
                        self.fail(f"cannot return {ty} from {ctx.return_type} method",
                                  stmt, ctx.path)
            case Throw(value=value):
                ty = self.expr(value, ctx)
                if not self.table.is_subtype(ty, EXCEPTION_ROOT):
                    self.fail(f"thrown value must be an Exception, got {ty}", stmt, ctx.path)
            case Try(body=body, catches=catches, finally_block=fb):
                self.block(body, ctx)
                for clause in catches:
                    if clause.type_name != self.force_return_type and not (
                            self.table.is_subtype(clause.type_name, EXCEPTION_ROOT)):
                        self.fail(f"catch type '{clause.type_name}' is not an Exception",
                                  clause, ctx.path)
                    if clause.var_name in ctx.locals:
                        self.fail(f"duplicate variable '{clause.var_name}'", clause, ctx.path)
                    bind_ty = (clause.type_name
                               if clause.type_name != self.force_return_type
                               else EXCEPTION_ROOT)
                    # The catch variable is scoped to its clause body.
                    ctx.locals[clause.var_name] = bind_ty
                    self.block(clause.body, ctx)
                    del ctx.locals[clause.var_name]
                if fb is not None:
                    self.block(fb, ctx)
            case _:
                raise TypeError(f"unknown statement: {stmt!r}")

    # -- expressions --

    def expr(self, e: Expr, ctx: _Ctx) -> str:
        ty = self._expr(e, ctx)
        e.ty = ty
        return ty

    def _expr(self, e: Expr, ctx: _Ctx) -> str:
        match e:
            case IntLit():
                return "int"
            case BoolLit():
                return "bool"
            case StringLit():
                return "string"
            case NullLit():
                return "null"
            case ThisExpr():
                if not ctx.has_this:
                    self.fail("'this' is not available here", e, ctx.path)
                return ctx.cls.name
            case VarRef(name=name):
                return self.var_ref(e, ctx)
            case FieldAccess():
                return self.field_access(e, ctx)
            case MethodCall():
                return self.method_call(e, ctx)
            case NewObject(type_name=tname, args=args):
                if not self.table.has_class(tname):
                    self.fail(f"unknown class '{tname}'", e, ctx.path)
                info = self.table.info(tname)
                if info.is_abstract:
                    self.fail(f"cannot instantiate abstract class '{tname}'", e, ctx.path)
                ctors = info.constructors
                if not ctors:
                    if args:
                        self.fail(f"class '{tname}' has no constructor taking "
                                  f"{len(args)} arguments", e, ctx.path)
                else:
                    match_ = [c for c in ctors if len(c.params) == len(args)]
                    if not match_:
                        self.fail(f"no constructor of '{tname}' takes {len(args)} "
                                  "arguments", e, ctx.path)
                    self.check_args(args, match_[0].params, e, ctx)
                for a in args:
                    if a.ty is None:
                        self.expr(a, ctx)
                return tname
            case Unary(op=op, operand=operand):
                oty = self.expr(operand, ctx)
                if op == "!":
                    if oty != "bool":
                        self.fail("'!' needs a bool operand", e, ctx.path)
                    return "bool"
                if oty != "int":
                    self.fail("unary '-' needs an int operand", e, ctx.path)
                return "int"
            case Binary(op=op, left=left, right=right):
                lty = self.expr(left, ctx)
                rty = self.expr(right, ctx)
                return self.binary(op, lty, rty, e, ctx)
        raise TypeError(f"unknown expression: {e!r}")

    def var_ref(self, e: VarRef, ctx: _Ctx) -> str:
        name = e.name
        if name in ctx.locals:
            e.binding = "param" if name in ctx.params else "local"
            return ctx.locals[name]
        if ctx.has_this:
            found = self.table.find_instance_field(ctx.cls.name, name)
            if found is not None:
                e.binding, e.owner = "field", found[0]
                return found[1].type_name
        found = self.table.find_static_field(ctx.cls.name, name)
        if found is not None:
            e.binding, e.owner = "static", found[0]
            return found[1].type_name
        self.fail(f"unknown variable '{name}'", e, ctx.path)
        raise AssertionError

    def field_access(self, e: FieldAccess, ctx: _Ctx) -> str:
        recv = e.receiver
        # Static access: the receiver is a class name that no variable hides.
        if isinstance(recv, VarRef) and recv.name not in ctx.locals \
                and self.table.has_class(recv.name) \
                and not self._resolves_as_field(recv.name, ctx):
            found = self.table.find_static_field(recv.name, e.name)
            if found is None:
                self.fail(f"class '{recv.name}' has no static field '{e.name}'",
                          e, ctx.path)
            recv.binding = "class"
            recv.ty = recv.name
            e.is_static, e.owner = True, found[0]
            return found[1].type_name
        rty = self.expr(recv, ctx)
        if not self.table.has_class(rty):
            self.fail(f"type '{rty}' has no fields", e, ctx.path)
        found = self.table.find_instance_field(rty, e.name)
        if found is None:
            self.fail(f"class '{rty}' has no field '{e.name}'", e, ctx.path)
        e.owner = found[0]
        return found[1].type_name

    def _resolves_as_field(self, name: str, ctx: _Ctx) -> bool:
        if ctx.has_this and self.table.find_instance_field(ctx.cls.name, name):
            return True
        return self.table.find_static_field(ctx.cls.name, name) is not None

    def method_call(self, e: MethodCall, ctx: _Ctx) -> str:
        if e.receiver is None:
            base = names.intrinsic_base(e.name, self.prefix)
            if base is not None:
                e.binding = "intrinsic"
                return self.intrinsic_call(base, e, ctx)
            if e.name in BUILTIN_FUNCTIONS:
                e.binding = "builtin"
                return self.builtin_call(e, ctx)
            if ctx.has_this:
                found = self.table.find_method(ctx.cls.name, e.name)
                if found is not None:
                    e.binding = "this_method"
                    self.check_args(e.args, found[1].params, e, ctx)
                    return found[1].return_type
            self.fail(f"unknown function or method '{e.name}'", e, ctx.path)
        if isinstance(e.receiver, VarRef) and e.receiver.name not in ctx.locals \
                and self.table.has_class(e.receiver.name) \
                and not self._resolves_as_field(e.receiver.name, ctx):
            self.fail("MiniJ has no static methods", e, ctx.path)
        rty = self.expr(e.receiver, ctx)
        if not self.table.has_class(rty):
            self.fail(f"type '{rty}' has no methods", e, ctx.path)
        found = self.table.find_method(rty, e.name)
        if found is None:
            self.fail(f"class '{rty}' has no method '{e.name}'", e, ctx.path)
        self.check_args(e.args, found[1].params, e, ctx)
        return found[1].return_type

    def builtin_call(self, e: MethodCall, ctx: _Ctx) -> str:
        name = e.name
        if name == "print":
            if len(e.args) != 1:
                self.fail("print takes exactly one argument", e, ctx.path)
            if self.expr(e.args[0], ctx) == "void":
                self.fail("cannot print a void value", e, ctx.path)
            return "void"
        if name == "assertTrue":
            if len(e.args) != 1:
                self.fail("assertTrue takes exactly one argument", e, ctx.path)
            if self.expr(e.args[0], ctx) != "bool":
                self.fail("assertTrue needs a bool argument", e, ctx.path)
            return "void"
        # assertEquals
        if len(e.args) != 2:
            self.fail("assertEquals takes exactly two arguments", e, ctx.path)
        lty = self.expr(e.args[0], ctx)
        rty = self.expr(e.args[1], ctx)
        if not self._comparable(lty, rty):
            self.fail(f"cannot compare {lty} with {rty}", e, ctx.path)
        return "void"

    def intrinsic_call(self, base: str, e: MethodCall, ctx: _Ctx) -> str:
        args = e.args
        path = ctx.path

        def expect(cond: bool, msg: str):
            if not cond:
                self.fail(f"intrinsic {e.name}: {msg}", e, path)

        def named_type(arg: Expr) -> str:
            expect(isinstance(arg, StringLit), "type argument must be a string literal")
            arg.ty = "string"
            tname = arg.value  # type: ignore[union-attr]
            self.check_type_name(tname, e, path)
            return tname

        if base in (names.CHECK_FOR_NULL, names.INIT_VAR, names.MODIF_VAR):
            if base == names.CHECK_FOR_NULL:
                expect(len(args) == 3, "expects (expr, key, type)")
                ty = self.expr(args[0], ctx)
                expect(isinstance(args[1], StringLit), "key must be a string literal")
                args[1].ty = "string"
                named_type(args[2])
                return ty
            expect(len(args) == 4, "expects (expr, methodId, name, type)")
            ty = self.expr(args[0], ctx)
            expect(isinstance(args[1], IntLit), "method id must be an int literal")
            args[1].ty = "int"
            expect(isinstance(args[2], StringLit), "name must be a string literal")
            args[2].ty = "string"
            named_type(args[3])
            return ty
        if base == names.START_METHOD:
            expect(len(args) == 2 and isinstance(args[0], IntLit)
                   and isinstance(args[1], ThisExpr), "expects (methodId, this)")
            args[0].ty = "int"
            self.expr(args[1], ctx)
            return "void"
        if base == names.END_METHOD:
            expect(len(args) == 1 and isinstance(args[0], IntLit), "expects (methodId)")
            args[0].ty = "int"
            return "void"
        if base == names.CATCH_ADD:
            expect(len(args) >= 1 and isinstance(args[0], IntLit), "expects (tryId, types...)")
            args[0].ty = "int"
            for a in args[1:]:
                expect(isinstance(a, StringLit), "exception types must be string literals")
                a.ty = "string"
            return "void"
        if base == names.CATCH_REMOVE:
            expect(len(args) == 1 and isinstance(args[0], IntLit), "expects (tryId)")
            args[0].ty = "int"
            return "void"
        if base == names.SKIP_LINE:
            expect(len(args) % 2 == 0, "expects (receiver, key) pairs")
            for recv, key in zip(args[::2], args[1::2]):
                self.expr(recv, ctx)
                expect(isinstance(key, StringLit), "key must be a string literal")
                key.ty = "string"
            return "bool"
        if base == names.STRATEGY_IS:
            expect(len(args) == 1 and isinstance(args[0], StringLit), "expects (strategyId)")
            args[0].ty = "string"
            return "bool"
        if base in (names.GET_VAR, names.NEW_VAR):
            expect(len(args) == 1, "expects (type)")
            return named_type(args[0])
        if base == names.WILL_CATCH:
            expect(len(args) == 1 and isinstance(args[0], StringLit), "expects (type)")
            args[0].ty = "string"
            return "bool"
        raise AssertionError(base)

    def check_args(self, args: list[Expr], params: list[Param], e, ctx: _Ctx):
        if len(args) != len(params):
            self.fail(f"expected {len(params)} arguments, got {len(args)}", e, ctx.path)
        for a, p in zip(args, params):
            aty = self.expr(a, ctx)
            if not self.table.assignable(aty, p.type_name):
                self.fail(f"argument '{p.name}' expects {p.type_name}, got {aty}",
                          a, ctx.path)

    def _comparable(self, lty: str, rty: str) -> bool:
        if lty == rty and lty != "void":
            return True
        if lty == "null":
            return self.table.is_nullable(rty) or rty == "null"
        if rty == "null":
            return self.table.is_nullable(lty)
        return lty in self.table.classes and rty in self.table.classes

    def binary(self, op: str, lty: str, rty: str, e, ctx: _Ctx) -> str:
        if op == "+":
            if lty == "int" and rty == "int":
                return "int"
            if (lty == "string" or rty == "string") and "void" not in (lty, rty):
                return "string"
            self.fail(f"'+' cannot combine {lty} and {rty}", e, ctx.path)
        if op in ("-", "*", "/", "%"):
            if lty == "int" and rty == "int":
                return "int"
            self.fail(f"'{op}' needs int operands", e, ctx.path)
        if op in ("<", "<=", ">", ">="):
            if lty == "int" and rty == "int":
                return "bool"
            self.fail(f"'{op}' needs int operands", e, ctx.path)
        if op in ("==", "!="):
            if self._comparable(lty, rty):
                return "bool"
            self.fail(f"cannot compare {lty} with {rty}", e, ctx.path)
        if op in ("&&", "||"):
            if lty == "bool" and rty == "bool":
                return "bool"
            self.fail(f"'{op}' needs bool operands", e, ctx.path)
        raise AssertionError(op)

    def _block_exits(self, blk: Block) -> bool:
        from .analysis import block_exits
        return block_exits(blk)


def typecheck(program: ProgramAst, prefix: str = names.DEFAULT_PREFIX) -> TypeTable:
    """Check the program, annotate it in place, and return its type table."""
    return _Checker(program, prefix).run()


def find_entry_class(program: ProgramAst, table: TypeTable,
                     requested: str | None = None) -> str:
    """Locate the class whose ``void main()`` is the entry point."""
    candidates = []
    for decl in program.classes:
        for method in decl.methods:
            if method.name == "main" and method.return_type == "void" \
                    and not method.params:
                candidates.append(decl.name)
    if requested is not None:
        if requested not in candidates:
            raise MiniJTypeError(f"class '{requested}' has no 'void main()'")
        return requested
    if not candidates:
        raise MiniJTypeError("no class declares 'void main()'")
    if len(candidates) > 1:
        raise MiniJTypeError(
            f"multiple main classes ({', '.join(candidates)}); pick one explicitly")
    return candidates[0]
