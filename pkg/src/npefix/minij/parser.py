"""Recursive-descent parser for MiniJ.

Grammar sketch:

    program    := classdecl+
    classdecl  := "abstract"? "class" ID ("extends" ID)? "{" member* "}"
    member     := "static"? TYPE ID ("=" expr)? ";"          # field
                | ID "(" params ")" block                    # constructor
                | ("void" | TYPE) ID "(" params ")" block    # method
    stmt       := TYPE ID ("=" expr)? ";"
                | target "=" expr ";"
                | expr ";"
                | "if" "(" expr ")" block ("else" (block | if-stmt))?
                | "while" "(" expr ")" block
                | "return" expr? ";"
                | "throw" expr ";"
                | "try" block ("catch" "(" ID ID ")" block)* ("finally" block)?

Expressions carry byte spans; every dereference site is identifiable by
(path, span).
"""

from __future__ import annotations

from ..errors import MiniJSyntaxError
from . import ast
from .ast import (
    Assign, Binary, Block, BoolLit, CatchClause, ClassDecl, ConstructorDecl,
    Expr, ExprStmt, FieldAccess, FieldDecl, If, IntLit, MethodCall,
    MethodDecl, NewObject, NullLit, Param, ProgramAst, Return, SourceUnit,
    Span, Stmt, StringLit, ThisExpr, Throw, Try, Unary, VarDecl, VarRef,
    While,
)
from .lexer import Token, tokenize


class _Parser:
    def __init__(self, unit: SourceUnit):
        self.unit = unit
        self.tokens = tokenize(unit.text, unit.path)
        self.pos = 0

    # -- token helpers --

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def at(self, kind: str, text: str | None = None, ahead: int = 0) -> bool:
        tok = self.peek(ahead)
        return tok.kind == kind and (text is None or tok.text == text)

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            tok = self.peek()
            self.pos += 1
            return tok
        return None

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.accept(kind, text)
        if tok is None:
            got = self.peek()
            want = text if text is not None else kind
            self.error(f"expected {want!r}, found {got.text or got.kind!r}", got.start)
        return tok

    def error(self, msg: str, offset: int):
        line, col = self.unit.line_col(offset)
        raise MiniJSyntaxError(msg, self.unit.path, offset, line, col)

    def span_from(self, start: int) -> Span:
        return Span(start, self.tokens[self.pos - 1].end)

    # -- program structure --

    def parse_program(self) -> ProgramAst:
        start = self.peek().start
        classes = []
        if self.at("eof"):
            self.error("expected a class declaration", start)
        while not self.at("eof"):
            classes.append(self.parse_class())
        return ProgramAst(classes=classes, span=Span(start, self.tokens[-1].end))

    def parse_class(self) -> ClassDecl:
        start = self.peek().start
        is_abstract = self.accept("kw", "abstract") is not None
        self.expect("kw", "class")
        name = self.expect("id").text
        base = None
        if self.accept("kw", "extends"):
            base = self.expect("id").text
        self.expect("sym", "{")
        decl = ClassDecl(name=name, base=base, is_abstract=is_abstract,
                         path=self.unit.path)
        while not self.accept("sym", "}"):
            if self.at("eof"):
                self.error("unbalanced braces: class body not closed", self.peek().start)
            self.parse_member(decl)
        decl.span = self.span_from(start)
        return decl

    def parse_member(self, decl: ClassDecl):
        start = self.peek().start
        if self.accept("kw", "static"):
            ftype = self.parse_type()
            fname = self.expect("id").text
            init = self.parse_expr() if self.accept("sym", "=") else None
            self.expect("sym", ";")
            decl.fields.append(FieldDecl(True, ftype, fname, init,
                                         span=self.span_from(start)))
            return
        if self.at("kw", "void"):
            self.pos += 1
            mname = self.expect("id").text
            params = self.parse_params()
            body = self.parse_block()
            decl.methods.append(MethodDecl("void", mname, params, body,
                                           span=self.span_from(start)))
            return
        # Constructor: the class's own name followed by "(".
        if self.at("id", decl.name) and self.at("sym", "(", ahead=1):
            self.pos += 1
            params = self.parse_params()
            body = self.parse_block()
            decl.constructors.append(ConstructorDecl(decl.name, params, body,
                                                     span=self.span_from(start)))
            return
        mtype = self.parse_type()
        mname = self.expect("id").text
        if self.at("sym", "("):
            params = self.parse_params()
            body = self.parse_block()
            decl.methods.append(MethodDecl(mtype, mname, params, body,
                                           span=self.span_from(start)))
            return
        init = self.parse_expr() if self.accept("sym", "=") else None
        self.expect("sym", ";")
        decl.fields.append(FieldDecl(False, mtype, mname, init,
                                     span=self.span_from(start)))

    def parse_type(self) -> str:
        return self.expect("id").text

    def parse_params(self) -> list[Param]:
        self.expect("sym", "(")
        params: list[Param] = []
        if not self.at("sym", ")"):
            while True:
                pstart = self.peek().start
                ptype = self.parse_type()
                pname = self.expect("id").text
                params.append(Param(ptype, pname, span=self.span_from(pstart)))
                if not self.accept("sym", ","):
                    break
        self.expect("sym", ")")
        return params

    # -- statements --

    def parse_block(self) -> Block:
        start = self.expect("sym", "{").start
        stmts: list[Stmt] = []
        while not self.at("sym", "}"):
            if self.at("eof"):
                self.error("unbalanced braces: block not closed", self.peek().start)
            stmts.append(self.parse_stmt())
        self.expect("sym", "}")
        return Block(stmts=stmts, span=self.span_from(start))

    def parse_stmt(self) -> Stmt:
        start = self.peek().start
        if self.at("kw", "if"):
            return self.parse_if()
        if self.accept("kw", "while"):
            self.expect("sym", "(")
            cond = self.parse_expr()
            self.expect("sym", ")")
            body = self.parse_block()
            return While(cond, body, span=self.span_from(start))
        if self.accept("kw", "return"):
            value = None if self.at("sym", ";") else self.parse_expr()
            self.expect("sym", ";")
            return Return(value, span=self.span_from(start))
        if self.accept("kw", "throw"):
            value = self.parse_expr()
            self.expect("sym", ";")
            return Throw(value, span=self.span_from(start))
        if self.at("kw", "try"):
            return self.parse_try()
        # Declaration: two consecutive identifiers.
        if self.at("id") and self.at("id", ahead=1):
            dtype = self.parse_type()
            dname = self.expect("id").text
            init = self.parse_expr() if self.accept("sym", "=") else None
            self.expect("sym", ";")
            return VarDecl(dtype, dname, init, span=self.span_from(start))
        expr = self.parse_expr()
        if self.accept("sym", "="):
            if not isinstance(expr, (VarRef, FieldAccess)):
                self.error("assignment target must be a variable or field", start)
            value = self.parse_expr()
            self.expect("sym", ";")
            return Assign(expr, value, span=self.span_from(start))
        self.expect("sym", ";")
        return ExprStmt(expr, span=self.span_from(start))

    def parse_if(self) -> If:
        start = self.expect("kw", "if").start
        self.expect("sym", "(")
        cond = self.parse_expr()
        self.expect("sym", ")")
        then_block = self.parse_block()
        else_block = None
        if self.accept("kw", "else"):
            if self.at("kw", "if"):
                nested = self.parse_if()
                else_block = Block(stmts=[nested], span=nested.span)
            else:
                else_block = self.parse_block()
        return If(cond, then_block, else_block, span=self.span_from(start))

    def parse_try(self) -> Try:
        start = self.expect("kw", "try").start
        body = self.parse_block()
        catches: list[CatchClause] = []
        while self.at("kw", "catch"):
            cstart = self.peek().start
            self.pos += 1
            self.expect("sym", "(")
            ctype = self.expect("id").text
            cvar = self.expect("id").text
            self.expect("sym", ")")
            cbody = self.parse_block()
            catches.append(CatchClause(ctype, cvar, cbody, span=self.span_from(cstart)))
        finally_block = None
        if self.accept("kw", "finally"):
            finally_block = self.parse_block()
        if not catches and finally_block is None:
            self.error("try requires at least one catch or a finally", start)
        return Try(body, catches, finally_block, span=self.span_from(start))

    # -- expressions (precedence climbing) --

    def parse_expr(self) -> Expr:
        return self.parse_or()

    def _binary_level(self, sub, ops: tuple[str, ...]) -> Expr:
        start = self.peek().start
        left = sub()
        while self.peek().kind == "sym" and self.peek().text in ops:
            op = self.peek().text
            self.pos += 1
            right = sub()
            left = Binary(op, left, right, span=self.span_from(start))
        return left

    def parse_or(self) -> Expr:
        return self._binary_level(self.parse_and, ("||",))

    def parse_and(self) -> Expr:
        return self._binary_level(self.parse_equality, ("&&",))

    def parse_equality(self) -> Expr:
        return self._binary_level(self.parse_relational, ("==", "!="))

    def parse_relational(self) -> Expr:
        return self._binary_level(self.parse_additive, ("<", "<=", ">", ">="))

    def parse_additive(self) -> Expr:
        return self._binary_level(self.parse_multiplicative, ("+", "-"))

    def parse_multiplicative(self) -> Expr:
        return self._binary_level(self.parse_unary, ("*", "/", "%"))

    def parse_unary(self) -> Expr:
        start = self.peek().start
        if self.at("sym", "!") or self.at("sym", "-"):
            op = self.peek().text
            self.pos += 1
            operand = self.parse_unary()
            return Unary(op, operand, span=self.span_from(start))
        return self.parse_postfix()

    def parse_postfix(self) -> Expr:
        start = self.peek().start
        expr = self.parse_primary()
        while self.accept("sym", "."):
            name = self.expect("id").text
            if self.at("sym", "("):
                args = self.parse_args()
                expr = MethodCall(expr, name, args, span=self.span_from(start))
            else:
                expr = FieldAccess(expr, name, span=self.span_from(start))
        return expr

    def parse_args(self) -> list[Expr]:
        self.expect("sym", "(")
        args: list[Expr] = []
        if not self.at("sym", ")"):
            while True:
                args.append(self.parse_expr())
                if not self.accept("sym", ","):
                    break
        self.expect("sym", ")")
        return args

    def parse_primary(self) -> Expr:
        start = self.peek().start
        tok = self.peek()
        if tok.kind == "int":
            self.pos += 1
            return IntLit(int(tok.text), span=self.span_from(start))
        if tok.kind == "string":
            self.pos += 1
            return StringLit(tok.text, span=self.span_from(start))
        if self.accept("kw", "true"):
            return BoolLit(True, span=self.span_from(start))
        if self.accept("kw", "false"):
            return BoolLit(False, span=self.span_from(start))
        if self.accept("kw", "null"):
            return NullLit(span=self.span_from(start))
        if self.accept("kw", "this"):
            return ThisExpr(span=self.span_from(start))
        if self.accept("kw", "new"):
            tname = self.expect("id").text
            args = self.parse_args()
            return NewObject(tname, args, span=self.span_from(start))
        if tok.kind == "id":
            self.pos += 1
            if self.at("sym", "("):
                args = self.parse_args()
                return MethodCall(None, tok.text, args, span=self.span_from(start))
            return VarRef(tok.text, span=self.span_from(start))
        if self.accept("sym", "("):
            expr = self.parse_expr()
            self.expect("sym", ")")
            return expr
        self.error(f"expected an expression, found {tok.text or tok.kind!r}", tok.start)
        raise AssertionError("unreachable")


def parse(source: SourceUnit | str, path: str = "<memory>") -> ProgramAst:
    """Parse MiniJ source into an untyped AST.

    Accepts either a SourceUnit or raw text. Raises MiniJSyntaxError with
    position information on malformed input.
    """
    unit = source if isinstance(source, SourceUnit) else SourceUnit(path, source)
    return _Parser(unit).parse_program()


def parse_stmt(text: str, path: str = "<snippet>") -> ast.Stmt:
    """Parse a single statement (used to validate patch snippets)."""
    unit = SourceUnit(path, text)
    p = _Parser(unit)
    stmt = p.parse_stmt()
    if not p.at("eof"):
        p.error("trailing input after statement", p.peek().start)
    return stmt
