"""Source patches equivalent to runtime strategies.

Every successfully deployed strategy corresponds to a one-line fix a
developer could commit:

* local injection   -> ``if (a == null) { use b instead } else { original }``
* global injection  -> ``if (a == null) { a = b; }`` before the statement
* line skipping     -> ``if (a != null) { original }``
* method skipping   -> an early-return guard on the null receiver

Suggestions are rendered as parseable MiniJ statements and can be spliced
back into the original source text for validation.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass

from ..minij import analysis, parse_stmt, printer
from ..minij.ast import (
    Assign, Binary, Block, Expr, FieldAccess, If, NewObject, NullLit,
    ProgramAst, Return, SourceUnit, Span, Stmt, VarRef,
    default_value_literal, is_primitive,
)
from ..minij.typecheck import TypeTable
from .pool import DEFAULT_DEPTH_BUDGET, Recipe, recipe_for
from .strategies import Strategy


@dataclass
class PatchSuggestion:
    crash_point: str
    strategy: Strategy
    snippet: str
    placement: str  # "before_stmt" | "replace_stmt" | "method_entry"
    path: str
    anchor: Span  # the crash statement (or the method body block)

    def to_record(self) -> dict:
        return {
            "crash_point": self.crash_point,
            "strategy": self.strategy.id,
            "parameter": self.strategy.parameter,
            "snippet": self.snippet,
            "placement": self.placement,
            "path": self.path,
        }


def _recipe_expr(recipe: Recipe | object) -> Expr:
    if isinstance(recipe, Recipe):
        return NewObject(recipe.type_name, [_recipe_expr(a) for a in recipe.args])
    if recipe is None:
        return NullLit()
    from ..minij.ast import BoolLit, IntLit, StringLit
    if isinstance(recipe, bool):
        return BoolLit(recipe)
    if isinstance(recipe, int):
        return IntLit(recipe)
    return StringLit(str(recipe))


def _replacement_expr(strategy: Strategy, table: TypeTable,
                      fallback_type: str) -> Expr:
    if strategy.id in ("S1a", "S1b", "S4b"):
        return VarRef(strategy.parameter or "")
    target = strategy.parameter or fallback_type
    if is_primitive(target):
        return default_value_literal(target)
    return _recipe_expr(recipe_for(table, target, DEFAULT_DEPTH_BUDGET))


def _substitute(stmt: Stmt, span: Span, new_expr: Expr) -> Stmt:
    """Clone the statement, replacing the expression whose span matches."""
    clone = copy.deepcopy(stmt)

    def rewrite(e):
        if isinstance(e, Expr) and e.span == span:
            return copy.deepcopy(new_expr)
        for name, child in list(vars(e).items()):
            if isinstance(child, Expr):
                setattr(e, name, rewrite(child))
            elif isinstance(child, list):
                setattr(e, name, [rewrite(c) if isinstance(c, Expr) else c
                                  for c in child])
        return e

    for name, child in list(vars(clone).items()):
        if isinstance(child, Expr):
            setattr(clone, name, rewrite(child))
        elif isinstance(child, list):
            setattr(clone, name, [rewrite(c) if isinstance(c, Expr) else c
                                  for c in child])
    return clone


def suggest_patch(program: ProgramAst, crash_point: str, strategy: Strategy,
                  table: TypeTable) -> PatchSuggestion:
    """Render the strategy as a source patch at the crash site of the
    original (uninstrumented) program."""
    site = None
    for s in analysis.enumerate_dereferences(program):
        if s.key == crash_point:
            site = s
            break
    if site is None:
        raise KeyError(f"unknown crash point {crash_point!r}")

    recv = site.receiver
    recv_text = printer.expr_text(recv)
    null_check = Binary("==", copy.deepcopy(recv), NullLit())
    not_null = Binary("!=", copy.deepcopy(recv), NullLit())

    if strategy.id in ("S1a", "S2a"):
        replacement = _replacement_expr(strategy, table, site.receiver_type)
        alt = _substitute(site.stmt, recv.span, replacement)
        guard = If(null_check, Block(stmts=[alt]),
                   Block(stmts=[copy.deepcopy(site.stmt)]))
        snippet = printer.stmt_text(guard)
        placement, anchor = "replace_stmt", site.stmt.span
    elif strategy.id in ("S1b", "S2b"):
        replacement = _replacement_expr(strategy, table, site.receiver_type)
        guard = If(null_check,
                   Block(stmts=[Assign(copy.deepcopy(recv), replacement)]), None)
        snippet = printer.stmt_text(guard)
        placement, anchor = "before_stmt", site.stmt.span
    elif strategy.id == "S3":
        guard = If(not_null, Block(stmts=[copy.deepcopy(site.stmt)]), None)
        snippet = printer.stmt_text(guard)
        placement, anchor = "replace_stmt", site.stmt.span
    else:
        if strategy.id == "S4a":
            ret: Stmt = Return(NullLit())
        elif strategy.id == "S4b":
            ret = Return(VarRef(strategy.parameter or ""))
        elif strategy.id == "S4c":
            ret = Return(_replacement_expr(strategy, table, site.receiver_type))
        else:
            ret = Return(None)
        guard = If(null_check, Block(stmts=[ret]), None)
        snippet = printer.stmt_text(guard)
        # The guard can only sit at method entry when the receiver already
        # exists there (parameter or field); for locals it goes right
        # before the crashing statement.
        entry_ok = isinstance(recv, (VarRef, FieldAccess)) and not (
            isinstance(recv, VarRef) and recv.binding == "local")
        if entry_ok:
            placement, anchor = "method_entry", site.member.body.span
        else:
            placement, anchor = "before_stmt", site.stmt.span
    parse_stmt(snippet)  # every suggestion must re-parse
    return PatchSuggestion(crash_point=crash_point, strategy=strategy,
                           snippet=snippet, placement=placement,
                           path=site.member and _site_path(program, site) or "",
                           anchor=anchor)


def _site_path(program: ProgramAst, site) -> str:
    for cls in program.classes:
        if cls.name == site.class_name:
            return cls.path
    return "<memory>"


def _indent_of(text: str, offset: int) -> str:
    line_start = text.rfind("\n", 0, offset) + 1
    indent = []
    for ch in text[line_start:offset]:
        indent.append(ch if ch in " \t" else " ")
    return "".join(indent)


def _reindent(snippet: str, indent: str) -> str:
    lines = snippet.split("\n")
    return ("\n" + indent).join(lines)


def apply_patch(unit: SourceUnit, suggestion: PatchSuggestion) -> SourceUnit:
    """Splice the suggested snippet into the original source text."""
    text = unit.text
    if suggestion.placement == "replace_stmt":
        start, end = suggestion.anchor.start, suggestion.anchor.end
        indent = _indent_of(text, start)
        new_text = text[:start] + _reindent(suggestion.snippet, indent) + text[end:]
    elif suggestion.placement == "before_stmt":
        start = suggestion.anchor.start
        indent = _indent_of(text, start)
        new_text = (text[:start] + _reindent(suggestion.snippet, indent)
                    + "\n" + indent + text[start:])
    else:  # method_entry: insert right after the body's opening brace
        brace = suggestion.anchor.start
        assert text[brace] == "{", "method body span must start at '{'"
        indent = _indent_of(text, brace) + "    "
        new_text = (text[:brace + 1] + "\n" + indent
                    + _reindent(suggestion.snippet, indent)
                    + text[brace + 1:])
    return SourceUnit(unit.path, new_text)
