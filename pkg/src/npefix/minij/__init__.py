"""MiniJ frontend: parsing, printing, type checking, dereference analysis."""

from .ast import ProgramAst, SourceUnit, Span, combine
from .analysis import DerefSite, crash_key, enumerate_dereferences
from .parser import parse, parse_stmt
from .printer import expr_text, print_program, stmt_text
from .typecheck import TypeTable, find_entry_class, typecheck

__all__ = [
    "DerefSite", "ProgramAst", "SourceUnit", "Span", "TypeTable",
    "combine", "crash_key", "enumerate_dereferences", "expr_text",
    "find_entry_class", "parse", "parse_stmt", "print_program", "stmt_text",
    "typecheck",
]
