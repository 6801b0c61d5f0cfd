"""Hand-rolled lexer for MiniJ (.mj) source text."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import MiniJSyntaxError

KEYWORDS = {
    "class", "extends", "abstract", "static", "void", "if", "else", "while",
    "return", "throw", "try", "catch", "finally", "new", "null", "true",
    "false", "this",
}

# Longest-match first.
SYMBOLS = [
    "==", "!=", "<=", ">=", "&&", "||",
    "{", "}", "(", ")", ";", ",", ".", "=", "<", ">",
    "+", "-", "*", "/", "%", "!",
]


@dataclass(frozen=True)
class Token:
    kind: str  # "id", "int", "string", "kw", "sym", "eof"
    text: str
    start: int
    end: int


def _is_id_start(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_id_char(c: str) -> bool:
    return c.isalnum() or c == "_"


def tokenize(text: str, path: str = "<memory>") -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(text)

    def err(msg: str, at: int):
        line = text.count("\n", 0, at) + 1
        col = at - text.rfind("\n", 0, at)
        raise MiniJSyntaxError(msg, path, at, line, col)

    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c == "/" and text.startswith("//", i):
            nl = text.find("\n", i)
            i = n if nl < 0 else nl + 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("int", text[i:j], i, j))
            i = j
            continue
        if _is_id_start(c):
            j = i
            while j < n and _is_id_char(text[j]):
                j += 1
            word = text[i:j]
            tokens.append(Token("kw" if word in KEYWORDS else "id", word, i, j))
            i = j
            continue
        if c == '"':
            j = i + 1
            out: list[str] = []
            while True:
                if j >= n:
                    err("unterminated string literal", i)
                ch = text[j]
                if ch == '"':
                    j += 1
                    break
                if ch == "\n":
                    err("newline in string literal", j)
                if ch == "\\":
                    if j + 1 >= n:
                        err("unterminated escape", j)
                    esc = text[j + 1]
                    mapped = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc)
                    if mapped is None:
                        err(f"unknown escape '\\{esc}'", j)
                    out.append(mapped)
                    j += 2
                    continue
                out.append(ch)
                j += 1
            tokens.append(Token("string", "".join(out), i, j))
            i = j
            continue
        for sym in SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("sym", sym, i, i + len(sym)))
                i += len(sym)
                break
        else:
            err(f"unexpected character {c!r}", i)
    tokens.append(Token("eof", "", n, n))
    return tokens


def escape_string(value: str) -> str:
    """Render a string literal body with MiniJ escapes."""
    out = []
    for ch in value:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        else:
            out.append(ch)
    return "".join(out)
