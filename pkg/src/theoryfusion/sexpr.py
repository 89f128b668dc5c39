"""Minimal s-expression reader with line/column tracking."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError


@dataclass(frozen=True)
class Sym:
    text: str
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    def __str__(self):
        return self.text


@dataclass(frozen=True)
class SList:
    items: tuple
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    def __len__(self):
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def __iter__(self):
        return iter(self.items)


_DELIMS = set("();")


def tokenize(text):
    """Yield ``(kind, text, line, col)`` with kind in ``( ) sym``."""
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c in "()":
            yield c, c, line, col
            i += 1
            col += 1
            continue
        if c == '"':
            raise ParseError("string literals are not supported", line, col)
        start, scol = i, col
        while i < n and not text[i].isspace() and text[i] not in _DELIMS and text[i] != '"':
            i += 1
            col += 1
        yield "sym", text[start:i], line, scol


def read_all(text):
    """Parse every top-level form in ``text``."""
    stack = [[]]
    opens = []
    for kind, tok, line, col in tokenize(text):
        if kind == "(":
            stack.append([])
            opens.append((line, col))
        elif kind == ")":
            if not opens:
                raise ParseError("unbalanced ')'", line, col)
            items = stack.pop()
            oline, ocol = opens.pop()
            stack[-1].append(SList(tuple(items), oline, ocol))
        else:
            stack[-1].append(Sym(tok, line, col))
    if opens:
        line, col = opens[-1]
        raise ParseError("unclosed '('", line, col)
    return stack[0]


def read_one(text):
    forms = read_all(text)
    if len(forms) != 1:
        raise ParseError(f"expected exactly one form, found {len(forms)}", 1, 1)
    return forms[0]


def where(node):
    return getattr(node, "line", None), getattr(node, "col", None)
