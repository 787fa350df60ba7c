"""A small s-expression reader that keeps source positions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


class ParseError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0) -> None:
        self.msg, self.line, self.col = msg, line, col
        super().__init__(f"{line}:{col}: {msg}" if line else msg)


@dataclass(frozen=True)
class Atom:
    text: str
    line: int
    col: int

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class SList:
    items: tuple
    line: int
    col: int

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def __iter__(self):
        return iter(self.items)


SExpr = Union[Atom, SList]


def read_all(text: str) -> list[SExpr]:
    """Read every top-level s-expression in ``text``; ``;`` starts a comment."""
    out: list[SExpr] = []
    stack: list[tuple[list, int, int]] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "(":
            stack.append(([], line, col))
            i, col = i + 1, col + 1
            continue
        if ch == ")":
            if not stack:
                raise ParseError("unbalanced ')'", line, col)
            items, l0, c0 = stack.pop()
            node = SList(tuple(items), l0, c0)
            (stack[-1][0] if stack else out).append(node)
            i, col = i + 1, col + 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in "();":
            j += 1
        atom = Atom(text[i:j], line, col)
        (stack[-1][0] if stack else out).append(atom)
        col += j - i
        i = j
    if stack:
        _, l0, c0 = stack[-1]
        raise ParseError("unclosed '('", l0, c0)
    return out


def is_int(a: SExpr) -> bool:
    if not isinstance(a, Atom):
        return False
    t = a.text[1:] if a.text.startswith("-") and len(a.text) > 1 else a.text
    return t.isdigit()
