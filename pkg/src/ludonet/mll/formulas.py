"""Multiplicative formulas and subformula occurrences.

A formula is an atom, the dual of an atom, a tensor, or a par.  Duality
is computed by De Morgan and never stored: dual nodes exist only on
atoms, so `dual` is involutive by construction.

An occurrence is a word over {1, 2} addressing a subformula: "" is the
whole formula, "1"/"2" step into the left/right component of a binary
connective.

Text grammar: an atom is an identifier, `f^` is the dual of f (computed
at parse time), `(f * f)` is a tensor and `(f % f)` is a par.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class DualAtom:
    name: str


@dataclass(frozen=True)
class Tensor:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Par:
    left: "Formula"
    right: "Formula"


Formula = Union[Atom, DualAtom, Tensor, Par]

# A word over {1, 2}; "" addresses the formula itself.
Occurrence = str


class UndefinedOccurrence(Exception):
    """Raised when an occurrence walks off an atom."""


def dual(f: Formula) -> Formula:
    if isinstance(f, Atom):
        return DualAtom(f.name)
    if isinstance(f, DualAtom):
        return Atom(f.name)
    if isinstance(f, Tensor):
        return Par(dual(f.left), dual(f.right))
    if isinstance(f, Par):
        return Tensor(dual(f.left), dual(f.right))
    raise TypeError(f"not a formula: {f!r}")


def subformula_at(f: Formula, u: Occurrence) -> Formula:
    for step in u:
        if isinstance(f, (Atom, DualAtom)):
            raise UndefinedOccurrence(f"occurrence {u!r} walks off an atom")
        if step == "1":
            f = f.left
        elif step == "2":
            f = f.right
        else:
            raise ValueError(f"occurrence letter must be 1 or 2, got {step!r}")
    return f


def is_defined_at(f: Formula, u: Occurrence) -> bool:
    try:
        subformula_at(f, u)
    except UndefinedOccurrence:
        return False
    return True


def formula_size(f: Formula) -> int:
    if isinstance(f, (Atom, DualAtom)):
        return 1
    return 1 + formula_size(f.left) + formula_size(f.right)


def is_prefix(u: Occurrence, v: Occurrence) -> bool:
    return v.startswith(u)


def occurrences_disjoint(u: Occurrence, v: Occurrence) -> bool:
    return not (v.startswith(u) or u.startswith(v))


### text format

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*|[()*%^])")


class FormulaSyntaxError(Exception):
    pass


def format_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, DualAtom):
        return f.name + "^"
    if isinstance(f, Tensor):
        return f"({format_formula(f.left)} * {format_formula(f.right)})"
    if isinstance(f, Par):
        return f"({format_formula(f.left)} % {format_formula(f.right)})"
    raise TypeError(f"not a formula: {f!r}")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise FormulaSyntaxError(f"bad character at {text[pos:]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


def parse_formula(text: str) -> Formula:
    tokens = _tokenize(text)
    pos = 0

    def peek() -> str | None:
        return tokens[pos] if pos < len(tokens) else None

    def take(expected: str | None = None) -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise FormulaSyntaxError("unexpected end of formula")
        tok = tokens[pos]
        if expected is not None and tok != expected:
            raise FormulaSyntaxError(f"expected {expected!r}, got {tok!r}")
        pos += 1
        return tok

    def formula() -> Formula:
        tok = take()
        if tok == "(":
            left = formula()
            op = take()
            if op not in ("*", "%"):
                raise FormulaSyntaxError(f"expected * or %, got {op!r}")
            right = formula()
            take(")")
            f: Formula = Tensor(left, right) if op == "*" else Par(left, right)
        elif _IDENT.fullmatch(tok):
            f = Atom(tok)
        else:
            raise FormulaSyntaxError(f"unexpected token {tok!r}")
        while peek() == "^":
            take()
            f = dual(f)
        return f

    f = formula()
    if pos != len(tokens):
        raise FormulaSyntaxError(f"trailing tokens: {tokens[pos:]}")
    return f
