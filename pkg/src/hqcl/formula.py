"""Abstract syntax, parser and printer for the quantum computational language.

Concrete syntax::

    formula := disj { "(+)" disj }
    disj    := conj { "|" conj }
    conj    := unary { "&" unary }
    unary   := "~" unary | "sid" unary | "snot" unary
             | "T" "(" formula "," formula "," formula ")"
             | atom | "t" | "f" | "(" formula ")"
    atom    := "q" digits

Conjunction and disjunction are sugar: ``a & b`` is ``T(a, b, f)`` and
``a | b`` is ``~T(~a, ~b, f)``.  They are expanded while parsing so that the
introduced ``f`` leaves count towards the atomic complexity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np


class Formula:
    """Base class of AST nodes; subclasses are frozen dataclasses."""

    __slots__ = ()

    @property
    def children(self) -> tuple["Formula", ...]:
        return ()

    @property
    def is_atomic(self) -> bool:
        return not self.children

    def __str__(self) -> str:
        return to_text(self)

    def _cached_hash(self) -> int:
        # formulas are hashed constantly by the tree and gate caches; memoize
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((type(self).__name__,) + tuple(getattr(self, k) for k in self.__dataclass_fields__))
            object.__setattr__(self, "_hash", h)
        return h


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    __hash__ = Formula._cached_hash
    index: int

    def __post_init__(self):
        if int(self.index) < 1:
            raise ValueError(f"atom ids are positive integers, got {self.index!r}")

    def __repr__(self):
        return f"q{self.index}"


@dataclass(frozen=True, repr=False)
class Const(Formula):
    __hash__ = Formula._cached_hash
    value: bool

    def __repr__(self):
        return "t" if self.value else "f"


@dataclass(frozen=True, repr=False)
class Not(Formula):
    __hash__ = Formula._cached_hash
    arg: Formula

    @property
    def children(self):
        return (self.arg,)

    def __repr__(self):
        return f"Not({self.arg!r})"


@dataclass(frozen=True, repr=False)
class SqrtId(Formula):
    __hash__ = Formula._cached_hash
    arg: Formula

    @property
    def children(self):
        return (self.arg,)

    def __repr__(self):
        return f"SqrtId({self.arg!r})"


@dataclass(frozen=True, repr=False)
class SqrtNot(Formula):
    __hash__ = Formula._cached_hash
    arg: Formula

    @property
    def children(self):
        return (self.arg,)

    def __repr__(self):
        return f"SqrtNot({self.arg!r})"


@dataclass(frozen=True, repr=False)
class Toffoli(Formula):
    __hash__ = Formula._cached_hash
    first: Formula
    second: Formula
    third: Formula

    @property
    def children(self):
        return (self.first, self.second, self.third)

    def __repr__(self):
        return f"Toffoli({self.first!r}, {self.second!r}, {self.third!r})"


@dataclass(frozen=True, repr=False)
class Xor(Formula):
    __hash__ = Formula._cached_hash
    first: Formula
    second: Formula

    @property
    def children(self):
        return (self.first, self.second)

    def __repr__(self):
        return f"Xor({self.first!r}, {self.second!r})"


TRUE = Const(True)
FALSE = Const(False)


def conj(a: Formula, b: Formula) -> Formula:
    """``a & b`` as ``T(a, b, f)``."""
    return Toffoli(a, b, FALSE)


def disj(a: Formula, b: Formula) -> Formula:
    """``a | b`` as ``~T(~a, ~b, f)``."""
    return Not(Toffoli(Not(a), Not(b), FALSE))


def _as_conj(f: Formula):
    if isinstance(f, Toffoli) and f.third == FALSE:
        return f.first, f.second
    return None


def _as_disj(f: Formula):
    if isinstance(f, Not) and isinstance(f.arg, Toffoli) and f.arg.third == FALSE:
        a, b = f.arg.first, f.arg.second
        if isinstance(a, Not) and isinstance(b, Not):
            return a.arg, b.arg
    return None


# ------------------------------------------------------------------ queries


@lru_cache(maxsize=65536)
def atomic_complexity(f: Formula) -> int:
    """Number of atomic occurrences (atoms, ``t`` and ``f``) in ``f``."""
    if f.is_atomic:
        return 1
    return sum(atomic_complexity(c) for c in f.children)


def depth(f: Formula) -> int:
    if f.is_atomic:
        return 0
    return 1 + max(depth(c) for c in f.children)


def atoms(f: Formula) -> frozenset[int]:
    if isinstance(f, Atom):
        return frozenset((f.index,))
    out: frozenset[int] = frozenset()
    for c in f.children:
        out |= atoms(c)
    return out


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order walk over every node (repeats included)."""
    yield f
    for c in f.children:
        yield from subformulas(c)


def is_subformula(sub: Formula, f: Formula) -> bool:
    return any(node == sub for node in subformulas(f))


def connective_count(f: Formula) -> int:
    """Connectives as written in sugared syntax (``&`` and ``|`` count once)."""
    if f.is_atomic:
        return 0
    parts = _as_disj(f) or _as_conj(f)
    if parts is not None:
        return 1 + connective_count(parts[0]) + connective_count(parts[1])
    return 1 + sum(connective_count(c) for c in f.children)


def rename_atoms(f: Formula, mapping: dict[int, int]) -> Formula:
    if isinstance(f, Atom):
        return Atom(mapping.get(f.index, f.index))
    if f.is_atomic:
        return f
    return type(f)(*(rename_atoms(c, mapping) for c in f.children))


# ------------------------------------------------------------------ printing

_PREC_XOR, _PREC_OR, _PREC_AND, _PREC_UNARY, _PREC_ATOM = 1, 2, 3, 4, 5


def _render(f: Formula) -> tuple[str, int]:
    if isinstance(f, Atom):
        return f"q{f.index}", _PREC_ATOM
    if isinstance(f, Const):
        return ("t" if f.value else "f"), _PREC_ATOM
    parts = _as_disj(f)
    if parts is not None:
        return _infix(parts, " | ", _PREC_OR), _PREC_OR
    parts = _as_conj(f)
    if parts is not None:
        return _infix(parts, " & ", _PREC_AND), _PREC_AND
    if isinstance(f, Xor):
        return _infix((f.first, f.second), " (+) ", _PREC_XOR), _PREC_XOR
    if isinstance(f, Toffoli):
        return "T(" + ", ".join(to_text(c) for c in f.children) + ")", _PREC_ATOM
    prefix = {Not: "~", SqrtId: "sid ", SqrtNot: "snot "}[type(f)]
    return prefix + _wrap(f.arg, _PREC_UNARY), _PREC_UNARY


def _wrap(f: Formula, min_prec: int) -> str:
    text, prec = _render(f)
    return text if prec >= min_prec else f"({text})"


def _infix(parts, op: str, prec: int) -> str:
    # left-associative: the right operand must bind strictly tighter
    return _wrap(parts[0], prec) + op + _wrap(parts[1], prec + 1)


def to_text(f: Formula) -> str:
    """Concrete syntax with minimal parentheses; ``parse(to_text(f)) == f``."""
    return _render(f)[0]


# ------------------------------------------------------------------- parsing


class ParseError(ValueError):
    """Syntax error at character offset ``position`` of ``text``."""

    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.text = text
        self.position = position

    def caret(self) -> str:
        return f"{self.text}\n{' ' * self.position}^ {self.message}"


_TOKEN = re.compile(r"\s*(?:(\(\+\))|([()~&|,])|([A-Za-z_][A-Za-z0-9_]*)|(\S))")
_ATOM = re.compile(r"q([0-9]+)")


def tokenize(text: str) -> list[tuple[str, str, int]]:
    """``(kind, value, position)`` triples; kinds are op/atom/word/end."""
    tokens = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        start = m.start(m.lastindex)
        xor, punct, word, other = m.groups()
        if other is not None:
            raise ParseError(f"unknown token {other!r}", text, start)
        if word is not None:
            if _ATOM.fullmatch(word):
                if int(word[1:]) < 1:
                    raise ParseError(f"atom ids start at 1, got {word!r}", text, start)
                tokens.append(("atom", word, start))
            elif word in ("t", "f", "sid", "snot", "T"):
                tokens.append(("word", word, start))
            else:
                raise ParseError(f"unknown token {word!r}", text, start)
        else:
            tokens.append(("op", xor or punct, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        tok = self.take()
        if tok[1] != value or tok[0] == "end":
            found = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {value!r}, found {found}", self.text, tok[2])

    def formula(self) -> Formula:
        left = self.disj()
        while self.peek()[1] == "(+)":
            self.take()
            left = Xor(left, self.disj())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.peek()[1] == "|":
            self.take()
            left = disj(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.peek()[1] == "&":
            self.take()
            left = conj(left, self.unary())
        return left

    def unary(self) -> Formula:
        kind, value, pos = self.take()
        if kind == "atom":
            return Atom(int(value[1:]))
        if kind == "op" and value == "~":
            return Not(self.unary())
        if kind == "op" and value == "(":
            inner = self.formula()
            self.expect(")")
            return inner
        if kind == "word":
            if value == "t":
                return TRUE
            if value == "f":
                return FALSE
            if value == "sid":
                return SqrtId(self.unary())
            if value == "snot":
                return SqrtNot(self.unary())
            self.expect("(")
            a = self.formula()
            self.expect(",")
            b = self.formula()
            self.expect(",")
            c = self.formula()
            self.expect(")")
            return Toffoli(a, b, c)
        found = "end of input" if kind == "end" else repr(value)
        raise ParseError(f"expected a formula, found {found}", self.text, pos)


def parse(text: str) -> Formula:
    """Parse concrete syntax into the core AST."""
    p = _Parser(text)
    f = p.formula()
    kind, value, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected {value!r}", text, pos)
    return f


def as_formula(value) -> Formula:
    return value if isinstance(value, Formula) else parse(value)


# ------------------------------------------------------------ random formulas


def random_formula(
    rng: np.random.Generator,
    *,
    n_atoms: int = 3,
    max_depth: int = 3,
    constants: bool = True,
    connectives: tuple[str, ...] = ("not", "sid", "snot", "and", "or", "xor", "T"),
) -> Formula:
    """Small random formula; leaves are drawn from ``q1..q{n_atoms}`` (plus t/f)."""

    def leaf() -> Formula:
        if constants and rng.random() < 0.15:
            return TRUE if rng.random() < 0.5 else FALSE
        return Atom(int(rng.integers(1, n_atoms + 1)))

    def build(d: int) -> Formula:
        if d == 0 or rng.random() < 0.3:
            return leaf()
        op = connectives[int(rng.integers(len(connectives)))]
        if op == "not":
            return Not(build(d - 1))
        if op == "sid":
            return SqrtId(build(d - 1))
        if op == "snot":
            return SqrtNot(build(d - 1))
        if op == "and":
            return conj(build(d - 1), build(d - 1))
        if op == "or":
            return disj(build(d - 1), build(d - 1))
        if op == "xor":
            return Xor(build(d - 1), build(d - 1))
        return Toffoli(build(d - 1), build(d - 1), build(d - 1))

    return build(max_depth)
