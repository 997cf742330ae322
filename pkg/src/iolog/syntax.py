"""Propositional formulas: AST, parser, printer and algebraic evaluation.

Grammar, loosest to tightest binding::

    coimpl  := impl ('-<' impl)*          left associative
    impl    := disj ('->' impl)?          right associative
    disj    := conj ('|' conj)*
    conj    := unary ('&' unary)*
    unary   := '~' unary | atom | 'T' | 'F' | '(' coimpl ')'

Unicode spellings ``¬ ∧ ∨ → ⤙ ⊤ ⊥`` are accepted as well.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from .algebra import Binding, FiniteAlgebra

__all__ = [
    "Atom", "Top", "Bot", "Neg", "And", "Or", "Impl", "Coimpl", "Formula",
    "ParseError", "UnboundConnective", "UnassignedAtom",
    "parse", "to_text", "evaluate", "atoms",
]


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Impl:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Coimpl:
    left: "Formula"
    right: "Formula"


Formula = Union[Atom, Top, Bot, Neg, And, Or, Impl, Coimpl]

_BINARY = {And: "&", Or: "|", Impl: "->", Coimpl: "-<"}


class ParseError(ValueError):
    def __init__(self, text: str, pos: int, expected):
        self.text = text
        self.offset = len(text[:pos].encode("utf-8"))
        self.expected = frozenset(expected)
        got = repr(text[pos]) if pos < len(text) else "end of input"
        super().__init__(f"at offset {self.offset}: expected one of "
                         f"{', '.join(sorted(self.expected))}; got {got}")


class UnboundConnective(KeyError):
    def __init__(self, symbol):
        self.symbol = symbol
        super().__init__(symbol)

    def __str__(self):
        return f"connective {self.symbol!r} is not bound"


class UnassignedAtom(KeyError):
    def __init__(self, name):
        self.name = name
        super().__init__(name)

    def __str__(self):
        return f"atom {self.name!r} has no value"


_ATOM = re.compile(r"[a-z][a-z0-9_]*")
_UNICODE = {"¬": "~", "∧": "&", "∨": "|", "→": "->", "⤙": "-<", "⊤": "T", "⊥": "F"}


def _tokenize(text: str):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in _UNICODE:
            toks.append((_UNICODE[c], i))
            i += 1
        elif text.startswith("->", i) or text.startswith("-<", i):
            toks.append((text[i:i + 2], i))
            i += 2
        elif c in "~&|()":
            toks.append((c, i))
            i += 1
        elif c in "TF" and not re.match(r"\w", text[i + 1:i + 2]):
            toks.append((c, i))
            i += 1
        elif "a" <= c <= "z":
            k = _ATOM.match(text, i).end()
            toks.append(("atom:" + text[i:k], i))
            i = k
        else:
            raise ParseError(text, i, {"atom", "T", "F", "~", "("})
    toks.append(("$", n))
    return toks


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        raise ParseError(self.text, self.toks[self.i][1], expected)

    def coimpl(self):
        f = self.impl()
        while self.peek() == "-<":
            self.take()
            f = Coimpl(f, self.impl())
        return f

    def impl(self):
        f = self.disj()
        if self.peek() == "->":
            self.take()
            return Impl(f, self.impl())
        return f

    def disj(self):
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self):
        tok = self.peek()
        if tok == "~":
            self.take()
            return Neg(self.unary())
        if tok == "T":
            self.take()
            return Top()
        if tok == "F":
            self.take()
            return Bot()
        if tok.startswith("atom:"):
            self.take()
            return Atom(tok[5:])
        if tok == "(":
            self.take()
            f = self.coimpl()
            if self.peek() != ")":
                self.fail({")", "&", "|", "->", "-<"})
            self.take()
            return f
        self.fail({"atom", "T", "F", "~", "("})


def parse(text: str) -> Formula:
    """Parse ``text`` into a formula; raises :class:`ParseError`."""
    p = _Parser(text)
    f = p.coimpl()
    if p.peek() != "$":
        p.fail({"end of input", "&", "|", "->", "-<"})
    return f


def to_text(f: Formula) -> str:
    """Canonical ASCII rendering; every binary node is parenthesized."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Bot):
        return "F"
    if isinstance(f, Neg):
        return "~" + to_text(f.arg)
    return f"({to_text(f.left)} {_BINARY[type(f)]} {to_text(f.right)})"


def atoms(f: Formula) -> set[str]:
    if isinstance(f, Atom):
        return {f.name}
    if isinstance(f, (Top, Bot)):
        return set()
    if isinstance(f, Neg):
        return atoms(f.arg)
    return atoms(f.left) | atoms(f.right)


def evaluate(f: Formula, alg: FiniteAlgebra, b: Binding, v: Mapping[str, int]) -> int:
    """Homomorphic value of ``f`` in ``alg`` under assignment ``v``."""
    if isinstance(f, Atom):
        if f.name not in v:
            raise UnassignedAtom(f.name)
        return alg.element(v[f.name])
    if isinstance(f, Top):
        if "top" not in b:
            raise UnboundConnective("top")
        return alg.top
    if isinstance(f, Bot):
        if "bot" not in b:
            raise UnboundConnective("bot")
        return alg.bottom
    if isinstance(f, Neg):
        if "neg" not in b:
            raise UnboundConnective("neg")
        return b.unary(alg, "neg")[evaluate(f.arg, alg, b, v)]
    sym = {And: "and", Or: "or", Impl: "impl", Coimpl: "coimpl"}[type(f)]
    if sym not in b:
        raise UnboundConnective(sym)
    x = evaluate(f.left, alg, b, v)
    y = evaluate(f.right, alg, b, v)
    if sym == "and":
        return alg.m[x][y]
    if sym == "or":
        return alg.j[x][y]
    return b.binary(alg, sym)[x][y]
