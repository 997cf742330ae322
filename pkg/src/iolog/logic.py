"""Order-semantic consequence over a fixed finite algebra.

Sets of elements are plain ``frozenset``\\s of element ids.  A finite set of
premises entails a conclusion when the meet of the premise values lies below
the conclusion value under every assignment of the occurring atoms.
"""
from __future__ import annotations

import itertools
from typing import Iterable

from .algebra import Binding, FiniteAlgebra
from .syntax import Formula, atoms, evaluate

__all__ = ["EmptySet", "entails", "inconsistent", "theorems", "cn", "inconsistent_pair"]


class EmptySet(ValueError):
    pass


def entails(alg: FiniteAlgebra, b: Binding, premises: Iterable[Formula],
            conclusion: Formula) -> bool:
    premises = list(premises)
    if not premises and "top" not in b:
        # no theorems without a top constant
        return False
    names = sorted(set().union(atoms(conclusion), *(atoms(p) for p in premises)))
    for values in itertools.product(alg.elements, repeat=len(names)):
        v = dict(zip(names, values))
        lhs = alg.meet_all(evaluate(p, alg, b, v) for p in premises)
        if not alg.le[lhs][evaluate(conclusion, alg, b, v)]:
            return False
    return True


def inconsistent(alg: FiniteAlgebra, s: Iterable[int]) -> bool:
    """True iff the meet of ``s`` is the lattice bottom."""
    s = list(s)
    if not s:
        raise EmptySet("inconsistency is defined for nonempty sets")
    return alg.meet_all(s) == alg.bottom


def inconsistent_pair(alg: FiniteAlgebra, x: int, y: int) -> bool:
    return alg.m[x][y] == alg.bottom


def theorems(alg: FiniteAlgebra, b: Binding) -> frozenset:
    return frozenset({alg.top}) if "top" in b else frozenset()


def cn(alg: FiniteAlgebra, b: Binding, s: Iterable[int]) -> frozenset:
    """Element-level theory of ``s``: everything above its meet."""
    s = list(s)
    if not s:
        return theorems(alg, b)
    g = alg.meet_all(s)
    return frozenset(z for z in alg.elements if alg.le[g][z])
