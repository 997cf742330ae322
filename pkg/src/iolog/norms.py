"""Normative systems over a finite algebra and their rule closures.

A :class:`NormRelation` is a set of element pairs ``(a, x)``, read "given
``a``, it should be that ``x``", stored as one bitmask row per antecedent.
:func:`close` computes the least relation containing ``N`` and closed under a
set of Horn rules, delta-driven; :func:`naive_close` is the full-rescan
reference used to test it.
"""
from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .algebra import Binding, FiniteAlgebra, PropertyReport, resolve_algebra
from .syntax import evaluate, parse

__all__ = [
    "RULES", "PRESETS", "RuleSet", "parse_rules",
    "NormRelation", "DerivationTrace", "TraceUnavailable",
    "close", "extend", "naive_close", "derivable", "extract_trace", "out",
    "instances", "first_violation", "is_closed",
    "internally_coherent", "almost_included",
    "NormFile", "load_norms", "norms_from_json",
]

RULES = ("TOP", "BOT", "SI", "WO", "AND", "OR", "CT", "EX", "R_AND", "R_CT", "EX_OR", "EQ",
         "DD", "UD")

RuleSet = frozenset

PRESETS = {
    "N1": frozenset({"TOP", "SI", "WO", "AND"}),
}
PRESETS["N2"] = PRESETS["N1"] | {"OR"}
PRESETS["N3"] = PRESETS["N1"] | {"CT"}
PRESETS["N4"] = PRESETS["N2"] | {"CT"}

_RULE_ALIASES = {"R-AND": "R_AND", "R-CT": "R_CT", "EX-OR": "EX_OR", "⊤": "TOP", "⊥": "BOT"}


def parse_rules(spec) -> frozenset:
    """Rule set from a preset name, a comma separated list, or an iterable."""
    if isinstance(spec, str):
        spec = spec.strip()
        if spec.upper() in PRESETS:
            return PRESETS[spec.upper()]
        items = [s for s in spec.replace(" ", "").split(",") if s]
    else:
        items = list(spec)
    out = set()
    for item in items:
        if item.upper() in PRESETS:
            out |= PRESETS[item.upper()]
            continue
        r = _RULE_ALIASES.get(item, item.upper())
        if r not in RULES:
            raise ValueError(f"unknown rule {item!r}")
        out.add(r)
    return frozenset(out)


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class NormRelation:
    """Immutable set of element pairs over one algebra (a bit matrix)."""

    __slots__ = ("alg", "rows", "_hash")

    def __init__(self, alg: FiniteAlgebra, rows: Iterable[int]):
        rows = tuple(rows)
        if len(rows) != alg.size:
            raise ValueError("one row per element expected")
        full = alg.full_mask
        if any(r & ~full for r in rows):
            raise ValueError("pair out of range")
        self.alg = alg
        self.rows = rows
        self._hash = None

    @classmethod
    def _trusted(cls, alg: FiniteAlgebra, rows) -> "NormRelation":
        # no range validation; callers guarantee well-formed rows
        self = object.__new__(cls)
        self.alg = alg
        self.rows = tuple(rows)
        self._hash = None
        return self

    @classmethod
    def from_pairs(cls, alg: FiniteAlgebra, pairs: Iterable[tuple[int, int]]) -> "NormRelation":
        rows = [0] * alg.size
        for a, x in pairs:
            a, x = alg.element(a), alg.element(x)
            rows[a] |= 1 << x
        return cls(alg, rows)

    @classmethod
    def empty(cls, alg: FiniteAlgebra) -> "NormRelation":
        return cls(alg, [0] * alg.size)

    @classmethod
    def full(cls, alg: FiniteAlgebra) -> "NormRelation":
        return cls(alg, [alg.full_mask] * alg.size)

    @classmethod
    def from_code(cls, alg: FiniteAlgebra, code: int) -> "NormRelation":
        """Relation number ``code`` in the enumeration of all ``2**(n*n)``."""
        n = alg.size
        mask = alg.full_mask
        return cls(alg, [(code >> (n * a)) & mask for a in range(n)])

    @property
    def code(self) -> int:
        n = self.alg.size
        return sum(r << (n * a) for a, r in enumerate(self.rows))

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [(a, x) for a, r in enumerate(self.rows) for x in _bits(r)]

    def outputs(self, a: int) -> frozenset:
        return frozenset(_bits(self.rows[a]))

    def __contains__(self, pair) -> bool:
        a, x = pair
        return bool(self.rows[a] >> x & 1)

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return sum(bin(r).count("1") for r in self.rows)

    def __bool__(self):
        return any(self.rows)

    def __eq__(self, other):
        if isinstance(other, NormRelation):
            return self.alg is other.alg and self.rows == other.rows
        if isinstance(other, (set, frozenset)):
            return set(self.pairs) == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((id(self.alg), self.rows))
        return self._hash

    def __le__(self, other: "NormRelation") -> bool:
        return all(r & ~s == 0 for r, s in zip(self.rows, other.rows))

    def __ge__(self, other: "NormRelation") -> bool:
        return other <= self

    def __lt__(self, other):
        return self <= other and self.rows != other.rows

    def __or__(self, other: "NormRelation") -> "NormRelation":
        return NormRelation(self.alg, (r | s for r, s in zip(self.rows, other.rows)))

    def __and__(self, other: "NormRelation") -> "NormRelation":
        return NormRelation(self.alg, (r & s for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other: "NormRelation") -> "NormRelation":
        return NormRelation(self.alg, (r & ~s for r, s in zip(self.rows, other.rows)))

    def complement(self) -> "NormRelation":
        full = self.alg.full_mask
        return NormRelation(self.alg, (full & ~r for r in self.rows))

    def add(self, *pairs) -> "NormRelation":
        return self | NormRelation.from_pairs(self.alg, pairs)

    def __repr__(self):
        lab = self.alg.label
        body = ", ".join(f"({lab(a)},{lab(x)})" for a, x in self.pairs)
        return f"NormRelation({self.alg.name}: {{{body}}})"

    def to_json(self, labels: bool = False) -> list:
        if labels:
            lab = self.alg.label
            return [[lab(a), lab(x)] for a, x in self.pairs]
        return [list(p) for p in self.pairs]


# ---------------------------------------------------------------------------
# rule instances (used by the reference closure and by closure audits)


def instances(rel: NormRelation, rule: str):
    """Yield ``(premises, conclusion)`` for every instance of ``rule`` whose
    premises all lie in ``rel``."""
    alg = rel.alg
    rows = rel.rows
    m, j, E = alg.m, alg.j, alg.elements
    bot, top = alg.bottom, alg.top
    if rule == "TOP":
        yield (), (top, top)
    elif rule == "BOT":
        yield (), (bot, bot)
    elif rule == "SI":
        for b in E:
            for x in _bits(rows[b]):
                for a in _bits(alg.down[b]):
                    yield ((b, x),), (a, x)
    elif rule == "WO":
        for a in E:
            for x in _bits(rows[a]):
                for y in _bits(alg.up[x]):
                    yield ((a, x),), (a, y)
    elif rule in ("AND", "DD", "R_AND"):
        for a in E:
            xs = list(_bits(rows[a]))
            for x in xs:
                for y in xs:
                    if rule == "R_AND" and m[a][m[x][y]] == bot:
                        continue
                    yield ((a, x), (a, y)), (a, m[x][y])
    elif rule in ("OR", "UD"):
        for x in E:
            ants = [a for a in E if rows[a] >> x & 1]
            for a in ants:
                for b in ants:
                    yield ((a, x), (b, x)), (j[a][b], x)
    elif rule in ("CT", "R_CT"):
        for a in E:
            for x in _bits(rows[a]):
                c = m[a][x]
                for y in _bits(rows[c]):
                    if rule == "R_CT" and m[c][y] == bot:
                        continue
                    yield ((a, x), (c, y)), (a, y)
    elif rule == "EX":
        for a in E:
            for z in _bits(rows[a]):
                for x in E:
                    for y in _bits(alg.disjoint[a]):
                        if j[x][y] == z:
                            yield ((a, z),), (a, x)
    elif rule == "EX_OR":
        ps = rel.pairs
        for a, x in ps:
            for b, y in ps:
                yield ((a, x), (b, y)), (j[a][b], j[x][y])
    elif rule == "EQ":
        return
    else:
        raise ValueError(f"unknown rule {rule!r}")


def first_violation(rel: NormRelation, rule: str):
    """First rule instance with premises in ``rel`` but conclusion outside."""
    for prem, concl in instances(rel, rule):
        if concl not in rel:
            return prem, concl
    return None


def is_closed(rel: NormRelation, rule: str) -> bool:
    return first_violation(rel, rule) is None


def naive_close(n: NormRelation, rules: Iterable[str]) -> NormRelation:
    """Reference least fixpoint: rescan every rule until nothing is added."""
    rules = sorted(parse_rules(rules))
    cur = n
    while True:
        rows = list(cur.rows)
        for rule in rules:
            for _, (a, x) in instances(cur, rule):
                rows[a] |= 1 << x
        nxt = NormRelation(cur.alg, rows)
        if nxt == cur:
            return cur
        cur = nxt


# ---------------------------------------------------------------------------
# semi-naive closure with justifications


class TraceUnavailable(KeyError):
    def __str__(self):
        return f"pair {self.args[0]} is not derivable"


@dataclass
class DerivationTrace:
    """Justification of every pair of a closure.

    ``steps[pair]`` is ``(rule, premises)``; base pairs carry rule ``"BASE"``
    and no premises.  ``order`` lists pairs in derivation order, and every
    premise precedes the pair it justifies.
    """

    steps: dict = field(default_factory=dict)
    order: list = field(default_factory=list)

    def __contains__(self, pair):
        return pair in self.steps

    def explain(self, pair) -> list:
        """Derivation chain for ``pair``: ``[(pair, rule, premises), ...]``,
        premises before conclusions."""
        if pair not in self.steps:
            raise TraceUnavailable(pair)
        needed, stack = set(), [pair]
        while stack:
            p = stack.pop()
            if p in needed:
                continue
            needed.add(p)
            stack.extend(self.steps[p][1])
        return [(p, *self.steps[p]) for p in self.order if p in needed]


def close(n: NormRelation, rules, seed: int | None = None) -> tuple[NormRelation, DerivationTrace]:
    """Least extension of ``n`` closed under ``rules``, with its trace.

    With ``seed``, the initial agenda and the rule order are shuffled; the
    resulting relation does not depend on it.
    """
    rules = parse_rules(rules)
    trace = DerivationTrace()
    base = n.pairs
    rng = random.Random(seed) if seed is not None else None
    if rng:
        rng.shuffle(base)
    for p in base:
        trace.steps[p] = ("BASE", ())
        trace.order.append(p)
    rows = _saturate(n.alg, list(n.rows), base, rules, trace, rng, axioms=True)
    return NormRelation(n.alg, rows), trace


def extend(closed: NormRelation, pairs, rules) -> NormRelation:
    """Closure of ``closed + pairs``, assuming ``closed`` is already closed
    under ``rules``; only consequences of the new pairs are explored."""
    rules = parse_rules(rules)
    rows = list(closed.rows)
    fresh = []
    for a, x in pairs:
        if not rows[a] >> x & 1:
            rows[a] |= 1 << x
            fresh.append((a, x))
    if not fresh:
        return closed
    return NormRelation(closed.alg, _saturate(closed.alg, rows, fresh, rules, None, None))


@lru_cache(maxsize=64)
def _preimages(alg):
    """``ct_pre[c]``: pairs ``(d, z)`` with ``d ∧ z = c`` (CT fired with the new
    pair as second premise); ``ex_pre[z]``: pairs ``(x, y)`` with ``x ∨ y = z``."""
    E, m, j = alg.elements, alg.m, alg.j
    ct_pre = [[] for _ in E]
    ex_pre = [[] for _ in E]
    for d in E:
        for z in E:
            ct_pre[m[d][z]].append((d, z))
            ex_pre[j[d][z]].append((d, z))
    return ct_pre, ex_pre


def _saturate(alg, rows, agenda, rules, trace, rng, axioms=False):
    m, j, E = alg.m, alg.j, alg.elements
    bot, top = alg.bottom, alg.top
    agenda = deque(agenda)

    def add(a, x, rule, prem):
        bit = 1 << x
        if rows[a] & bit:
            return
        rows[a] |= bit
        if trace is not None:
            trace.steps[(a, x)] = (rule, prem)
            trace.order.append((a, x))
        agenda.append((a, x))

    if axioms and "TOP" in rules:
        add(top, top, "TOP", ())
    if axioms and "BOT" in rules:
        add(bot, bot, "BOT", ())

    active = [r for r in RULES if r in rules and r not in ("TOP", "BOT", "EQ")]
    ct_pre, ex_pre = _preimages(alg)

    while agenda:
        a, x = agenda.popleft()
        p = (a, x)
        if rng:
            rng.shuffle(active)
        for rule in active:
            if rule == "SI":
                for c in _bits(alg.down[a]):
                    if not rows[c] >> x & 1:
                        add(c, x, "SI", (p,))
            elif rule == "WO":
                for y in _bits(alg.up[x] & ~rows[a]):
                    add(a, y, "WO", (p,))
            elif rule in ("AND", "DD", "R_AND"):
                for y in _bits(rows[a]):
                    z = m[x][y]
                    if rule == "R_AND" and m[a][z] == bot:
                        continue
                    add(a, z, rule, (p, (a, y)))
            elif rule in ("OR", "UD"):
                for b in E:
                    if rows[b] >> x & 1:
                        add(j[a][b], x, rule, (p, (b, x)))
            elif rule in ("CT", "R_CT"):
                guarded = rule == "R_CT"
                c = m[a][x]
                for y in _bits(rows[c]):
                    if guarded and m[c][y] == bot:
                        continue
                    add(a, y, rule, (p, (c, y)))
                # p as the second premise (a∧x, y) = (d∧z, x)
                for d, z in ct_pre[a]:
                    if rows[d] >> z & 1 and not (guarded and m[a][x] == bot):
                        add(d, x, rule, ((d, z), p))
            elif rule == "EX":
                for u, y in ex_pre[x]:
                    if m[a][y] == bot:
                        add(a, u, "EX", (p,))
            elif rule == "EX_OR":
                for b in E:
                    for y in _bits(rows[b]):
                        add(j[a][b], j[x][y], "EX_OR", (p, (b, y)))
    return rows


def derivable(n: NormRelation, rules, pair) -> bool:
    closed, _ = close(n, rules)
    return tuple(pair) in closed


def extract_trace(n: NormRelation, rules, pair) -> list:
    _, trace = close(n, rules)
    return trace.explain(tuple(pair))


def out(n: NormRelation, rules, inputs: Iterable[int]) -> frozenset:
    """Output of the closed system for the given inputs."""
    closed, _ = close(n, rules)
    mask = 0
    for a in inputs:
        mask |= closed.rows[a]
    return frozenset(_bits(mask))


# ---------------------------------------------------------------------------
# coherence


def internally_coherent(n: NormRelation) -> PropertyReport:
    """Coherent unless some consistent antecedent obliges two disjoint outputs.

    The witness is ``(a, x, y)`` with ``(a, x), (a, y)`` in ``n``, ``a != ⊥``
    and ``x ∧ y = ⊥``.
    """
    alg = n.alg
    for a in alg.elements:
        if a == alg.bottom:
            continue
        row = n.rows[a]
        for x in sorted(_bits(row), reverse=True):
            clash = row & alg.disjoint[x]
            if clash:
                y = next(_bits(clash))
                return PropertyReport("internal-coherence", False, (a, x, y), instances=len(n))
    return PropertyReport("internal-coherence", True, instances=len(n))


def almost_included(n: NormRelation, other: NormRelation) -> bool:
    bot = n.alg.bottom
    return all(a == bot or r & ~s == 0 for a, (r, s) in enumerate(zip(n.rows, other.rows)))


# ---------------------------------------------------------------------------
# files


@dataclass
class NormFile:
    alg: FiniteAlgebra
    binding: Binding
    relation: NormRelation
    role: str = "norms"
    raw: Mapping = field(default_factory=dict)


def norms_from_json(raw: Mapping, base: Path | None = None, alg=None, binding=None) -> NormFile:
    """Concretize a norm file: every formula pair is evaluated under the
    file's assignment."""
    if alg is None:
        alg, binding = resolve_algebra(str(raw["algebra"]), base)
    assignment = {k: alg.element(v) for k, v in dict(raw.get("assignment", {})).items()}
    pairs = []
    for item in raw.get("pairs", ()):
        lhs, rhs = item
        pairs.append((evaluate(parse(str(lhs)), alg, binding, assignment),
                      evaluate(parse(str(rhs)), alg, binding, assignment)))
    rel = NormRelation.from_pairs(alg, pairs)
    return NormFile(alg, binding, rel, str(raw.get("role", "norms")), raw)


def load_norms(path, alg=None, binding=None) -> NormFile:
    path = Path(path)
    with open(path) as fh:
        raw = json.load(fh)
    return norms_from_json(raw, path.parent, alg, binding)
