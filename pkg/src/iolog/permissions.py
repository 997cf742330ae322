"""Permission systems induced by a normative system, and closure auditors.

Constructions (all over one finite algebra, on element pairs):

* negative permission ``P_N``: ``x`` is permitted under ``a`` when it is
  consistent with every obligation under ``a``;
* dual negative permission ``D_N``: some ``b`` disjoint from ``a`` carries no
  obligation of ``x``;
* static positive permission ``S(P, N)``: what follows from ``N`` plus one
  explicit permission;
* dynamic positive permission: forbidding ``x`` under ``a`` would clash with
  an explicit permission;
* generalized dynamic permission ``E``: ``P_H`` intersected over a directed
  family of coherent extensions ``H`` of ``N``.

The auditors in :func:`check_rule_closure` answer "is this relation closed
under rule X" with a witness when it is not; they never close anything.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .algebra import Binding, FiniteAlgebra, PropertyReport
from .norms import PRESETS, NormRelation, _bits, close, extend, load_norms, parse_rules
from .syntax import UnboundConnective

__all__ = [
    "negative_permission", "negative_permission_classical",
    "dual_negative", "dual_negative_classical",
    "static_positive", "cross_coherent", "dynamic_positive", "dynamic_positive_classical",
    "ExtensionFamily", "FamilyError", "FamilyEmpty", "FamilyNotUpDirected",
    "MemberNotClosed", "MemberNotCrossCoherent", "MemberMissingBase",
    "generalized_dynamic", "load_family",
    "VARIANTS", "canonical_variant", "check_rule_closure",
    "PermissionOutsideNegative", "PresetWarning",
]


class PermissionOutsideNegative(UserWarning):
    """An explicit permission is not negatively permitted by N."""


class PresetWarning(UserWarning):
    pass


def _neg_table(n: NormRelation, neg, binding: Binding | None) -> Sequence[int]:
    if neg is not None:
        return neg
    if binding is None or "neg" not in binding:
        raise UnboundConnective("neg")
    return binding.unary(n.alg, "neg")


def _clash(alg: FiniteAlgebra, mask: int) -> int:
    """Elements disjoint from at least one element of ``mask``."""
    out = 0
    for y in _bits(mask):
        out |= alg.disjoint[y]
    return out


# ---------------------------------------------------------------------------
# negative and dual negative permission


def negative_permission(n: NormRelation) -> NormRelation:
    alg = n.alg
    full = alg.full_mask
    return NormRelation(alg, (full & ~_clash(alg, r) for r in n.rows))


def negative_permission_classical(n: NormRelation, neg=None, binding=None) -> NormRelation:
    """``{(a, x) : (a, ¬x) not in N}`` for a given negation table."""
    neg = _neg_table(n, neg, binding)
    alg = n.alg
    return NormRelation.from_pairs(alg, ((a, x) for a in alg.elements for x in alg.elements
                                         if not n.rows[a] >> neg[x] & 1))


def dual_negative(n: NormRelation) -> NormRelation:
    alg = n.alg
    full = alg.full_mask
    rows = []
    for a in alg.elements:
        r = 0
        for b in _bits(alg.disjoint[a]):
            r |= full & ~n.rows[b]
        rows.append(r)
    return NormRelation(alg, rows)


def dual_negative_classical(n: NormRelation, neg=None, binding=None) -> NormRelation:
    neg = _neg_table(n, neg, binding)
    full = n.alg.full_mask
    return NormRelation(n.alg, (full & ~n.rows[neg[a]] for a in n.alg.elements))


# ---------------------------------------------------------------------------
# static and dynamic positive permission


def static_positive(p: NormRelation, n: NormRelation, rules, *, check: bool = True) -> NormRelation:
    """Union of the closures of ``N + {p}`` over ``p`` in ``P``.

    With ``check``, a :class:`PermissionOutsideNegative` warning is issued
    when ``P`` is not contained in ``P_N``; the value is computed regardless.
    """
    rules = parse_rules(rules)
    if check:
        outside = p - negative_permission(n)
        if outside:
            warnings.warn(f"P is not contained in P_N: {outside.pairs[:4]}",
                          PermissionOutsideNegative, stacklevel=2)
    base = close(n, rules)[0]
    if not p:
        return base
    out = NormRelation.empty(n.alg)
    for pair in p.pairs:
        out = out | extend(base, [pair], rules)
    return out


def _cross_witness(n: NormRelation, s: NormRelation):
    alg = n.alg
    for g in alg.elements:
        if g == alg.bottom:
            continue
        srow = s.rows[g]
        for x in _bits(n.rows[g]):
            hit = srow & alg.disjoint[x]
            if hit:
                return g, x, next(_bits(hit))
    return None


def cross_coherent(p: NormRelation, n: NormRelation, rules, s: NormRelation | None = None
                   ) -> PropertyReport:
    """Cross-coherence of ``N`` with ``P``.

    Incoherent when some ``(g, x)`` in ``N`` and ``(g, y)`` in ``S(P, N)``
    have ``g != ⊥`` and ``x ∧ y = ⊥``; the witness is ``(g, x, y)``.  Pass
    ``s`` to test against a precomputed static system instead.
    """
    if s is None:
        s = static_positive(p, n, rules, check=False)
    w = _cross_witness(n, s)
    return PropertyReport("cross-coherence", w is None, w, instances=len(n))


def _warn_preset(rules):
    if rules == PRESETS["N4"]:
        warnings.warn("dynamic permission is defined for N1 to N3; N4 accepted as is",
                      PresetWarning, stacklevel=3)


def dynamic_positive(p: NormRelation, n: NormRelation, rules) -> NormRelation:
    """Pairs ``(a, x)`` whose prohibition clashes with an explicit permission.

    ``(a, x)`` is in the result iff for some ``x'`` disjoint from ``x``, the
    closure of ``N + {(a, x')}`` obliges some ``w'`` under some ``c != ⊥``
    while ``S(P, N)`` permits a ``w`` under ``c`` with ``w ∧ w' = ⊥``.
    ``x' = w' = ⊥`` is an admissible choice; no witness is excluded.
    """
    rules = parse_rules(rules)
    _warn_preset(rules)
    alg = n.alg
    s = static_positive(p, n, rules, check=False)
    live = [(c, _clash(alg, s.rows[c])) for c in alg.elements
            if c != alg.bottom and s.rows[c]]
    base = close(n, rules)[0]
    rows = [0] * alg.size
    for a in alg.elements:
        for xp in alg.elements:
            c_rel = extend(base, [(a, xp)], rules)
            if any(c_rel.rows[c] & u for c, u in live):
                rows[a] |= alg.disjoint[xp]
    return NormRelation(alg, rows)


def dynamic_positive_classical(p: NormRelation, n: NormRelation, rules, neg=None,
                               binding=None) -> NormRelation:
    """Canonical-witness version: ``x' = ¬x`` and ``w' = ¬w``."""
    rules = parse_rules(rules)
    _warn_preset(rules)
    neg = _neg_table(n, neg, binding)
    alg = n.alg
    s = static_positive(p, n, rules, check=False)
    live = []
    for c in alg.elements:
        if c != alg.bottom and s.rows[c]:
            live.append((c, _negmask(neg, s.rows[c])))
    base = close(n, rules)[0]
    rows = [0] * alg.size
    cache: dict = {}
    for a in alg.elements:
        for x in alg.elements:
            key = (a, neg[x])
            if key not in cache:
                c_rel = extend(base, [key], rules)
                cache[key] = any(c_rel.rows[c] & u for c, u in live)
            if cache[key]:
                rows[a] |= 1 << x
    return NormRelation(alg, rows)


def _negmask(neg, mask: int) -> int:
    out = 0
    for w in _bits(mask):
        out |= 1 << neg[w]
    return out


# ---------------------------------------------------------------------------
# generalized dynamic permission


class FamilyError(ValueError):
    pass


class FamilyEmpty(FamilyError):
    pass


class FamilyNotUpDirected(FamilyError):
    def __init__(self, i, j):
        self.members = (i, j)
        super().__init__(f"members {i} and {j} have no common upper bound in the family")


class MemberNotClosed(FamilyError):
    def __init__(self, i, rule, instance):
        self.member, self.rule, self.instance = i, rule, instance
        super().__init__(f"member {i} is not closed under {rule}: {instance}")


class MemberNotCrossCoherent(FamilyError):
    def __init__(self, i, witness):
        self.member, self.witness = i, witness
        super().__init__(f"member {i} is cross-incoherent with P: {witness}")


class MemberMissingBase(FamilyError):
    def __init__(self, i, pair):
        self.member, self.pair = i, pair
        super().__init__(f"member {i} lacks base pair {pair}")


@dataclass(frozen=True)
class ExtensionFamily:
    members: tuple

    def __init__(self, members: Iterable[NormRelation]):
        object.__setattr__(self, "members", tuple(members))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def validate(self, p: NormRelation, n: NormRelation, rules) -> "ExtensionFamily":
        from .norms import first_violation
        rules = parse_rules(rules)
        if not self.members:
            raise FamilyEmpty("the family has no members")
        for i, h in enumerate(self.members):
            missing = n - h
            if missing:
                raise MemberMissingBase(i, missing.pairs[0])
            for rule in sorted(rules):
                v = first_violation(h, rule)
                if v is not None:
                    raise MemberNotClosed(i, rule, v)
            rep = cross_coherent(p, h, rules)
            if not rep.holds:
                raise MemberNotCrossCoherent(i, rep.witness)
        hs = self.members
        for i, hi in enumerate(hs):
            for j in range(i + 1, len(hs)):
                union = hi | hs[j]
                if not any(union <= hk for hk in hs):
                    raise FamilyNotUpDirected(i, j)
        return self


def generalized_dynamic(p: NormRelation, n: NormRelation, rules,
                        family: ExtensionFamily | Iterable[NormRelation]) -> NormRelation:
    """Intersection of ``P_H`` over a validated family of extensions."""
    rules = parse_rules(rules)
    _warn_preset(rules)
    if not isinstance(family, ExtensionFamily):
        family = ExtensionFamily(family)
    family.validate(p, n, rules)
    out = NormRelation.full(n.alg)
    for h in family:
        out = out & negative_permission(h)
    return out


def load_family(path, alg=None, binding=None) -> ExtensionFamily:
    """Family file: ``{"members": ["h1.json", ...]}`` or a bare list."""
    path = Path(path)
    with open(path) as fh:
        raw = json.load(fh)
    files = raw["members"] if isinstance(raw, dict) else raw
    rels = [load_norms(path.parent / f, alg, binding).relation for f in files]
    return ExtensionFamily(rels)


# ---------------------------------------------------------------------------
# closure auditors

VARIANTS = ("TOP▷", "BOT▷", "SI▷", "WO▷", "AND▷", "OR▷", "CT▷", "EX▷",
            "TOP◁", "BOT◁", "SI◁", "WO◁", "AND◁", "OR◁", "CT◁",
            "AND↓", "OR↓", "CT↓")

_CONTEXT = {"CT▷", "EX▷", "CT◁", "AND↓", "OR↓", "CT↓"}
_SUFFIX = {">": "▷", "|>": "▷", "<": "◁", "<|": "◁", "_down": "↓", "v": "↓", "!": "↓"}


def canonical_variant(v: str) -> str:
    """Accepts ``SI▷`` as well as the ASCII spellings ``SI>``, ``SI<``, ``AND_down``."""
    v = v.strip()
    if v in VARIANTS:
        return v
    for suf, sym in sorted(_SUFFIX.items(), key=lambda kv: -len(kv[0])):
        if v.endswith(suf):
            cand = v[: -len(suf)].upper().replace("-", "_") + sym
            if cand in VARIANTS:
                return cand
    raise ValueError(f"unknown closure variant {v!r}")


def _audit(r: NormRelation, variant: str, ctx: NormRelation | None, b: Binding | None):
    """First violating instance as a flat tuple: premise pairs then the
    missing conclusion pair (premises from the context come first)."""
    alg = r.alg
    rows = r.rows
    E, m, j = alg.elements, alg.m, alg.j
    bot, top = alg.bottom, alg.top
    has = lambda a, x: rows[a] >> x & 1  # noqa: E731

    def hi(mask):
        return mask.bit_length() - 1

    if variant in ("TOP▷", "BOT◁"):
        return None if has(top, bot) else (top, bot)
    if variant in ("BOT▷", "TOP◁"):
        return None if has(bot, top) else (bot, top)
    if variant == "SI▷":
        for b in E:
            for a in _bits(alg.down[b]):
                miss = rows[b] & ~rows[a]
                if miss:
                    x = hi(miss)
                    return (b, x, a, x)
    elif variant == "SI◁":
        for a in E:
            for b in _bits(alg.up[a]):
                miss = rows[a] & ~rows[b]
                if miss:
                    x = hi(miss)
                    return (a, x, b, x)
    elif variant == "WO▷":
        for a in E:
            for y in sorted(_bits(rows[a]), reverse=True):
                miss = alg.down[y] & ~rows[a]
                if miss:
                    return (a, y, a, hi(miss))
    elif variant == "WO◁":
        for a in E:
            for x in _bits(rows[a]):
                miss = alg.up[x] & ~rows[a]
                if miss:
                    return (a, x, a, hi(miss))
    elif variant in ("AND▷", "AND◁"):
        op = j if variant == "AND▷" else m
        for a in E:
            xs = list(_bits(rows[a]))
            for x in xs:
                for y in xs:
                    if not has(a, op[x][y]):
                        return (a, x, a, y, a, op[x][y])
    elif variant in ("OR▷", "OR◁"):
        op = j if variant == "OR▷" else m
        for a in E:
            for b in E:
                miss = rows[a] & rows[b] & ~rows[op[a][b]]
                if miss:
                    x = hi(miss)
                    return (a, x, b, x, op[a][b], x)
    elif variant == "CT▷":
        for a in E:
            for x in _bits(ctx.rows[a]):
                miss = rows[m[a][x]] & ~rows[a]
                if miss:
                    y = hi(miss)
                    return (a, x, m[a][x], y, a, y)
    elif variant == "EX▷":
        if b is None or "impl" not in b:
            raise UnboundConnective("impl")
        imp = b.binary(alg, "impl")
        for a in E:
            for x in E:
                if has(a, x):
                    continue
                for y in _bits(alg.disjoint[a]):
                    if ctx.rows[a] >> imp[x][y] & 1:
                        return (a, imp[x][y], a, x)
    elif variant == "CT◁":
        if b is None or "coimpl" not in b:
            raise UnboundConnective("coimpl")
        co = b.binary(alg, "coimpl")
        for a in E:
            for x in _bits(rows[a]):
                c = co[x][a]
                miss = ctx.rows[c] & ~rows[a]
                if miss:
                    y = hi(miss)
                    return (a, x, c, y, a, y)
    elif variant == "AND↓":
        for a in E:
            for x in _bits(ctx.rows[a]):
                for y in _bits(rows[a]):
                    if not has(a, m[x][y]):
                        return (a, x, a, y, a, m[x][y])
    elif variant == "OR↓":
        for a in E:
            for x in _bits(ctx.rows[a]):
                for b2 in E:
                    if has(b2, x) and not has(j[a][b2], x):
                        return (a, x, b2, x, j[a][b2], x)
    elif variant == "CT↓":
        for a in E:
            for x in _bits(ctx.rows[a]):
                c = m[a][x]
                for y in _bits(rows[c]):
                    if not has(a, m[x][y]):
                        return (a, x, c, y, a, m[x][y])
    else:
        raise ValueError(f"unknown closure variant {variant!r}")
    return None


def check_rule_closure(r: NormRelation, variant: str, context: NormRelation | None = None,
                       binding: Binding | None = None) -> PropertyReport:
    """Audit ``r`` for closure under one ▷, ◁ or ↓ rule.

    ``context`` is the normative system the rule refers to (needed for
    CT▷, EX▷, CT◁ and the ↓ rules).  The witness lists the premise pairs
    followed by the missing conclusion pair, flattened.
    """
    v = canonical_variant(variant)
    if v in _CONTEXT and context is None:
        raise ValueError(f"{v} needs a context normative system")
    w = _audit(r, v, context, binding)
    return PropertyReport(v, w is None, w, instances=len(r))
