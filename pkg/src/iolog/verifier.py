"""Registry of executable checks, one per lattice-level theorem.

A :class:`CheckSpec` bundles metalogical hypotheses on the algebra, closure
hypotheses on the normative system and a body.  :func:`run_check` evaluates
the body on every generated instance that satisfies the hypotheses and stops
at the first violation.  Every registered check is expected to hold; a
counterexample points at a defect in this package.

Instances come from one of three strategies:

``exhaustive-elements``
    quantify over all element tuples; for small carriers also over every
    alternative table for the negation (``n**n <= 256``) or for a binary
    connective (``n**(n*n) <= 16``).
``exhaustive-norms``
    all ``2**(n*n)`` relations, carriers up to 4 only.
``sampled-norms(seed, count)``
    ``count`` seeded draws; a draw is a small random relation, closed under
    a random rule subset with probability 0.7 so that closure hypotheses
    get exercised.

Checks that also need a permission set ``P``, a rule set ``R`` or an
extension family draw those from a generator seeded by the strategy seed
and the check id, including under ``exhaustive-norms``.
"""
from __future__ import annotations

import itertools
import random
import time
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .algebra import (METAPROPERTIES, Binding, FiniteAlgebra, PropertyReport, canonical_property,
                      catalog, check_metaproperty)
from .norms import PRESETS, NormRelation, _bits, almost_included, close, extend, \
    first_violation, internally_coherent
from .permissions import (ExtensionFamily, FamilyError, _audit, _cross_witness,
                          dual_negative, dual_negative_classical, dynamic_positive,
                          generalized_dynamic,
                          negative_permission_classical, static_positive)

__all__ = [
    "Strategy", "CheckSpec", "InfeasibleStrategy", "UnknownCheck", "UnknownSuite",
    "REGISTRY", "SUITES", "SUITE_ALGEBRAS", "EX21_EXPECTED",
    "check_ids", "get_check", "default_strategy", "run_check", "run_suite",
    "closure_flags", "reports_to_json",
]

EXHAUSTIVE_LIMIT = 4


class InfeasibleStrategy(ValueError):
    pass


class UnknownCheck(KeyError):
    def __str__(self):
        return f"unknown check {self.args[0]!r}"


class UnknownSuite(KeyError):
    def __str__(self):
        return f"unknown suite {self.args[0]!r}"


@dataclass(frozen=True)
class Strategy:
    kind: str
    seed: int = 0
    count: int = 10000

    KINDS = ("exhaustive-elements", "exhaustive-norms", "sampled-norms")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown strategy {self.kind!r}")
        if self.count < 1:
            raise ValueError("sample count must be positive")

    @classmethod
    def exhaustive_elements(cls):
        return cls("exhaustive-elements")

    @classmethod
    def exhaustive_norms(cls):
        return cls("exhaustive-norms")

    @classmethod
    def sampled(cls, seed: int = 0, count: int = 10000):
        return cls("sampled-norms", seed, count)

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "Strategy":
        """``exhaustive-elements``, ``exhaustive-norms``, ``sampled-norms`` or
        ``sampled-norms(SEED,COUNT)``."""
        t = text.strip().replace(" ", "")
        if t.startswith("sampled-norms(") and t.endswith(")"):
            s, c = t[len("sampled-norms("):-1].split(",")
            return cls.sampled(int(s), int(c))
        if t == "sampled-norms":
            return cls.sampled(seed)
        return cls(t, seed)

    def __str__(self):
        if self.kind == "sampled-norms":
            return f"sampled-norms({self.seed},{self.count})"
        return self.kind


@dataclass(frozen=True)
class CheckSpec:
    """One registered check.

    ``requires`` lists metalogical properties (plus ``theorems`` for a
    nonempty set of theorems); ``norm_hyp`` lists rules ``N`` must be closed
    under.  ``kind`` is ``elements`` or ``norms``; ``uses`` names the
    connective whose tables are varied by the element strategies.
    ``max_exhaustive`` bounds the carrier size for which the automatic
    strategy enumerates all relations.
    """

    check_id: str
    statement: str
    kind: str
    body: Callable
    requires: tuple = ()
    norm_hyp: tuple = ()
    uses: str | None = None
    arity: int = 0
    max_exhaustive: int = EXHAUSTIVE_LIMIT
    encoding: str = ""


# ---------------------------------------------------------------------------
# closure flags (fast hypothesis filter)

FLAG_RULES = ("TOP", "BOT", "SI", "WO", "AND", "OR", "CT", "EX")
FLAG = {r: 1 << i for i, r in enumerate(FLAG_RULES)}


class _Tables:
    """Per-algebra lookup tables keyed by row bitmask (memoized)."""

    def __init__(self, alg: FiniteAlgebra):
        self.alg = alg
        E, j = alg.elements, alg.j
        self.up_strict = [[b for b in _bits(alg.up[a]) if b != a] for a in E]
        self.pairs_lt = [(a, b) for a in E for b in E if a < b]
        exdown = []
        for a in E:
            row = [0] * alg.size
            for x in E:
                for y in _bits(alg.disjoint[a]):
                    row[j[x][y]] |= 1 << x
            exdown.append(row)
        self.exdown = exdown
        self._upcl: dict = {}
        self._meetcl: dict = {}
        self._free: dict = {}

    def upclosed(self, r):
        v = self._upcl.get(r)
        if v is None:
            v = self._upcl[r] = self.alg.upclose(r) == r
        return v

    def meetclosed(self, r):
        v = self._meetcl.get(r)
        if v is None:
            m = self.alg.m
            xs = list(_bits(r))
            v = all(r >> m[x][y] & 1 for x in xs for y in xs)
            self._meetcl[r] = v
        return v

    def free(self, r):
        """Row of ``P_N`` for a row ``r`` of ``N``."""
        v = self._free.get(r)
        if v is None:
            clash = 0
            for y in _bits(r):
                clash |= self.alg.disjoint[y]
            v = self._free[r] = self.alg.full_mask & ~clash
        return v

    def flags(self, rows) -> int:
        alg = self.alg
        m, j = alg.m, alg.j
        top, bot = alg.top, alg.bottom
        f = 0
        if rows[top] >> top & 1:
            f |= FLAG["TOP"]
        if rows[bot] >> bot & 1:
            f |= FLAG["BOT"]
        if all(rows[b] & ~rows[a] == 0 for a, ups in enumerate(self.up_strict) for b in ups):
            f |= FLAG["SI"]
        if all(self.upclosed(r) for r in rows):
            f |= FLAG["WO"]
        if all(self.meetclosed(r) for r in rows):
            f |= FLAG["AND"]
        if all(rows[a] & rows[b] & ~rows[j[a][b]] == 0 for a, b in self.pairs_lt):
            f |= FLAG["OR"]
        ok = True
        for a, r in enumerate(rows):
            for x in _bits(r):
                if rows[m[a][x]] & ~r:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            f |= FLAG["CT"]
        ex = self.exdown
        if all(ex[a][z] & ~r == 0 for a, r in enumerate(rows) for z in _bits(r)):
            f |= FLAG["EX"]
        return f


_TABLES: dict = {}


def _tables(alg: FiniteAlgebra) -> _Tables:
    t = _TABLES.get(id(alg))
    if t is None or t.alg is not alg:
        t = _TABLES[id(alg)] = _Tables(alg)
    return t


def closure_flags(rel: NormRelation) -> frozenset:
    """Rules among TOP, BOT, SI, WO, AND, OR, CT, EX that ``rel`` is closed under."""
    f = _tables(rel.alg).flags(rel.rows)
    return frozenset(r for r in FLAG_RULES if f & FLAG[r])


# ---------------------------------------------------------------------------
# instance pools

_DRAW_RULES = ("TOP", "BOT", "SI", "WO", "AND", "OR", "CT", "EX")
_POOLS: dict = {}


def _random_relation(alg, rng, k):
    n = alg.size
    return NormRelation.from_pairs(alg, [(rng.randrange(n), rng.randrange(n)) for _ in range(k)])


def _draw(alg, rng) -> NormRelation:
    rel = _random_relation(alg, rng, rng.choice((0, 1, 1, 2, 2, 3, 4, 6)))
    if rng.random() < 0.7:
        rules = [r for r in _DRAW_RULES if rng.random() < 0.5]
        rel = close(rel, rules)[0]
    return rel


def _pool(alg: FiniteAlgebra, strategy: Strategy) -> list:
    """``[(rows, flags), ...]``, cached per algebra and strategy."""
    key = (id(alg), strategy.kind, strategy.seed if strategy.kind == "sampled-norms" else 0,
           strategy.count if strategy.kind == "sampled-norms" else 0)
    hit = _POOLS.get(key)
    if hit is not None and hit[0] is alg:
        return hit[1]
    tab = _tables(alg)
    n = alg.size
    if strategy.kind == "exhaustive-norms":
        mask = alg.full_mask
        out = []
        for code in range(1 << (n * n)):
            rows = tuple((code >> (n * a)) & mask for a in range(n))
            out.append((rows, tab.flags(rows)))
    else:
        rng = random.Random(f"pool:{strategy.seed}")
        out = []
        for _ in range(strategy.count):
            rows = _draw(alg, rng).rows
            out.append((rows, tab.flags(rows)))
    if len(_POOLS) > 16:
        _POOLS.clear()
    _POOLS[key] = (alg, out)
    return out


# ---------------------------------------------------------------------------
# evaluation environment

_RULESETS = (
    PRESETS["N1"], PRESETS["N2"], PRESETS["N3"], PRESETS["N4"],
    frozenset(), frozenset({"WO"}), frozenset({"SI"}), frozenset({"AND"}),
    frozenset({"CT"}), frozenset({"OR"}), frozenset({"WO", "CT"}), frozenset({"SI", "WO"}),
    frozenset({"WO", "OR"}), frozenset({"TOP", "BOT"}), frozenset({"EX"}),
    frozenset({"SI", "AND", "CT"}),
)


class _Env:
    def __init__(self, alg, b, rng, exhaustive_family):
        self.alg = alg
        self.b = b
        self.rng = rng
        self.tab = _tables(alg)
        self.exhaustive_family = exhaustive_family
        self.note = ""

    def rel(self, rows) -> NormRelation:
        return NormRelation._trusted(self.alg, rows)

    def pn(self, rel) -> NormRelation:
        return NormRelation._trusted(self.alg, [self.tab.free(r) for r in rel.rows])

    def perm(self, within: NormRelation | None = None, kmax: int = 3) -> NormRelation:
        """A small random permission set, inside ``within`` when given."""
        alg, rng = self.alg, self.rng
        n = alg.size
        if within is not None:
            pool = within.pairs
            k = min(len(pool), rng.randint(0, kmax))
            return NormRelation.from_pairs(alg, rng.sample(pool, k))
        return NormRelation.from_pairs(
            alg, [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, kmax))])

    def rules(self, must: Iterable[str] = ()) -> frozenset:
        must = frozenset(must)
        cands = [r for r in _RULESETS if must <= r]
        if must and self.rng.random() < 0.5:
            return must | frozenset(r for r in _DRAW_RULES if self.rng.random() < 0.3)
        return self.rng.choice(cands) if cands else must


def _has(flags, rule):
    return bool(flags & FLAG[rule])


def _flat(violation) -> tuple:
    prem, concl = violation
    return tuple(v for p in prem for v in p) + tuple(concl)


def _iff(left: bool, right_witness, left_witness=()):
    """Compare a boolean with an audit outcome (``None`` means closed)."""
    right = right_witness is None
    if left == right:
        return None
    return right_witness if right_witness is not None else tuple(left_witness) or (-1,)


def _audit_rel(r, variant, ctx=None, b=None):
    return _audit(r, variant, ctx, b)


# ---------------------------------------------------------------------------
# element-level checks


def _neg(alg, b):
    return b.unary(alg, "neg")


def _scan(alg, arity, bad):
    for w in itertools.product(alg.elements, repeat=arity):
        if bad(*w):
            return w
    return None


def _l_neg_1(alg, b):
    m, j, le, ng = alg.m, alg.j, alg.le, _neg(alg, b)
    return _scan(alg, 2, lambda x, y: not le[j[ng[x]][ng[y]]][ng[m[x][y]]])


def _l_neg_2(alg, b):
    m, j, le, ng = alg.m, alg.j, alg.le, _neg(alg, b)
    return _scan(alg, 2, lambda x, y: not le[ng[m[x][y]]][j[ng[x]][ng[y]]])


def _l_neg2_1(alg, b):
    m, j, le, ng = alg.m, alg.j, alg.le, _neg(alg, b)
    return _scan(alg, 2, lambda x, y: not le[ng[j[x][y]]][m[ng[x]][ng[y]]])


def _l_neg2_2(alg, b):
    m, j, le, ng = alg.m, alg.j, alg.le, _neg(alg, b)
    return _scan(alg, 2, lambda x, y: not le[m[ng[x]][ng[y]]][ng[j[x][y]]])


def _pre_1(alg, b):
    m, j, le = alg.m, alg.j, alg.le
    return _scan(alg, 3, lambda a, x, y: not le[m[a][j[x][y]]][j[m[a][x]][m[a][y]]])


def _pre_2(alg, b):
    # a ∈ Cn(x) ⇒ Cn(g, a) ⊆ Cn(g, x), with Cn(g, a) the upset of g ∧ a
    m, le, up = alg.m, alg.le, alg.up
    return _scan(alg, 3, lambda a, x, g: le[x][a] and up[m[g][a]] & ~up[m[g][x]] != 0)


def _pre_3(alg, b):
    le, ng = alg.le, _neg(alg, b)
    galois = _scan(alg, 2, lambda x, y: le[x][ng[y]] != le[y][ng[x]])
    ir = check_metaproperty(alg, b, "neg_Ir")
    if ir.holds == (galois is None):
        return None
    return galois if galois is not None else ir.witness


def _pre_4(alg, b):
    tp = check_metaproperty(alg, b, "top_P").holds
    tw = check_metaproperty(alg, b, "top_W").holds
    if tp and not tw:
        return (alg.top,)
    if "top" in b and tw and not tp:
        return (alg.top,)
    return None


def _pre_5(alg, b):
    ng = _neg(alg, b)
    return None if ng[alg.bottom] == alg.top else (alg.bottom, ng[alg.bottom])


def _pre_6(alg, b):
    lhs = all(check_metaproperty(alg, b, p).holds for p in ("neg_Ir", "neg_A", "neg_P"))
    le, m, ng, bot = alg.le, alg.m, _neg(alg, b), alg.bottom
    w = _scan(alg, 2, lambda x, y: (m[x][y] == bot) != le[x][ng[y]])
    if lhs == (w is None):
        return None
    return w if w is not None else (-1,)


def _pre_8(alg, b):
    # upset encoding of the co-implication property against the join form
    co, j, le, up = b.binary(alg, "coimpl"), alg.j, alg.le, alg.up
    enc = _scan(alg, 3, lambda x, y, c: le[co[x][y]][c] != (up[c] & up[y] & ~up[x] == 0))
    join = _scan(alg, 3, lambda x, y, c: le[co[x][y]][c] != le[x][j[c][y]])
    if (enc is None) == (join is None):
        return None
    return enc if enc is not None else join


def _pre_9(alg, b):
    return check_metaproperty(alg, b, "neg_S").witness


def _pre_10(alg, b):
    imp, m, le, up = b.binary(alg, "impl"), alg.m, alg.le, alg.up
    enc = _scan(alg, 3, lambda x, y, c: le[c][imp[x][y]] != bool(up[m[c][x]] >> y & 1))
    meet = _scan(alg, 3, lambda x, y, c: le[c][imp[x][y]] != le[m[x][c]][y])
    if (enc is None) == (meet is None):
        return None
    return enc if enc is not None else meet


def _pre_11(alg, b):
    co, le = b.binary(alg, "coimpl"), alg.le
    return _scan(alg, 3, lambda a, x, y: le[x][y] and not (le[co[a][y]][co[a][x]]
                                                          and le[co[x][a]][co[y][a]]))


def _pre_12(alg, b):
    imp, le = b.binary(alg, "impl"), alg.le
    return _scan(alg, 3, lambda a, x, y: le[x][y] and not (le[imp[a][x]][imp[a][y]]
                                                          and le[imp[y][a]][imp[x][a]]))


def _metaprop_checker(prop):
    def body(alg, b):
        return check_metaproperty(alg, b, prop).witness
    return body


EX21_EXPECTED = {
    "B2": {p: True for p in METAPROPERTIES},
    "B4": {p: True for p in METAPROPERTIES},
    "B8": {p: True for p in METAPROPERTIES},
    "chain(3)": {"and_P": True, "or_S": True, "bot_P": True, "top_P": True, "impl_P": True,
                 "neg_Ir": True, "neg_A": True, "neg_P": True, "neg_S": True,
                 "neg_Il": False, "coneg_A": False},
    "DM4": {"neg_W": True, "neg_I": True, "neg_A": False, "coneg_A": False},
    "O6": {"and_P": True, "or_P": True, "bot_P": True, "top_P": True, "neg_I": True,
           "neg_A": True, "or_S": False},
}


def property_row(alg, b) -> dict:
    return {p: check_metaproperty(alg, b, p).holds for p in METAPROPERTIES}


# ---------------------------------------------------------------------------
# norm-level checks: negative permission


def _pnc(env, rel):
    return env.pn(rel).complement()


def _char(env, rel, flags):
    alg = env.alg
    pc = negative_permission_classical(rel, binding=env.b)
    dis = alg.disjoint
    for a in alg.elements:
        row = rel.rows[a]
        for x in alg.elements:
            clash = row & dis[x]
            if pc.rows[a] >> x & 1:
                if clash:
                    return (a, x, next(_bits(clash)))
            elif not clash:
                # adding (a, x) keeps the property: classical P_N is not maximal
                return (a, x)
    return None


def _np_eq(env, rel, flags):
    diff = env.pn(rel).rows, negative_permission_classical(rel, binding=env.b).rows
    for a, (r, s) in enumerate(zip(*diff)):
        if r != s:
            return (a, next(_bits(r ^ s)))
    return None


def _np_coh(env, rel, flags):
    if not internally_coherent(rel).holds:
        return None
    pn = env.pn(rel)
    bot = env.alg.bottom
    for a, (r, s) in enumerate(zip(rel.rows, pn.rows)):
        if a != bot and r & ~s:
            return (a, next(_bits(r & ~s)))
    return None


def _np_anti(env, rel, flags):
    extra = _random_relation(env.alg, env.rng, env.rng.randint(1, 4))
    big = rel | extra
    p1, p2 = env.pn(rel), env.pn(big)
    for a, (r1, r2) in enumerate(zip(p1.rows, p2.rows)):
        if r2 & ~r1:
            env.note = f"N2 = N + {extra!r}"
            return (a, next(_bits(r2 & ~r1)))
    return None


def _npl(item):
    top_row = lambda env, rel: rel.rows[env.alg.top] != 0  # noqa: E731

    def body(env, rel, flags):
        alg = env.alg
        pc = _pnc(env, rel)
        if item == 1:
            return _iff(top_row(env, rel), _audit_rel(pc, "TOP▷"), (alg.top,))
        if item == 2:
            return _iff(_has(flags, "TOP"), _audit_rel(pc, "TOP▷"), (alg.top, alg.top))
        if item == 3:
            return _iff((alg.bottom, alg.bottom) in rel, _audit_rel(pc, "BOT▷"),
                        (alg.bottom, alg.bottom))
        if item == 4:
            return _iff(_has(flags, "BOT"), _audit_rel(pc, "BOT▷"), (alg.bottom, alg.bottom))
        if item == 5:
            return _audit_rel(pc, "WO▷")
        if item == 6:
            return _audit_rel(pc, "SI▷")
        if item == 7:
            return _iff(_has(flags, "SI"), _audit_rel(pc, "SI▷"),
                        _flat(first_violation(rel, "SI") or ((), ())))
        if item == 8:
            return _audit_rel(pc, "AND▷")
        if item == 9:
            return _iff(_has(flags, "AND"), _audit_rel(pc, "AND▷"),
                        _flat(first_violation(rel, "AND") or ((), ())))
        if item == 10:
            return _audit_rel(pc, "OR▷")
        if item == 11:
            return _iff(_has(flags, "OR"), _audit_rel(pc, "OR▷"),
                        _flat(first_violation(rel, "OR") or ((), ())))
        if item == 12:
            return _audit_rel(pc, "CT▷", rel)
        return _iff(_has(flags, "CT"), _audit_rel(pc, "CT▷", rel),
                    _flat(first_violation(rel, "CT") or ((), ())))
    return body


# ---------------------------------------------------------------------------
# dual negative permission


def _dnp_eq(env, rel, flags):
    d1, d2 = dual_negative(rel), dual_negative_classical(rel, binding=env.b)
    for a, (r, s) in enumerate(zip(d1.rows, d2.rows)):
        if r != s:
            return (a, next(_bits(r ^ s)))
    return None


def _dnpl(item):
    def body(env, rel, flags):
        alg = env.alg
        dc = dual_negative(rel).complement()
        top, bot = alg.top, alg.bottom
        if item == 1:
            allt = all(r >> top & 1 for r in rel.rows)
            return _iff(allt, _audit_rel(dc, "TOP◁"), (top,))
        if item == 2:
            return _iff(_has(flags, "TOP"), _audit_rel(dc, "TOP◁"), (top, top))
        if item == 3:
            return _iff((bot, bot) in rel, _audit_rel(dc, "BOT◁"), (bot, bot))
        if item == 4:
            return _iff(_has(flags, "BOT"), _audit_rel(dc, "BOT◁"), (bot, bot))
        if item == 5:
            return _audit_rel(dc, "SI◁")
        if item == 6:
            return _audit_rel(dc, "WO◁")
        if item == 7:
            return _iff(_has(flags, "WO"), _audit_rel(dc, "WO◁"),
                        _flat(first_violation(rel, "WO") or ((), ())))
        if item == 8:
            return _audit_rel(dc, "AND◁")
        if item == 9:
            return _iff(_has(flags, "AND"), _audit_rel(dc, "AND◁"),
                        _flat(first_violation(rel, "AND") or ((), ())))
        if item == 10:
            return _audit_rel(dc, "OR◁")
        if item == 11:
            return _iff(_has(flags, "OR"), _audit_rel(dc, "OR◁"),
                        _flat(first_violation(rel, "OR") or ((), ())))
        if item == 12:
            if not _has(flags, "CT"):
                return None
            return _audit_rel(dc, "CT◁", rel, env.b)
        # CT◁ ⇒ CT
        if _audit_rel(dc, "CT◁", rel, env.b) is not None:
            return None
        v = first_violation(rel, "CT")
        return None if v is None else _flat(v)
    return body


# ---------------------------------------------------------------------------
# static positive permission


def _static_instance(env, rel, must=(), within_pn=True):
    rules = env.rules(must)
    base = close(rel, rules)[0]
    p = env.perm(env.pn(base) if within_pn else None)
    s = static_positive(p, rel, rules, check=False)
    env.note = f"N={rel!r} P={p!r} R={sorted(rules)}"
    return rules, base, p, s


def _sp_coh(env, rel, flags):
    rules = env.rules()
    p = env.perm()
    s = static_positive(p, rel, rules, check=False)
    env.note = f"P={p!r} R={sorted(rules)}"
    left = almost_included(s, env.pn(rel))
    right = _cross_witness(rel, s) is None
    return None if left == right else (int(left), int(right))


def _spl(item):
    def body(env, rel, flags):
        if item == 1:
            _, _, _, s = _static_instance(env, rel, ("AND",))
            return _audit_rel(s, "AND↓", rel)
        if item == 2:
            _, _, _, s = _static_instance(env, rel, ("OR",))
            return _audit_rel(s, "OR↓", rel)
        if item == 3:
            rules, base, p, s = _static_instance(env, rel, ("CT",))
            tab = env.tab
            members = [base] + [extend(base, [q], rules) for q in p.pairs]
            if not all(all(tab.meetclosed(r) for r in h.rows) for h in members):
                return None
            return _audit_rel(s, "CT↓", rel)
        if item == 4:
            x = env.rng.choice(("TOP", "SI", "WO"))
            _, _, _, s = _static_instance(env, rel, (x,))
            v = first_violation(s, x)
            return None if v is None else _flat(v)
        rules = env.rng.choice((PRESETS["N1"], PRESETS["N2"], PRESETS["N3"], PRESETS["N4"]))
        base = close(rel, rules)[0]
        p = env.perm(env.pn(base))
        s = static_positive(p, rel, rules, check=False)
        env.note = f"P={p!r} R={sorted(rules)}"
        if first_violation(s, "SI") is not None or _audit_rel(s, "CT↓", rel) is not None:
            return None
        return _audit_rel(s, "AND↓", rel)
    return body


# ---------------------------------------------------------------------------
# dynamic permission


def _quiet(fn, *args):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return fn(*args)


def _l_sd(env, rel, flags):
    rules = env.rules()
    p = env.perm()
    env.note = f"P={p!r} R={sorted(rules)}"
    s = static_positive(p, rel, rules, check=False)
    d = _quiet(dynamic_positive, p, rel, rules)
    bot = env.alg.bottom
    for a, (r1, r2) in enumerate(zip(s.rows, d.rows)):
        if a != bot and r1 & ~r2:
            return (a, next(_bits(r1 & ~r2)))
    return None


def _dyn_1(env, rel, flags):
    """D(P, N) against its characterization by cross-incoherence of the
    one-pair extensions, both measured against the fixed S(P, N)."""
    alg = env.alg
    rules = env.rules()
    p = env.perm()
    env.note = f"P={p!r} R={sorted(rules)}"
    d = _quiet(dynamic_positive, p, rel, rules)
    s = static_positive(p, rel, rules, check=False)
    base = close(rel, rules)[0]
    clashing = 0
    for a in alg.elements:
        for xp in alg.elements:
            if _cross_witness(extend(base, [(a, xp)], rules), s) is not None:
                clashing |= 1 << xp
        want = 0
        for x in alg.elements:
            if alg.disjoint[x] & clashing:
                want |= 1 << x
        if want != d.rows[a]:
            return (a, next(_bits(want ^ d.rows[a])))
        clashing = 0
    return None


def _supersets(alg, rel):
    free = [(a, x) for a in alg.elements for x in alg.elements if not rel.rows[a] >> x & 1]
    for k in range(len(free) + 1):
        for extra in itertools.combinations(free, k):
            yield rel.add(*extra) if extra else rel


def _dyn_2(env, rel, flags):
    alg = env.alg
    rules = env.rules()
    p = env.perm()
    env.note = f"P={p!r} R={sorted(rules)}"
    s = static_positive(p, rel, rules, check=False)
    if _cross_witness(rel, s) is not None:
        return None
    d = _quiet(dynamic_positive, p, rel, rules)
    base = close(rel, rules)[0]
    if env.exhaustive_family:
        cands = _supersets(alg, rel)
    else:
        n = alg.size
        cands = [extend(base, [(a, xp)], rules) for a in alg.elements for xp in alg.elements]
        cands += [rel.add((env.rng.randrange(n), env.rng.randrange(n))) for _ in range(8)]
    rows = [alg.full_mask] * alg.size
    for h in cands:
        if _cross_witness(h, s) is None:
            rows = [r & env.tab.free(hr) for r, hr in zip(rows, h.rows)]
    for a, (r, dr) in enumerate(zip(rows, d.rows)):
        if r & ~dr:
            return (a, next(_bits(r & ~dr)))
    return None


def _family(env, rel, p, rules):
    """A small up-directed family of coherent ``rules``-closed extensions:
    a chain or a diamond ``H1, H2, H1 ∪ H2`` (closed)."""
    alg, rng = env.alg, env.rng
    n = alg.size

    def ok(h):
        return _cross_witness(h, static_positive(p, h, rules, check=False)) is None

    base = close(rel, rules)[0]
    if not ok(base):
        return None

    def bump(h):
        return extend(h, [(rng.randrange(n), rng.randrange(n))], rules)

    if rng.random() < 0.5:
        members = [base]
        for _ in range(rng.randint(0, 2)):
            nxt = bump(members[-1])
            if not ok(nxt):
                break
            members.append(nxt)
        return members
    h1, h2 = bump(base), bump(base)
    top = close(h1 | h2, rules)[0]
    if ok(h1) and ok(h2) and ok(top):
        return [h1, h2, top]
    return [base]


def _pe(item):
    def body(env, rel, flags):
        if item == 1:
            x = env.rng.choice(("TOP", "BOT", "SI", "WO", "CT"))
            rules, variant = frozenset({x}), x + "▷"
        elif item == 2:
            rules, variant = frozenset({"AND"}), "AND▷"
        else:
            rules, variant = frozenset({"WO", "OR"}), "OR▷"
        p = env.perm(env.pn(close(rel, rules)[0]), kmax=2)
        members = _family(env, rel, p, rules)
        env.note = f"P={p!r} R={sorted(rules)}"
        if members is None:
            return None
        try:
            e = _quiet(generalized_dynamic, p, rel, rules, ExtensionFamily(members))
        except FamilyError as exc:  # the generator only builds valid families
            env.note += f" family rejected: {exc}"
            return (-1,)
        ctx = rel if variant == "CT▷" else None
        return _audit_rel(e.complement(), variant, ctx)
    return body


def _ex21(alg, b):
    exp = EX21_EXPECTED.get(alg.name)
    if exp is None:
        return None
    for prop, want in exp.items():
        got = check_metaproperty(alg, b, prop).holds
        if got != want:
            return (prop, want, got)
    return None


# ---------------------------------------------------------------------------
# registry

_NEG7 = ("bot_P", "top_P", "neg_W", "neg_I", "neg_A", "neg_P")
_LAT = ("bot_P", "top_W")


def _E(cid, statement, body, requires=(), uses=None, arity=2, encoding=""):
    return CheckSpec(cid, statement, "elements", body, tuple(requires), (), uses, arity,
                     encoding=encoding)


def _N(cid, statement, body, requires=(), norm_hyp=(), max_exhaustive=EXHAUSTIVE_LIMIT,
       encoding=""):
    return CheckSpec(cid, statement, "norms", body, tuple(requires), tuple(norm_hyp),
                     max_exhaustive=max_exhaustive, encoding=encoding)


_ELEM = "element order: ⊢ is ≤, Cn(a) is the upset of a"
_PERM = "P_N row a = elements meeting every N(a) above ⊥"

_SPECS: list[CheckSpec] = [
    _E("L-NEG-1", "¬a ∨ ¬b ≤ ¬(a ∧ b)", _l_neg_1, ("and_P", "or_P", "neg_W"), "neg",
       encoding=_ELEM),
    _E("L-NEG-2", "¬(a ∧ b) ≤ ¬a ∨ ¬b", _l_neg_2, ("and_P", "or_P", "neg_W", "neg_Il"), "neg",
       encoding=_ELEM),
    _E("L-NEG2-1", "¬(a ∨ b) ≤ ¬a ∧ ¬b", _l_neg2_1, ("and_P", "or_P", "neg_W"), "neg",
       encoding=_ELEM),
    _E("L-NEG2-2", "¬a ∧ ¬b ≤ ¬(a ∨ b)", _l_neg2_2,
       ("and_P", "or_P", "neg_W", "neg_S", "neg_A", "or_S"), "neg", encoding=_ELEM),
    _E("P-PRE-1", "a ∧ (b ∨ c) ≤ (a ∧ b) ∨ (a ∧ c)", _pre_1, ("and_P", "or_S"), arity=3,
       encoding=_ELEM),
    _E("P-PRE-2", "a ∈ Cn(x) implies Cn(g, a) ⊆ Cn(g, x)", _pre_2, ("and_P",), arity=3,
       encoding="Cn(g, a) is the upset of g ∧ a"),
    _E("P-PRE-3", "¬_Ir iff (a ≤ ¬b iff b ≤ ¬a)", _pre_3, ("neg_W",), "neg",
       encoding="two independent scans compared"),
    _E("P-PRE-4", "⊤_P implies ⊤_W, and conversely when theorems exist", _pre_4, arity=1,
       encoding=_ELEM),
    _E("P-PRE-5", "⊥_P and ¬_Ir give ¬⊥ = ⊤", _pre_5, ("bot_P", "neg_W", "neg_Ir"), "neg",
       arity=1, encoding=_ELEM),
    _E("P-PRE-6", "(¬_Ir, ¬_A, ¬_P) iff (a ∧ b = ⊥ iff a ≤ ¬b)", _pre_6,
       ("theorems", "and_P", "bot_P", "neg_W"), "neg", encoding=_ELEM),
    _E("P-PRE-7", "¬_Il and ¬_A imply ¬_P", _metaprop_checker("neg_P"),
       ("and_P", "or_S", "neg_W", "neg_Il", "neg_A"), "neg", encoding=_ELEM),
    _E("P-PRE-8", "⤙_P iff (a ⤙ b ≤ c iff a ≤ c ∨ b)", _pre_8, ("or_P",), "coimpl", arity=3,
       encoding="upset form Cn(c) ∩ Cn(b) ⊆ Cn(a) against the join form"),
    _E("P-PRE-9", "⊥_P, ¬_Ir, ¬_P imply ¬_S", _pre_9,
       ("theorems", "bot_P", "neg_W", "neg_Ir", "neg_P"), "neg", encoding=_ELEM),
    _E("P-PRE-10", "→_P iff (c ≤ a → b iff a ∧ c ≤ b)", _pre_10, ("and_P",), "impl", arity=3,
       encoding="upset form b ∈ Cn(c, a) against the meet form"),
    _E("P-PRE-11", "co-implication antitone right, monotone left", _pre_11, ("coimpl_P",),
       "coimpl", arity=3, encoding=_ELEM),
    _E("P-PRE-12", "implication monotone right, antitone left", _pre_12, ("impl_P",), "impl",
       arity=3, encoding=_ELEM),
    _E("P-PRE-13", "¬_I variant: ¬a ∧ ¬b ≤ ¬(a ∨ b)", _l_neg2_2,
       ("and_P", "or_P", "neg_W", "neg_I"), "neg", encoding=_ELEM),
    _N("P-CHAR", "classical P_N is compatible with N and maximal", _char,
       ("neg_S", "neg_A"), ("WO",), encoding=_PERM),
    _N("P-NP-EQ", "P_N = {(a, x) : (a, ¬x) ∉ N}", _np_eq, ("neg_S", "neg_A"), ("WO",),
       encoding=_PERM),
    _N("P-NP-COH", "internally coherent N is almost included in P_N", _np_coh, encoding=_PERM),
    _N("P-NP-ANTI", "N ⊆ N' implies P_N' ⊆ P_N", _np_anti, encoding=_PERM),
]

_NPL_SPEC = {
    1: ("P_N^c TOP▷ iff N(⊤) nonempty", _LAT, ()),
    2: ("N TOP iff P_N^c TOP▷", _LAT, ("WO",)),
    3: ("P_N^c BOT▷ iff (⊥, ⊥) ∈ N", _LAT, ()),
    4: ("N BOT iff P_N^c BOT▷", _LAT, ("WO",)),
    5: ("P_N^c is WO▷-closed", (), ()),
    6: ("N SI implies P_N^c SI▷", (), ("SI",)),
    7: ("N SI iff P_N^c SI▷", _NEG7, ("WO",)),
    8: ("N AND implies P_N^c AND▷", ("and_P", "or_S"), ("AND",)),
    9: ("N AND iff P_N^c AND▷", _NEG7, ("WO",)),
    10: ("N OR implies P_N^c OR▷", ("or_S",), ("OR", "WO")),
    11: ("N OR iff P_N^c OR▷", _NEG7, ("WO",)),
    12: ("N CT implies P_N^c CT▷", (), ("CT",)),
    13: ("N CT iff P_N^c CT▷", _NEG7, ("WO",)),
}
for _i, (_st, _req, _hyp) in _NPL_SPEC.items():
    _SPECS.append(_N(f"P-NPL-{_i}", _st, _npl(_i), _req, _hyp, encoding=_PERM))

_SPECS.append(_N("P-DNP-EQ", "D_N = {(a, x) : (¬a, x) ∉ N}", _dnp_eq, ("neg_S", "neg_A"),
                 ("SI",), encoding="D_N row a = union over b disjoint from a of ∁N(b)"))

_DNPL_SPEC = {
    1: ("D_N^c TOP◁ iff (b, ⊤) ∈ N for all b", _LAT, ()),
    2: ("D_N^c TOP◁ iff N TOP", _LAT, ("SI",)),
    3: ("D_N^c BOT◁ iff (⊥, ⊥) ∈ N", _LAT, ()),
    4: ("D_N^c BOT◁ iff N BOT", _LAT, ("SI",)),
    5: ("D_N^c is SI◁-closed", (), ()),
    6: ("N WO implies D_N^c WO◁", (), ("WO",)),
    7: ("N WO iff D_N^c WO◁", _NEG7, ("SI",)),
    8: ("N AND implies D_N^c AND◁", ("and_P",), ("AND",)),
    9: ("N AND iff D_N^c AND◁", ("and_P",) + _NEG7, ("SI",)),
    10: ("N OR implies D_N^c OR◁", ("and_P", "or_P") + _NEG7, ("SI", "OR")),
    11: ("N OR iff D_N^c OR◁", ("and_P", "or_S") + _NEG7, ("SI",)),
    12: ("N CT implies D_N^c CT◁", ("or_P", "coimpl_P"), ("WO", "SI", "EX")),
    13: ("D_N^c CT◁ implies N CT", ("coimpl_P", "or_S", "or_P", "top_P", "neg_W", "neg_A",
                                   "neg_S", "neg_Ir", "coneg_A"), ("SI",)),
}
for _i, (_st, _req, _hyp) in _DNPL_SPEC.items():
    _SPECS.append(_N(f"P-DNPL-{_i}", _st, _dnpl(_i), _req, _hyp,
                     encoding="D_N row a = union over b disjoint from a of ∁N(b)"))

_STATIC = "S = union over p in P of the closure of N + p; P drawn inside P_N"
_SPECS += [
    _N("P-SP-COH", "S ⊆_c P_N iff N and P are cross-coherent", _sp_coh, max_exhaustive=2,
       encoding="P and R drawn at random; S against the raw rows of N"),
    _N("P-SPL-1", "R ∋ AND: S is AND↓-closed", _spl(1), max_exhaustive=2,
       encoding=_STATIC),
    _N("P-SPL-2", "R ∋ OR: S is OR↓-closed", _spl(2), max_exhaustive=2,
       encoding=_STATIC),
    _N("P-SPL-3", "R ∋ CT and AND-closed members: S is CT↓-closed", _spl(3), max_exhaustive=2,
       encoding=_STATIC),
    _N("P-SPL-4", "R ∋ X for X in TOP, SI, WO: S is X-closed", _spl(4), max_exhaustive=2,
       encoding=_STATIC),
    _N("P-SPL-5", "presets: SI and CT↓ give AND↓", _spl(5), max_exhaustive=2,
       encoding=_STATIC),
    _N("L-SD", "S ⊆_c D", _l_sd, ("neg_A",), max_exhaustive=2,
       encoding="D from one closure per (a, x'); x' ranges over all elements"),
    _N("P-DYN-1", "D(P, N) iff some one-pair extension is cross-incoherent", _dyn_1,
       max_exhaustive=2,
       encoding="coherence of N_(a,x') measured against S(P, N)"),
    _N("P-DYN-2", "coherent N: the intersection of P_H over coherent H ⊇ N lies in D", _dyn_2,
       max_exhaustive=2,
       encoding="all H on carriers of size 2, else one-pair closures plus random supersets; "
                "coherence against S(P, N)"),
    _N("P-E-1", "E^(X) complement is X▷-closed", _pe(1), max_exhaustive=2,
       encoding="families: chains or diamonds of closed one-pair extensions"),
    _N("P-E-2", "E^(AND) complement is AND▷-closed", _pe(2), ("and_P", "or_S"),
       max_exhaustive=2,
       encoding="families: chains or diamonds of closed one-pair extensions"),
    _N("P-E-3", "E^(WO,OR) complement is OR▷-closed", _pe(3), ("or_S",), max_exhaustive=2,
       encoding="families: chains or diamonds of closed one-pair extensions"),
    _E("EX21-matrix", "expected property table per catalog algebra", _ex21, arity=0,
       encoding="check_metaproperty against a fixed table"),
]

REGISTRY: dict = {s.check_id: s for s in _SPECS}

SUITES = {
    "metaprops": ["L-NEG-1", "L-NEG-2", "L-NEG2-1", "L-NEG2-2"]
                 + [f"P-PRE-{i}" for i in range(1, 14)],
    "example21": ["EX21-matrix"],
    "negperm": ["P-CHAR", "P-NP-EQ", "P-NP-COH", "P-NP-ANTI"]
               + [f"P-NPL-{i}" for i in range(1, 14)],
    "dualperm": ["P-DNP-EQ"] + [f"P-DNPL-{i}" for i in range(1, 14)],
    "static": ["P-SP-COH"] + [f"P-SPL-{i}" for i in range(1, 6)],
    "dynamic": ["L-SD", "P-DYN-1", "P-DYN-2", "P-E-1", "P-E-2", "P-E-3"],
}
SUITES["all"] = [s.check_id for s in _SPECS]

SUITE_ALGEBRAS = ("B2", "B4", "B8", "DM4", "chain(3)", "O6")


def check_ids() -> list:
    return list(REGISTRY)


def get_check(check_id: str) -> CheckSpec:
    try:
        return REGISTRY[check_id]
    except KeyError:
        raise UnknownCheck(check_id) from None


def default_strategy(spec: CheckSpec, alg: FiniteAlgebra, seed: int = 0,
                     count: int = 10000) -> Strategy:
    if spec.kind == "elements":
        return Strategy.exhaustive_elements()
    if alg.size <= spec.max_exhaustive:
        return Strategy.exhaustive_norms()
    return Strategy.sampled(seed, count)


# ---------------------------------------------------------------------------
# running


def _hyp_names(spec: CheckSpec, drop) -> tuple[list, list]:
    dropped = set()
    for d in drop:
        try:
            dropped.add(canonical_property(d))
        except KeyError:
            dropped.add(d.upper() if d.upper() in FLAG else d)
    req = [r for r in spec.requires if r not in dropped]
    hyp = [h for h in spec.norm_hyp if h not in dropped]
    return req, hyp


def _algebra_hyps(alg, b, req) -> list:
    failed = []
    for r in req:
        if r == "theorems":
            if "top" not in b:
                failed.append(r)
        elif not check_metaproperty(alg, b, r).holds:
            failed.append(r)
    return failed


def _variants(alg, b, uses, strategy, check_id):
    yield alg, b, ""
    if uses is None:
        return
    n = alg.size
    name = "_alt_" + uses
    unary = uses == "neg"
    if strategy.kind == "sampled-norms":
        rng = random.Random(f"tables:{strategy.seed}:{check_id}")
        tables = []
        for _ in range(min(strategy.count, 200)):
            if unary:
                tables.append(tuple(rng.randrange(n) for _ in range(n)))
            else:
                tables.append(tuple(tuple(rng.randrange(n) for _ in range(n)) for _ in range(n)))
    elif unary and n ** n <= 256:
        tables = itertools.product(range(n), repeat=n)
    elif not unary and n ** (n * n) <= 16:
        tables = (tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(n))
                  for flat in itertools.product(range(n), repeat=n * n))
    else:
        return
    for t in tables:
        if unary:
            a2 = alg.with_ops(unary={name: t})
        else:
            a2 = alg.with_ops(binary={name: t})
        yield a2, b.with_symbols(**{uses: name}), f"{uses} table {list(t)}"


def _run_elements(spec, alg, b, strategy, req):
    if spec.check_id == "EX21-matrix":
        w = _ex21(alg, b)
        row = property_row(alg, b)
        notes = " ".join(f"{k}={'T' if v else 'F'}" for k, v in row.items())
        if alg.name not in EX21_EXPECTED:
            notes = "no expected row for this algebra; " + notes
        return w, notes, 1, row
    count = 0
    vacuous = True
    for a2, b2, note in _variants(alg, b, spec.uses, strategy, spec.check_id):
        if spec.uses and spec.uses not in b2:
            continue
        if _algebra_hyps(a2, b2, req):
            continue
        vacuous = False
        count += max(1, a2.size ** spec.arity)
        w = spec.body(a2, b2)
        if w is not None:
            return w, note, count, None
    return None, "vacuous: no table satisfies the hypotheses" if vacuous else "", count, None


def _run_norms(spec, alg, b, strategy, req, hyp):
    failed = _algebra_hyps(alg, b, req)
    if failed:
        return None, f"vacuous: hypotheses fail on {alg.name}: {', '.join(failed)}", 0
    need = 0
    for h in hyp:
        need |= FLAG[h]
    env = _Env(alg, b, random.Random(f"{spec.check_id}:{strategy.seed}"),
               exhaustive_family=alg.size <= 2)
    count = 0
    body = spec.body
    for rows, flags in _pool(alg, strategy):
        if flags & need != need:
            continue
        count += 1
        env.note = ""
        rel = env.rel(rows)
        w = body(env, rel, flags)
        if w is not None:
            note = f"N={rel!r}" + (f" {env.note}" if env.note else "")
            return w, note, count
    return None, "", count


def run_check(check_id: str, alg: FiniteAlgebra | str, b: Binding | None = None,
              strategy: Strategy | str | None = None, drop_hypotheses: Sequence[str] = (),
              seed: int = 0, count: int = 10000) -> PropertyReport:
    """Evaluate one registered check on one algebra.

    ``strategy`` defaults to :func:`default_strategy`.  ``drop_hypotheses``
    removes metalogical or closure hypotheses by name, to probe whether
    they are needed.
    """
    spec = get_check(check_id)
    if isinstance(alg, str):
        alg, b0 = catalog(alg)
        b = b if b is not None else b0
    if b is None:
        raise ValueError("a binding is required")
    if strategy is None:
        strategy = default_strategy(spec, alg, seed, count)
    elif isinstance(strategy, str):
        strategy = Strategy.parse(strategy, seed)
    if strategy.kind == "exhaustive-norms" and alg.size > EXHAUSTIVE_LIMIT:
        raise InfeasibleStrategy(f"exhaustive-norms needs a carrier of size <= "
                                 f"{EXHAUSTIVE_LIMIT}; {alg.name} has {alg.size}")
    if spec.kind == "norms" and strategy.kind == "exhaustive-elements":
        raise InfeasibleStrategy(f"{check_id} quantifies over normative systems")
    req, hyp = _hyp_names(spec, drop_hypotheses)
    t0 = time.perf_counter()
    if spec.kind == "elements":
        w, notes, n, details = _run_elements(spec, alg, b, strategy, req)
    else:
        w, notes, n = _run_norms(spec, alg, b, strategy, req, hyp)
        details = None
    ms = (time.perf_counter() - t0) * 1000
    head = f"{alg.name} {strategy}"
    if drop_hypotheses:
        head += f" dropped {','.join(drop_hypotheses)}"
    notes = f"{head}; {notes}" if notes else head
    return PropertyReport(check_id, w is None, w, notes, n, ms, details)


def run_suite(name: str, seed: int = 0, algebras: Sequence[str] | None = None,
              count: int = 10000) -> list:
    """Reports for every check of suite ``name`` on each algebra, in
    registry order (checks outer, algebras inner)."""
    if name not in SUITES:
        raise UnknownSuite(name)
    algs = [catalog(a) for a in (algebras or SUITE_ALGEBRAS)]
    out = []
    for cid in SUITES[name]:
        for alg, b in algs:
            out.append(run_check(cid, alg, b, seed=seed, count=count))
    return out


def reports_to_json(reports: Iterable[PropertyReport], timing: bool = True) -> list:
    out = []
    for r in reports:
        d = r.to_dict()
        if not timing:
            d.pop("millis", None)
        out.append(d)
    return out
