"""Finite bounded lattices with designated operations.

A :class:`FiniteAlgebra` is the semantic home of a base logic: elements are
small integers ``0 .. size-1``, the order is a boolean matrix and every
designated operation is a lookup table.  A :class:`Binding` says which
connective symbols of the formula language are interpreted by which tables.

Metalogical properties are checked element-wise, by exhaustive quantification
over the carrier (see :func:`check_metaproperty`).
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "AlgebraError",
    "NotAPartialOrder",
    "NotALattice",
    "BadTable",
    "UnknownCatalogName",
    "FiniteAlgebra",
    "Binding",
    "PropertyReport",
    "build_algebra",
    "load_algebra",
    "catalog",
    "catalog_names",
    "METAPROPERTIES",
    "canonical_property",
    "check_metaproperty",
]


class AlgebraError(ValueError):
    """Base class for invalid algebra descriptions."""


class NotAPartialOrder(AlgebraError):
    pass


class NotALattice(AlgebraError):
    pass


class BadTable(AlgebraError):
    pass


class UnknownCatalogName(AlgebraError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


@dataclass(frozen=True)
class PropertyReport:
    """Verdict of a property, closure or theorem check.

    ``witness`` is the first violating instance when ``holds`` is false.
    ``instances`` counts the instances the check was evaluated on.
    """

    check_id: str
    holds: bool
    witness: tuple | None = None
    notes: str = ""
    instances: int = 0
    millis: float = 0.0
    details: Mapping | None = None

    def __post_init__(self):
        if not self.holds and self.witness is None:
            raise ValueError(f"{self.check_id}: a failing report needs a witness")

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        d = {"check_id": self.check_id, "holds": self.holds, "instances": self.instances,
             "millis": round(self.millis, 3)}
        if self.witness is not None:
            d["witness"] = _jsonable(self.witness)
        if self.notes:
            d["notes"] = self.notes
        if self.details:
            d["details"] = dict(self.details)
        return d


def _jsonable(obj):
    if isinstance(obj, (tuple, list)):
        return [_jsonable(o) for o in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (frozenset, set)):
        return sorted(_jsonable(o) for o in obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return obj


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    """A validated finite lattice plus named operation tables.

    Use :func:`build_algebra` or :func:`catalog` rather than constructing
    this directly; the constructor does not validate.
    """

    name: str
    leq: np.ndarray
    meet: np.ndarray
    join: np.ndarray
    bottom: int
    top: int
    unary_ops: Mapping[str, tuple] = field(default_factory=dict)
    binary_ops: Mapping[str, tuple] = field(default_factory=dict)
    labels: tuple = ()

    @property
    def size(self) -> int:
        return len(self.leq)

    carrier_size = size

    @property
    def elements(self) -> range:
        return range(self.size)

    def __repr__(self):
        return f"FiniteAlgebra({self.name!r}, size={self.size})"

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels else str(x)

    def element(self, token) -> int:
        """Resolve an element given by id or label."""
        if isinstance(token, (int, np.integer)):
            x = int(token)
        elif self.labels and token in self.labels:
            return self.labels.index(token)
        elif isinstance(token, str) and token.isdigit():
            x = int(token)
        else:
            raise KeyError(f"{self.name}: unknown element {token!r}")
        if not 0 <= x < self.size:
            raise KeyError(f"{self.name}: element {x} out of range")
        return x

    # Python-level views of the tables for the hot loops.
    @cached_property
    def le(self) -> tuple:
        return tuple(tuple(bool(v) for v in row) for row in self.leq)

    @cached_property
    def m(self) -> tuple:
        return tuple(tuple(int(v) for v in row) for row in self.meet)

    @cached_property
    def j(self) -> tuple:
        return tuple(tuple(int(v) for v in row) for row in self.join)

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    @cached_property
    def down(self) -> tuple:
        """``down[x]``: bitmask of the elements below ``x``."""
        return tuple(sum(1 << a for a in self.elements if self.le[a][x]) for x in self.elements)

    @cached_property
    def up(self) -> tuple:
        return tuple(sum(1 << b for b in self.elements if self.le[x][b]) for x in self.elements)

    @cached_property
    def disjoint(self) -> tuple:
        """``disjoint[x]``: bitmask of the ``y`` with ``x ∧ y = ⊥``."""
        bot = self.bottom
        return tuple(sum(1 << y for y in self.elements if self.m[x][y] == bot)
                     for x in self.elements)

    def upclose(self, mask: int) -> int:
        out = 0
        up = self.up
        while mask:
            low = mask & -mask
            out |= up[low.bit_length() - 1]
            mask ^= low
        return out

    def meet_all(self, xs: Iterable[int]) -> int:
        r = self.top
        for x in xs:
            r = self.m[r][x]
        return r

    def join_all(self, xs: Iterable[int]) -> int:
        r = self.bottom
        for x in xs:
            r = self.j[r][x]
        return r

    @cached_property
    def is_distributive(self) -> bool:
        m, j = self.m, self.j
        return all(m[c][j[a][b]] == j[m[c][a]][m[c][b]]
                   for a, b, c in itertools.product(self.elements, repeat=3))

    def with_ops(self, name: str | None = None, *, unary: Mapping | None = None,
                 binary: Mapping | None = None) -> "FiniteAlgebra":
        """Copy with some operation tables added or replaced (validated)."""
        u = dict(self.unary_ops)
        b = dict(self.binary_ops)
        for k, t in (unary or {}).items():
            u[k] = _check_unary(k, t, self.size)
        for k, t in (binary or {}).items():
            b[k] = _check_binary(k, t, self.size)
        return FiniteAlgebra(name or self.name, self.leq, self.meet, self.join, self.bottom,
                             self.top, u, b, self.labels)

    def to_json(self) -> dict:
        n = self.size
        ops = {k: list(v) for k, v in self.unary_ops.items()}
        ops.update({k: [list(r) for r in v] for k, v in self.binary_ops.items()})
        d = {
            "name": self.name,
            "size": n,
            "leq": [[a, b] for a in range(n) for b in range(n) if a != b and self.le[a][b]],
            "ops": ops,
        }
        if self.labels:
            d["labels"] = list(self.labels)
        return d


CONNECTIVES = ("and", "or", "neg", "impl", "coimpl", "top", "bot")


@dataclass(frozen=True)
class Binding:
    """Assignment of connective symbols to operations of an algebra.

    ``symbols`` maps a connective (``and``, ``or``, ``neg``, ``impl``,
    ``coimpl``, ``top``, ``bot``) to the name of a table or constant:
    ``and -> "meet"``, ``or -> "join"``, ``top -> "top"``, ``bot -> "bot"``,
    and the unary/binary table names for the rest.
    """

    symbols: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "symbols", dict(self.symbols))
        for s in self.symbols:
            if s not in CONNECTIVES:
                raise ValueError(f"unknown connective {s!r}")

    def __contains__(self, sym):
        return sym in self.symbols

    def __getitem__(self, sym):
        return self.symbols[sym]

    def without(self, *syms: str) -> "Binding":
        return Binding({k: v for k, v in self.symbols.items() if k not in syms})

    def with_symbols(self, **syms: str) -> "Binding":
        return Binding({**self.symbols, **syms})

    def validate(self, alg: FiniteAlgebra) -> "Binding":
        fixed = {"and": "meet", "or": "join", "top": "top", "bot": "bot"}
        for sym, op in self.symbols.items():
            if sym in fixed:
                if op != fixed[sym]:
                    raise BadTable(f"{sym!r} must be bound to the lattice {fixed[sym]}")
            elif sym == "neg" and op not in alg.unary_ops:
                raise BadTable(f"no unary operation {op!r} in {alg.name}")
            elif sym in ("impl", "coimpl") and op not in alg.binary_ops:
                raise BadTable(f"no binary operation {op!r} in {alg.name}")
        return self

    def unary(self, alg: FiniteAlgebra, sym: str) -> tuple:
        return alg.unary_ops[self.symbols[sym]]

    def binary(self, alg: FiniteAlgebra, sym: str) -> tuple:
        return alg.binary_ops[self.symbols[sym]]

    @classmethod
    def lattice(cls, top=True, bot=True) -> "Binding":
        syms = {"and": "meet", "or": "join"}
        if top:
            syms["top"] = "top"
        if bot:
            syms["bot"] = "bot"
        return cls(syms)


# ---------------------------------------------------------------------------
# construction and validation


def _check_unary(name, table, n) -> tuple:
    t = tuple(table)
    if len(t) != n or not all(isinstance(v, (int, np.integer)) and 0 <= v < n for v in t):
        raise BadTable(f"unary operation {name!r} must list {n} ids in range")
    return tuple(int(v) for v in t)


def _check_binary(name, table, n) -> tuple:
    rows = tuple(tuple(r) for r in table)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise BadTable(f"binary operation {name!r} must be a {n}x{n} table")
    if not all(isinstance(v, (int, np.integer)) and 0 <= v < n for r in rows for v in r):
        raise BadTable(f"binary operation {name!r} has entries out of range")
    return tuple(tuple(int(v) for v in r) for r in rows)


def _glb_table(leq: np.ndarray, dual=False) -> np.ndarray:
    n = len(leq)
    rel = leq.T if dual else leq
    out = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(a, n):
            lower = rel[:, a] & rel[:, b]
            cands = np.flatnonzero(lower)
            best = [g for g in cands if rel[cands, g].all()]
            if not best:
                kind = "join" if dual else "meet"
                raise NotALattice(f"elements {a} and {b} have no {kind}")
            out[a, b] = out[b, a] = best[0]
    return out


def _residual(meet, leq) -> tuple | None:
    """Heyting implication ``a -> b = max{c : a ∧ c <= b}``, if it exists."""
    n = len(leq)
    rows = []
    for a in range(n):
        row = []
        for b in range(n):
            cands = [c for c in range(n) if leq[meet[a][c]][b]]
            best = [c for c in cands if all(leq[d][c] for d in cands)]
            if not best:
                return None
            row.append(best[0])
        rows.append(tuple(row))
    return tuple(rows)


def _coresidual(join, leq) -> tuple | None:
    """Coimplication ``a -< b = min{c : a <= c ∨ b}``, if it exists."""
    n = len(leq)
    rows = []
    for a in range(n):
        row = []
        for b in range(n):
            cands = [c for c in range(n) if leq[a][join[c][b]]]
            best = [c for c in cands if all(leq[c][d] for d in cands)]
            if not best:
                return None
            row.append(best[0])
        rows.append(tuple(row))
    return tuple(rows)


def build_algebra(spec: Mapping) -> FiniteAlgebra:
    """Validate a raw description and return a :class:`FiniteAlgebra`.

    ``spec`` holds ``size``, ``leq`` (a list of ``[i, j]`` pairs meaning
    ``i <= j``), optional ``name``, ``labels`` and ``ops``.  The order is
    completed to its reflexive-transitive closure before it is checked;
    ``meet``/``join`` are recomputed and, if given in ``ops``, must agree.
    ``impl`` and ``coimpl`` are derived by residuation when absent and the
    lattice admits them.
    """
    try:
        n = int(spec["size"])
    except (KeyError, TypeError, ValueError) as exc:
        raise BadTable("algebra description needs an integer 'size'") from exc
    if n < 1:
        raise BadTable("size must be positive")
    leq = np.eye(n, dtype=bool)
    for pair in spec.get("leq", ()):
        try:
            i, j = (int(v) for v in pair)
        except (TypeError, ValueError) as exc:
            raise BadTable(f"bad order pair {pair!r}") from exc
        if not (0 <= i < n and 0 <= j < n):
            raise BadTable(f"order pair {pair!r} out of range")
        leq[i, j] = True
    for k in range(n):
        leq |= leq[:, k:k + 1] & leq[k:k + 1, :]
    sym = leq & leq.T & ~np.eye(n, dtype=bool)
    if sym.any():
        i, j = (int(v) for v in np.argwhere(sym)[0])
        raise NotAPartialOrder(f"{i} <= {j} and {j} <= {i}")

    meet = _glb_table(leq)
    join = _glb_table(leq, dual=True)
    bottoms = [a for a in range(n) if leq[a].all()]
    tops = [a for a in range(n) if leq[:, a].all()]
    if not bottoms or not tops:
        raise NotALattice("no bottom or no top element")

    ops = dict(spec.get("ops", {}))
    for key, table in (("meet", meet), ("join", join)):
        if key in ops:
            given = np.asarray(_check_binary(key, ops.pop(key), n))
            if not np.array_equal(given, table):
                raise BadTable(f"supplied {key} table disagrees with the order")
    unary, binary = {}, {}
    for key, table in ops.items():
        if len(table) == n and table and all(isinstance(v, (int, np.integer)) for v in table):
            unary[key] = _check_unary(key, table, n)
        else:
            binary[key] = _check_binary(key, table, n)

    le = tuple(tuple(bool(v) for v in row) for row in leq)
    mt = tuple(tuple(int(v) for v in row) for row in meet)
    jt = tuple(tuple(int(v) for v in row) for row in join)
    if "impl" not in binary:
        r = _residual(mt, le)
        if r is not None:
            binary["impl"] = r
    if "coimpl" not in binary:
        r = _coresidual(jt, le)
        if r is not None:
            binary["coimpl"] = r

    labels = tuple(str(x) for x in spec.get("labels", ()))
    if labels and len(labels) != n:
        raise BadTable("labels must name every element")
    return FiniteAlgebra(str(spec.get("name", "anonymous")), leq, meet, join,
                         bottoms[0], tops[0], unary, binary, labels)


def load_algebra(path) -> FiniteAlgebra:
    with open(path) as fh:
        return build_algebra(json.load(fh))


# ---------------------------------------------------------------------------
# catalog


def _boolean(k: int, name: str, labels=()) -> tuple[FiniteAlgebra, Binding]:
    n = 1 << k
    full = n - 1
    leq = [[a, b] for a in range(n) for b in range(n) if a & ~b == 0]
    neg = [full & ~a for a in range(n)]
    impl = [[(full & ~a) | b for b in range(n)] for a in range(n)]
    coimpl = [[a & ~b for b in range(n)] for a in range(n)]
    alg = build_algebra({"name": name, "size": n, "leq": leq, "labels": labels,
                         "ops": {"neg": neg, "impl": impl, "coimpl": coimpl}})
    binding = Binding({"and": "meet", "or": "join", "neg": "neg", "impl": "impl",
                       "coimpl": "coimpl", "top": "top", "bot": "bot"})
    return alg, binding


def _chain(n: int) -> tuple[FiniteAlgebra, Binding]:
    if n < 2:
        raise UnknownCatalogName("chain(n) needs n >= 2")
    leq = [[a, a + 1] for a in range(n - 1)]
    labels = ("0", "h", "1") if n == 3 else ()
    alg = build_algebra({"name": f"chain({n})", "size": n, "leq": leq, "labels": labels})
    impl = alg.binary_ops["impl"]
    alg = alg.with_ops(unary={"neg": [impl[a][alg.bottom] for a in alg.elements]})
    binding = Binding({"and": "meet", "or": "join", "impl": "impl", "neg": "neg",
                       "top": "top", "bot": "bot"})
    return alg, binding


def _dm4():
    alg = build_algebra({"name": "DM4", "size": 4, "leq": [[0, 1], [1, 2], [2, 3]],
                         "labels": ["0", "a", "b", "1"], "ops": {"neg": [3, 2, 1, 0]}})
    return alg, Binding({"and": "meet", "or": "join", "neg": "neg", "top": "top", "bot": "bot"})


def _o6():
    # 0 < a < b < 1 and 0 < b' < a' < 1, with x' the orthocomplement of x
    alg = build_algebra({"name": "O6", "size": 6,
                         "leq": [[0, 1], [1, 2], [2, 5], [0, 3], [3, 4], [4, 5]],
                         "labels": ["0", "a", "b", "b'", "a'", "1"],
                         "ops": {"neg": [5, 4, 3, 2, 1, 0]}})
    return alg, Binding({"and": "meet", "or": "join", "neg": "neg", "top": "top", "bot": "bot"})


def _n5():
    alg = build_algebra({"name": "N5", "size": 5, "leq": [[0, 1], [1, 2], [2, 4], [0, 3], [3, 4]],
                         "labels": ["0", "a", "c", "b", "1"]})
    return alg, Binding.lattice()


def _m3():
    alg = build_algebra({"name": "M3", "size": 5,
                         "leq": [[0, 1], [0, 2], [0, 3], [1, 4], [2, 4], [3, 4]],
                         "labels": ["0", "a", "b", "c", "1"]})
    return alg, Binding.lattice()


_CHAIN = re.compile(r"chain\((\d+)\)$")


def catalog_names() -> list[str]:
    return ["B2", "B4", "B8", "chain(n)", "DM4", "O6", "N5", "M3"]


def catalog(name: str) -> tuple[FiniteAlgebra, Binding]:
    """Return a named algebra together with its standard binding.

    Repeated calls return the same algebra object, so relations built from
    separate lookups compare equal.
    """
    return _catalog(name.strip())


@lru_cache(maxsize=None)
def _catalog(key: str) -> tuple[FiniteAlgebra, Binding]:
    if key == "B2":
        return _boolean(1, "B2", ("0", "1"))
    if key == "B4":
        return _boolean(2, "B4", ("0", "p", "q", "1"))
    if key == "B8":
        return _boolean(3, "B8", ("0", "p", "q", "pq", "r", "pr", "qr", "1"))
    if key == "DM4":
        return _dm4()
    if key == "O6":
        return _o6()
    if key == "N5":
        return _n5()
    if key == "M3":
        return _m3()
    m = _CHAIN.match(key)
    if m:
        return _chain(int(m.group(1)))
    raise UnknownCatalogName(f"unknown catalog algebra {key!r}")


def resolve_algebra(ref: str, base: Path | None = None) -> tuple[FiniteAlgebra, Binding]:
    """Catalog name or path to an algebra JSON file.

    File algebras get a binding with every symbol their tables support.
    """
    try:
        return catalog(ref)
    except UnknownCatalogName:
        pass
    path = Path(ref)
    if base is not None and not path.is_absolute():
        path = base / path
    if not path.exists():
        raise UnknownCatalogName(f"{ref!r} is neither a catalog algebra nor a file")
    with open(path) as fh:
        raw = json.load(fh)
    alg = build_algebra(raw)
    syms = {"and": "meet", "or": "join", "top": "top", "bot": "bot"}
    if "binding" in raw:
        syms = dict(raw["binding"])
    else:
        if "neg" in alg.unary_ops:
            syms["neg"] = "neg"
        for op in ("impl", "coimpl"):
            if op in alg.binary_ops:
                syms[op] = op
    return alg, Binding(syms).validate(alg)


# ---------------------------------------------------------------------------
# metalogical properties

METAPROPERTIES = ("and_P", "or_P", "or_S", "bot_P", "top_W", "top_P", "neg_W", "neg_Ir",
                  "neg_Il", "neg_I", "neg_A", "neg_P", "coneg_A", "coneg_P", "neg_S",
                  "impl_P", "coimpl_P")

_ALIASES = {
    "∧_P": "and_P", "∨_P": "or_P", "∨_S": "or_S", "⊥_P": "bot_P", "⊤_W": "top_W",
    "⊤_P": "top_P", "¬_W": "neg_W", "¬_Ir": "neg_Ir", "¬_Il": "neg_Il", "¬_I": "neg_I",
    "¬_A": "neg_A", "¬_P": "neg_P", "~_A": "coneg_A", "∼_A": "coneg_A", "~_P": "coneg_P",
    "∼_P": "coneg_P", "¬_S": "neg_S", "→_P": "impl_P", "⤙_P": "coimpl_P", "-<_P": "coimpl_P",
    "->_P": "impl_P",
}

_REQUIRES = {
    "and_P": ("and",), "or_P": ("or",), "or_S": ("or",), "bot_P": ("bot",),
    "top_W": ("top",), "top_P": ("top",), "neg_W": ("neg",), "neg_Ir": ("neg",),
    "neg_Il": ("neg",), "neg_I": ("neg",), "neg_A": ("neg",), "neg_P": ("neg", "and"),
    "coneg_A": ("neg", "top"), "coneg_P": ("neg", "or"), "neg_S": ("neg",),
    "impl_P": ("impl",), "coimpl_P": ("coimpl",),
}


def canonical_property(prop: str) -> str:
    p = _ALIASES.get(prop, prop)
    if p not in METAPROPERTIES:
        raise KeyError(f"unknown metalogical property {prop!r}")
    return p


def _first(it):
    return next(iter(it), None)


def _scan(alg: FiniteAlgebra, arity: int, bad) -> tuple | None:
    return _first(w for w in itertools.product(alg.elements, repeat=arity) if bad(*w))


def check_metaproperty(alg: FiniteAlgebra, b: Binding, prop: str) -> PropertyReport:
    """Evaluate one metalogical property on ``alg`` under binding ``b``.

    Returns a report whose witness is the first violating tuple of elements
    (empty when the failure is an unbound symbol or missing constant).
    """
    pid = canonical_property(prop)
    missing = [s for s in _REQUIRES[pid] if s not in b]
    if missing:
        return PropertyReport(pid, False, (), f"symbol unbound: {', '.join(missing)}")
    le, m, j = alg.le, alg.m, alg.j
    bot, top = alg.bottom, alg.top
    neg = b.unary(alg, "neg") if "neg" in b else None
    w: tuple | None

    if pid in ("and_P", "or_P", "bot_P", "top_W", "top_P"):
        # bound and/or are the lattice tables; bound constants are the extremes
        w = None
    elif pid == "or_S":
        w = _scan(alg, 3, lambda x, y, c: m[c][j[x][y]] != j[m[c][x]][m[c][y]])
    elif pid == "neg_W":
        w = _scan(alg, 2, lambda x, y: le[x][y] and not le[neg[y]][neg[x]])
    elif pid == "neg_Ir":
        w = _scan(alg, 1, lambda x: not le[x][neg[neg[x]]])
    elif pid == "neg_Il":
        w = _scan(alg, 1, lambda x: not le[neg[neg[x]]][x])
    elif pid == "neg_I":
        w = _scan(alg, 1, lambda x: neg[neg[x]] != x)
    elif pid == "neg_A":
        w = _scan(alg, 1, lambda x: m[x][neg[x]] != bot)
    elif pid == "neg_P":
        w = _scan(alg, 2, lambda x, y: not le[m[x][neg[m[x][y]]]][neg[y]])
    elif pid == "coneg_A":
        w = _scan(alg, 1, lambda x: j[x][neg[x]] != top)
    elif pid == "coneg_P":
        w = _scan(alg, 2, lambda x, y: not le[neg[y]][j[x][neg[j[x][y]]]])
    elif pid == "neg_S":
        w = _scan(alg, 2, lambda x, y: m[x][y] == bot and not le[x][neg[y]])
    elif pid == "impl_P":
        imp = b.binary(alg, "impl")
        w = _scan(alg, 3, lambda x, y, c: le[c][imp[x][y]] != le[m[x][c]][y])
    else:  # coimpl_P
        co = b.binary(alg, "coimpl")
        w = _scan(alg, 3, lambda x, y, c: le[co[x][y]][c] != le[x][j[c][y]])

    notes = ""
    if w is None and pid == "coneg_A" and not alg.is_distributive:
        notes = "holds on this finite model only; the logic it represents may lack it"
    return PropertyReport(pid, w is None, w, notes, instances=alg.size)
