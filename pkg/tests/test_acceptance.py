"""Acceptance criteria, one printed PASS/FAIL line each.

Run alone with ``pytest tests/test_acceptance.py -s`` or
``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import random
import sys
import time
from pathlib import Path

import pytest

from iolog.algebra import catalog, check_metaproperty
from iolog.norms import PRESETS, NormRelation, close, is_closed, naive_close, out
from iolog.permissions import (check_rule_closure, dynamic_positive, negative_permission,
                               static_positive)
from iolog.verifier import REGISTRY, SUITE_ALGEBRAS, run_check

sys.path.insert(0, str(Path(__file__).parent))
import oracle  # noqa: E402

LINES = []


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    LINES.append(line)
    print(line, file=sys.__stdout__, flush=True)
    return ok


# -- 1 ---------------------------------------------------------------------------

EX21 = {
    "B2": {p: True for p in ("and_P", "or_P", "or_S", "bot_P", "top_W", "top_P", "neg_W",
                             "neg_Ir", "neg_Il", "neg_I", "neg_A", "neg_P", "coneg_A",
                             "coneg_P", "neg_S", "impl_P", "coimpl_P")},
    "chain(3)": {"and_P": True, "or_S": True, "bot_P": True, "top_P": True, "impl_P": True,
                 "neg_Ir": True, "neg_A": True, "neg_P": True, "neg_S": True,
                 "neg_Il": False, "coneg_A": False},
    "DM4": {"neg_W": True, "neg_I": True, "neg_A": False, "coneg_A": False},
    "O6": {"and_P": True, "or_P": True, "bot_P": True, "top_P": True, "neg_I": True,
           "neg_A": True, "or_S": False},
}
EX21["B4"] = EX21["B2"]


def test_criterion_1_example_matrix():
    t = time.perf_counter()
    bad = []
    for name, row in EX21.items():
        alg, b = catalog(name)
        for prop, want in row.items():
            if check_metaproperty(alg, b, prop).holds != want:
                bad.append((name, prop))
    secs = time.perf_counter() - t
    ok = not bad and secs < 1.0
    report(1, ok, f"{sum(map(len, EX21.values()))} cells, mismatches={bad}, {secs:.3f}s (< 1s)")
    assert ok


# -- 2 ---------------------------------------------------------------------------

def test_criterion_2_closure_oracle():
    t = time.perf_counter()
    b4, _ = catalog("B4")
    b2, _ = catalog("B2")
    mismatches = 0
    for code in range(1 << 16):
        rel = NormRelation.from_code(b4, code)
        mismatches += close(rel, "N1")[0] != naive_close(rel, "N1")
    rng = random.Random(0)
    for preset in ("N2", "N3", "N4"):
        for _ in range(10000):
            rel = NormRelation.from_code(b4, rng.getrandbits(16))
            mismatches += close(rel, preset)[0] != naive_close(rel, preset)
    for preset in PRESETS:
        for code in range(16):
            rel = NormRelation.from_code(b2, code)
            mismatches += close(rel, preset)[0] != naive_close(rel, preset)
    secs = time.perf_counter() - t
    ok = mismatches == 0 and secs < 60
    report(2, ok, f"N1 on 65536 + N2..N4 on 3x10000 (B4) + B2 exhaustive: "
                  f"mismatches={mismatches}, {secs:.1f}s (< 60s)")
    assert ok


# -- 3 ---------------------------------------------------------------------------

THEOREMS = [c for c in REGISTRY if c != "EX21-matrix"]


def test_criterion_3_theorem_suites():
    t = time.perf_counter()
    failures, instances, vacuous = [], 0, 0
    for cid in THEOREMS:
        for name in SUITE_ALGEBRAS:
            r = run_check(cid, name, seed=0, count=10000)
            instances += r.instances
            vacuous += r.instances == 0
            if not r.holds:
                failures.append((cid, name, r.witness))
    secs = time.perf_counter() - t
    ok = not failures and secs < 300
    report(3, ok, f"{len(THEOREMS)} checks x {len(SUITE_ALGEBRAS)} algebras, "
                  f"{instances} instances ({vacuous} check/algebra pairs vacuous), "
                  f"violations={len(failures)}, {secs:.0f}s (< 300s)")
    assert ok, failures[:5]


# -- 4 ---------------------------------------------------------------------------

def test_criterion_4_hypothesis_necessity():
    b4, _ = catalog("B4")
    p, q, bot = b4.element("p"), b4.element("q"), b4.bottom
    n = NormRelation.from_pairs(b4, [(p, q)])
    si = check_rule_closure(negative_permission(n).complement(), "SI▷")
    probes = {
        "SI▷ on P_N^c, N={(p,q)}": si,
        "P-NPL-6 -SI on B4": run_check("P-NPL-6", "B4", drop_hypotheses=["SI"]),
        "P-NPL-8 -AND on B4": run_check("P-NPL-8", "B4", drop_hypotheses=["AND"]),
        "P-NPL-9 -WO on B8": run_check("P-NPL-9", "B8", drop_hypotheses=["WO"]),
        "P-NP-EQ -neg_S,neg_A on DM4": run_check("P-NP-EQ", "DM4",
                                                 drop_hypotheses=["neg_S", "neg_A"]),
    }
    found = {k: r.witness for k, r in probes.items() if not r.holds and r.witness}
    ok = len(found) == len(probes) and si.witness == (p, p, bot, p)
    report(4, ok, "; ".join(f"{k}: witness {found.get(k)}" for k in probes))
    assert ok


# -- 5 ---------------------------------------------------------------------------

def _labels(rel):
    return sorted([rel.alg.label(a), rel.alg.label(x)] for a, x in rel.pairs)


def test_criterion_5_fixtures(golden):
    b4, _ = catalog("B4")
    p, q = b4.element("p"), b4.element("q")
    n = NormRelation.from_pairs(b4, [(p, q)])
    perm = NormRelation.from_pairs(b4, [(q, p)])
    empty = NormRelation.empty(b4)
    got = {
        "b4_n1_closure": _labels(close(n, "N1")[0]),
        "b4_out_p": sorted(b4.label(x) for x in out(n, "N1", [p])),
        "b4_negperm_complement": _labels(negative_permission(n).complement()),
        "b4_static_qp": _labels(static_positive(perm, n, "N1")),
        "b4_dynamic_empty": _labels(dynamic_positive(empty, empty, "N1")),
    }
    derived = oracle.compute()
    mismatched = [k for k in got if not (got[k] == golden[k] == derived[k])]
    in_dynamic = (q, p) in dynamic_positive(perm, n, "N1")
    static_bot_row = all((b4.bottom, x) in static_positive(perm, n, "N1") for x in b4.elements)
    ok = not mismatched and in_dynamic and static_bot_row
    report(5, ok, f"{len(got)} golden fixtures (oracle-confirmed), mismatched={mismatched}, "
                  f"(q,p) in D={in_dynamic}, {{⊥}}xA in S={static_bot_row}")
    assert ok


# -- 6 ---------------------------------------------------------------------------

def _dd_exists(rel):
    # a≺x & a≺y ⇒ ∃z ≤ x∧y with a≺z
    alg = rel.alg
    return all(any(alg.le[z][alg.m[x][y]] for z in rel.outputs(a))
               for a in alg.elements for x in rel.outputs(a) for y in rel.outputs(a))


def _ud_exists(rel):
    # a≺x & b≺x ⇒ ∃c ≥ a∨b with c≺x
    alg = rel.alg
    ants = {x: [a for a in alg.elements if (a, x) in rel] for x in alg.elements}
    return all(any(alg.le[alg.j[a][b]][c] for c in ants[x])
               for x in alg.elements for a in ants[x] for b in ants[x])


CATALOG = ["B2", "B4", "B8", "DM4", "chain(3)", "chain(5)", "O6", "N5", "M3"]


def test_criterion_6a_dd_ud():
    rng = random.Random(0)
    bad = []
    for name in CATALOG:
        alg, _ = catalog(name)
        for _ in range(1000):
            rel = NormRelation.from_pairs(alg, [(rng.randrange(alg.size), rng.randrange(alg.size))
                                                for _ in range(rng.randrange(1, 6))])
            with_and = close(rel, {"TOP", "SI", "WO", "AND"})[0]
            with_or = close(rel, {"TOP", "SI", "WO", "OR"})[0]
            if close(rel, {"TOP", "SI", "WO", "DD"})[0] != with_and or not _dd_exists(with_and):
                bad.append((name, "DD", rel))
            if close(rel, {"TOP", "SI", "WO", "UD"})[0] != with_or or not _ud_exists(with_or):
                bad.append((name, "UD", rel))
            # the existential rules already force AND / OR once SI and WO hold
            siwo = close(rel, {"SI", "WO"})[0]
            if _dd_exists(siwo) and not is_closed(siwo, "AND"):
                bad.append((name, "DD=>AND", rel))
            if _ud_exists(siwo) and not is_closed(siwo, "OR"):
                bad.append((name, "UD=>OR", rel))
    ok = not bad
    report("6a", ok, f"DD/AND and UD/OR closure equality on {len(CATALOG)} algebras x 1000 "
                     f"seeded relations: mismatches={len(bad)}")
    assert ok, bad[:3]


def test_criterion_6b_ex_admissibility():
    # Expected red: with the side condition a ∧ y = ⊥, WO-closure does not
    # imply EX-closure (e.g. {(p,q),(p,1)} on B4 yields (p,0)).
    rng = random.Random(0)
    added, offending, first = 0, 0, None
    for name in ("B2", "B4", "B8"):
        alg, _ = catalog(name)
        for _ in range(1000):
            rel = close(NormRelation.from_pairs(alg, [(rng.randrange(alg.size),
                                                       rng.randrange(alg.size))
                                                      for _ in range(rng.randrange(1, 6))]),
                        "WO")[0]
            extra = len(close(rel, {"WO", "EX"})[0]) - len(rel)
            added += extra
            offending += extra > 0
            if extra and first is None:
                first = rel
    ok = added == 0
    report("6b", ok, f"EX on WO-closed Boolean samples (3x1000): pairs added={added} "
                     f"in {offending} relations; first: {first!r}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
