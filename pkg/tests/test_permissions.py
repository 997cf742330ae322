import itertools
import random
import warnings

import pytest
from hypothesis import given, strategies as st

from iolog.algebra import catalog, check_metaproperty
from iolog.norms import NormRelation, close, is_closed, naive_close
from iolog.permissions import (VARIANTS, FamilyEmpty, FamilyNotUpDirected, MemberMissingBase,
                               MemberNotClosed, MemberNotCrossCoherent, PermissionOutsideNegative,
                               PresetWarning, canonical_variant, check_rule_closure,
                               cross_coherent, dual_negative, dual_negative_classical,
                               dynamic_positive, dynamic_positive_classical, generalized_dynamic,
                               load_family, negative_permission, negative_permission_classical,
                               static_positive)

B4, BB4 = catalog("B4")
p, q, BOT, TOP = 1, 2, 0, 3
N = NormRelation.from_pairs(B4, [(p, q)])
P = NormRelation.from_pairs(B4, [(q, p)])
EMPTY = NormRelation.empty(B4)
FULL = NormRelation.full(B4)


def labelled(rel):
    return sorted([rel.alg.label(a), rel.alg.label(x)] for a, x in rel.pairs)


def quiet(fn, *args, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return fn(*args, **kw)


# -- negative and dual negative -------------------------------------------------

def test_negative_permission_fixtures(golden):
    assert labelled(negative_permission(N).complement()) == golden["b4_negperm_complement"]
    assert negative_permission(EMPTY) == FULL
    b2, _ = catalog("B2")
    top = close(NormRelation.from_pairs(b2, [(1, 1)]), "N1")[0]
    assert labelled(negative_permission(top)) == golden["b2_negperm_of_top"]


def test_classical_variants_on_trivial_systems():
    for f in (negative_permission_classical, dual_negative_classical):
        assert f(EMPTY, binding=BB4) == FULL
        assert f(FULL, binding=BB4) == NormRelation.empty(B4)
    assert dual_negative(FULL) == NormRelation.empty(B4)


def test_classical_coincidence_on_b2_exhaustive():
    b2, bb = catalog("B2")
    for code in range(16):
        rel = NormRelation.from_code(b2, code)
        if is_closed(rel, "WO"):
            assert negative_permission(rel) == negative_permission_classical(rel, binding=bb)
        if is_closed(rel, "SI"):
            assert dual_negative(rel) == dual_negative_classical(rel, binding=bb)


def test_dual_negative_fixtures():
    closed = close(N, "N1")[0]
    d = dual_negative(closed)
    assert (p, q) in d and (q, q) not in closed and B4.m[q][p] == BOT
    assert (BOT, TOP) not in d


NAMES = ["B4", "DM4", "O6", "chain(3)", "B8"]


def rel_of(name, max_pairs=5):
    alg, _ = catalog(name)
    pair = st.tuples(st.sampled_from(alg.elements), st.sampled_from(alg.elements))
    return st.lists(pair, max_size=max_pairs).map(lambda ps: NormRelation.from_pairs(alg, ps))


@given(st.sampled_from(NAMES).flatmap(lambda n: st.tuples(rel_of(n), rel_of(n))))
def test_antitone(pair):
    n1, extra = pair
    assert negative_permission(n1 | extra) <= negative_permission(n1)


@given(st.sampled_from(NAMES).flatmap(rel_of))
def test_coherence_bound(n):
    from iolog.norms import almost_included, internally_coherent
    if internally_coherent(n).holds:
        assert almost_included(n, negative_permission(n))


@pytest.mark.parametrize("name", ["B4", "B8", "B2"])
def test_classical_coincidence_where_hypotheses_hold(name):
    alg, b = catalog(name)
    assert check_metaproperty(alg, b, "neg_S") and check_metaproperty(alg, b, "neg_A")
    rng = random.Random(name)
    for _ in range(200):
        rel = close(NormRelation.from_pairs(alg, [(rng.randrange(alg.size), rng.randrange(alg.size))
                                                  for _ in range(3)]), "WO,SI")[0]
        assert negative_permission(rel) == negative_permission_classical(rel, binding=b)
        assert dual_negative(rel) == dual_negative_classical(rel, binding=b)


@pytest.mark.parametrize("name", ["B2", "B4"])
def test_largest_permission_system(name):
    # no proper superset of P_N stays compatible with a WO-closed N
    alg, _ = catalog(name)
    rng = random.Random(name)
    for _ in range(100):
        n = close(NormRelation.from_pairs(alg, [(rng.randrange(alg.size), rng.randrange(alg.size))]),
                  "WO")[0]
        pn = negative_permission(n)
        for a, x in itertools.product(alg.elements, repeat=2):
            if (a, x) not in pn:
                assert any(alg.m[x][y] == alg.bottom for y in n.outputs(a))


# -- static and dynamic ----------------------------------------------------------

def test_static_fixture(golden):
    s = static_positive(P, N, "N1")
    assert labelled(s) == golden["b4_static_qp"]
    assert all((BOT, x) in s for x in B4.elements)
    assert static_positive(EMPTY, N, "N1") == close(N, "N1")[0]


def test_static_warns_outside_negative_permission():
    with pytest.warns(PermissionOutsideNegative):
        static_positive(NormRelation.from_pairs(B4, [(p, p)]), N, "N1")


@given(st.sampled_from(["B4", "DM4", "chain(3)"]).flatmap(lambda n: st.tuples(rel_of(n, 2), rel_of(n, 3))),
       st.sampled_from(["N1", "N2", "N3"]))
def test_static_contains_closure(pn, rules):
    perm, norms = pn
    assert close(norms, rules)[0] <= quiet(static_positive, perm, norms, rules)


def test_cross_coherence_examples():
    assert cross_coherent(P, N, "N1").holds
    r = cross_coherent(NormRelation.from_pairs(B4, [(p, p)]), N, "N1")
    assert not r.holds and r.witness == (p, q, BOT)
    assert cross_coherent(P, EMPTY, "N1").holds


def test_dynamic_fixtures(golden):
    d = dynamic_positive(P, N, "N1")
    assert (q, p) in d
    assert labelled(d) == golden["b4_dynamic_qp"]
    assert (q, q) in close(N.add((q, q)), "N1")[0]


def test_dynamic_degeneracy(golden):
    d = dynamic_positive(EMPTY, EMPTY, "N1")
    assert d == {(a, x) for a in B4.elements for x in B4.elements if a != BOT}
    assert labelled(d) == golden["b4_dynamic_empty"]
    assert all((BOT, x) not in d for x in B4.elements)


def test_dynamic_classical():
    assert (q, p) in dynamic_positive_classical(P, N, "N1", binding=BB4)
    rng = random.Random(4)
    for _ in range(30):
        n = NormRelation.from_pairs(B4, [(rng.randrange(4), rng.randrange(4)) for _ in range(2)])
        perm = NormRelation.from_pairs(B4, [(rng.randrange(4), rng.randrange(4))])
        for rules in ("N1", "N2", "N3"):
            assert dynamic_positive_classical(perm, n, rules, binding=BB4) <= \
                dynamic_positive(perm, n, rules)


def test_dynamic_b2_empty_classical():
    b2, bb = catalog("B2")
    e = NormRelation.empty(b2)
    # the only consistent condition is 1; (1, ¬x) closes to (1, 0) exactly when x = 1
    assert dynamic_positive_classical(e, e, "N1", binding=bb) == {(1, 1)}
    assert dynamic_positive(e, e, "N1") == {(1, 0), (1, 1)}


def test_n4_is_accepted_with_a_warning():
    with pytest.warns(PresetWarning):
        dynamic_positive(P, N, "N4")


# -- generalized dynamic -------------------------------------------------------

def test_generalized_singleton_family():
    h = close(N, "N1")[0]
    assert generalized_dynamic(P, N, "N1", [h]) == negative_permission(h)


def test_generalized_is_below_each_member():
    h1 = close(N, "N1")[0]
    h2 = close(N.add((TOP, q)), "N1")[0]
    e = generalized_dynamic(EMPTY, N, "N1", [h1, h2])
    assert e <= negative_permission(h1) and e <= negative_permission(h2)
    assert e == negative_permission(h1) & negative_permission(h2)


def test_family_validation():
    h1 = close(N.add((q, q)), "N1")[0]
    h2 = close(N.add((q, p)), "N1")[0]
    with pytest.raises(FamilyNotUpDirected):
        generalized_dynamic(EMPTY, N, "N1", [h1, h2])
    with pytest.raises(FamilyEmpty):
        generalized_dynamic(EMPTY, N, "N1", [])
    with pytest.raises(MemberNotClosed):
        generalized_dynamic(EMPTY, N, "N1", [N])
    with pytest.raises(MemberMissingBase):
        generalized_dynamic(EMPTY, N, "N1", [close(EMPTY, "N1")[0]])
    with pytest.raises(MemberNotCrossCoherent):
        generalized_dynamic(NormRelation.from_pairs(B4, [(p, p)]), N, "N1", [close(N, "N1")[0]])


def test_family_file(tmp_path, data_dir):
    (tmp_path / "h.json").write_text((data_dir / "b4_pq.json").read_text())
    (tmp_path / "fam.json").write_text('{"members": ["h.json"]}')
    fam = load_family(tmp_path / "fam.json")
    assert list(fam) == [N]


# -- audits --------------------------------------------------------------------

def test_audit_fixtures():
    pc = negative_permission(N).complement()
    assert check_rule_closure(pc, "WO▷").holds
    r = check_rule_closure(pc, "SI▷")
    assert not r.holds and r.witness == (p, p, BOT, p)
    s1 = static_positive(P, N, "N1")
    assert check_rule_closure(s1, "AND↓", context=close(N, "N1")[0]).holds


def test_audit_needs_context():
    with pytest.raises(ValueError):
        check_rule_closure(N, "CT▷")


def test_variant_spellings():
    assert canonical_variant("SI>") == "SI▷"
    assert canonical_variant("and<") == "AND◁"
    assert canonical_variant("CT_down") == "CT↓"
    assert set(map(canonical_variant, VARIANTS)) == set(VARIANTS)
    with pytest.raises(ValueError):
        canonical_variant("FOO>")


def test_static_matches_naive_definition():
    rng = random.Random(11)
    for _ in range(40):
        n = NormRelation.from_pairs(B4, [(rng.randrange(4), rng.randrange(4)) for _ in range(2)])
        perm = NormRelation.from_pairs(B4, [(rng.randrange(4), rng.randrange(4)) for _ in range(2)])
        for rules in ("N1", "N2", "N3", "N4"):
            want = naive_close(n, rules)
            for pair in perm.pairs:
                want = want | naive_close(n.add(pair), rules)
            assert static_positive(perm, n, rules, check=False) == want
