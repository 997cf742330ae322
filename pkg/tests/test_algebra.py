import itertools

import pytest
from hypothesis import given, strategies as st

from iolog.algebra import (METAPROPERTIES, BadTable, Binding, NotALattice, NotAPartialOrder,
                           PropertyReport, UnknownCatalogName, build_algebra, canonical_property,
                           catalog, check_metaproperty, resolve_algebra)

CATALOG = ["B2", "B4", "B8", "DM4", "chain(3)", "chain(5)", "O6", "N5", "M3"]


def test_powerset_of_two_atoms_is_b4():
    alg = build_algebra({"size": 4, "leq": [[0, 1], [0, 2], [1, 3], [2, 3]],
                         "labels": ["0", "p", "q", "1"]})
    p, q = alg.element("p"), alg.element("q")
    assert alg.m[p][q] == alg.bottom and alg.j[p][q] == alg.top
    # residuation gives the Boolean complement as p -> 0
    assert alg.binary_ops["impl"][p][alg.bottom] == q


def test_chain_implication_derived_by_residuation():
    alg = build_algebra({"size": 3, "leq": [[0, 1], [1, 2]]})
    impl = alg.binary_ops["impl"]
    assert impl[1][0] == 0
    for a, b in itertools.product(range(3), repeat=2):
        best = max(c for c in range(3) if alg.le[alg.m[a][c]][b])
        assert impl[a][b] == best


def test_order_is_completed_transitively():
    alg = build_algebra({"size": 3, "leq": [[0, 1], [1, 2]]})
    assert alg.le[0][2]


def test_cycle_is_not_a_partial_order():
    with pytest.raises(NotAPartialOrder):
        build_algebra({"size": 2, "leq": [[0, 1], [1, 0]]})


def test_missing_join_is_not_a_lattice():
    # two incomparable upper bounds of {1, 2}
    leq = [[0, 1], [0, 2], [1, 3], [1, 4], [2, 3], [2, 4], [3, 5], [4, 5]]
    with pytest.raises(NotALattice):
        build_algebra({"size": 6, "leq": leq})


@pytest.mark.parametrize("spec", [
    {"size": 2, "leq": [[0, 1]], "ops": {"neg": [1, 5]}},
    {"size": 2, "leq": [[0, 1]], "ops": {"impl": [[1, 1]]}},
    {"size": 2, "leq": [[0, 1]], "ops": {"meet": [[0, 1], [1, 1]]}},
    {"size": 2, "leq": [[0, 1]], "labels": ["a"]},
    {"leq": []},
])
def test_bad_tables_rejected(spec):
    with pytest.raises(BadTable):
        build_algebra(spec)


def test_to_json_round_trip():
    for name in CATALOG:
        alg, _ = catalog(name)
        again = build_algebra(alg.to_json())
        assert again.le == alg.le and again.m == alg.m and again.j == alg.j
        assert again.unary_ops == alg.unary_ops


def test_catalog_examples():
    dm4, b = catalog("DM4")
    neg = b.unary(dm4, "neg")
    assert [sum(dm4.le[x]) for x in dm4.elements] == [4, 3, 2, 1]  # a chain
    assert all(neg[neg[x]] == x for x in dm4.elements)
    assert all(dm4.le[neg[y]][neg[x]] for x in dm4.elements for y in dm4.elements
               if dm4.le[x][y])
    c3, b = catalog("chain(3)")
    h = c3.element("h")
    assert b.unary(c3, "neg")[h] == c3.bottom == b.binary(c3, "impl")[h][c3.bottom]
    assert catalog("B2")[0].size == 2


def test_unknown_catalog_name():
    with pytest.raises(UnknownCatalogName):
        catalog("B16")
    with pytest.raises(UnknownCatalogName):
        resolve_algebra("no/such/file.json")


def test_resolve_algebra_from_file(tmp_path):
    f = tmp_path / "c3.json"
    f.write_text('{"name": "c3", "size": 3, "leq": [[0, 1], [1, 2]]}')
    alg, b = resolve_algebra(str(f))
    assert alg.size == 3 and "impl" in b and "coimpl" in b


def test_metaproperty_examples():
    c3, b = catalog("chain(3)")
    r = check_metaproperty(c3, b, "¬_Il")
    assert not r.holds and r.witness == (c3.element("h"),)
    dm4, b = catalog("DM4")
    r = check_metaproperty(dm4, b, "neg_A")
    a = dm4.element("a")
    assert not r.holds and r.witness == (a,) and dm4.m[a][b.unary(dm4, "neg")[a]] == a
    assert check_metaproperty(*catalog("B2"), "¬_I").holds


@pytest.mark.parametrize("name", CATALOG)
def test_neg_I_is_conjunction_of_halves(name):
    alg, b = catalog(name)
    if "neg" not in b:
        pytest.skip("no negation bound")
    both = check_metaproperty(alg, b, "neg_Ir").holds and check_metaproperty(alg, b, "neg_Il").holds
    assert check_metaproperty(alg, b, "neg_I").holds == both


@pytest.mark.parametrize("name", CATALOG)
def test_galois_reading_of_neg_Ir(name):
    alg, b = catalog(name)
    if "neg" not in b or not check_metaproperty(alg, b, "neg_W"):
        pytest.skip("needs an antitone negation")
    neg = b.unary(alg, "neg")
    galois = all(alg.le[x][neg[y]] == alg.le[y][neg[x]] for x in alg.elements for y in alg.elements)
    assert check_metaproperty(alg, b, "neg_Ir").holds == galois


@pytest.mark.parametrize("name", ["B2", "B4", "B8"])
def test_boolean_algebras_have_every_property(name):
    alg, b = catalog(name)
    assert all(check_metaproperty(alg, b, p) for p in METAPROPERTIES)


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_heyting_chain_detachment(n):
    alg, b = catalog(f"chain({n})")
    imp = b.binary(alg, "impl")
    assert check_metaproperty(alg, b, "impl_P").holds
    assert all(alg.le[alg.m[a][imp[a][c]]][c] for a in alg.elements for c in alg.elements)


def test_theorem_free_binding_loses_top_P():
    alg, _ = catalog("B4")
    r = check_metaproperty(alg, Binding.lattice(top=False), "top_P")
    assert not r.holds and "top" in r.notes


def test_o6_coneg_A_note():
    alg, b = catalog("O6")
    r = check_metaproperty(alg, b, "~_A")
    assert r.holds and "finite model" in r.notes


def test_aliases():
    assert canonical_property("¬_Ir") == "neg_Ir"
    assert canonical_property("∼_A") == "coneg_A"
    with pytest.raises(KeyError):
        canonical_property("xor_P")


def test_binding_validation():
    alg, _ = catalog("B4")
    with pytest.raises(BadTable):
        Binding({"and": "join"}).validate(alg)
    with pytest.raises(BadTable):
        Binding({"neg": "nope"}).validate(alg)
    with pytest.raises(ValueError):
        Binding({"xor": "meet"})


def test_failing_report_needs_witness():
    with pytest.raises(ValueError):
        PropertyReport("x", False)
    d = PropertyReport("x", False, (1, 2), details={"k": 1}).to_dict()
    assert d["witness"] == [1, 2] and d["details"] == {"k": 1}


@given(st.sampled_from(CATALOG), st.sampled_from(METAPROPERTIES))
def test_check_metaproperty_is_pure(name, prop):
    alg, b = catalog(name)
    assert check_metaproperty(alg, b, prop) == check_metaproperty(alg, b, prop)


@given(st.sampled_from(CATALOG), st.data())
def test_lattice_laws(name, data):
    alg, _ = catalog(name)
    x, y, z = (data.draw(st.sampled_from(alg.elements)) for _ in range(3))
    m, j, le = alg.m, alg.j, alg.le
    assert m[x][y] == m[y][x] and j[x][y] == j[y][x]
    assert m[x][m[y][z]] == m[m[x][y]][z]
    assert m[x][j[x][y]] == x == j[x][m[x][y]]
    assert le[x][y] == (m[x][y] == x)
    assert le[alg.bottom][x] and le[x][alg.top]
