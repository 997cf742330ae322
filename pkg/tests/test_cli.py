import json

import pytest

from iolog.cli import main
from iolog.norms import load_norms
from iolog.permissions import check_rule_closure


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def pq(data_dir):
    return data_dir / "b4_pq.json"


def test_close_prints_six_pairs(capsys, pq, golden):
    code, out, _ = run(capsys, "close", pq, "--rules", "N1")
    assert code == 0 and "6 pairs" in out
    code, out, _ = run(capsys, "close", pq, "--rules", "N1", "--json")
    doc = json.loads(out)
    assert code == 0 and sorted(doc["labels"]) == golden["b4_n1_closure"]


def test_json_relation_reloads_as_norm_file(capsys, pq, tmp_path):
    _, out, _ = run(capsys, "close", pq, "--rules", "TOP,SI,WO,AND", "--json")
    f = tmp_path / "closed.json"
    f.write_text(out)
    assert len(load_norms(f).relation) == 6


def test_missing_file_is_input_error(capsys):
    code, _, err = run(capsys, "close", "missing.json", "--rules", "N1")
    assert code == 2 and "missing.json" in err


@pytest.mark.parametrize("argv", [
    ["close", "{pq}", "--rules", "N9"],
    ["close", "{pq}"],
    ["frobnicate"],
    [],
    ["props", "B16"],
    ["props", "B4", "--props", "xor_P"],
    ["close", "{pq}", "--rules", "N1", "--trace", "p"],
    ["close", "{pq}", "--rules", "N1", "--trace", "p,r"],
    ["verify", "--suite", "nope"],
    ["perm", "static", "{pq}"],
    ["audit", "{pq}", "--variant", "CT>"],
    ["props", "chain(40)"],
])
def test_input_errors(capsys, pq, argv):
    code, _, _ = run(capsys, *[a.format(pq=pq) for a in argv])
    assert code == 2


def test_carrier_cap(capsys, monkeypatch):
    monkeypatch.setenv("IOLOG_MAX_CARRIER", "4")
    assert run(capsys, "props", "B8")[0] == 2
    assert run(capsys, "props", "B4")[0] == 0
    monkeypatch.setenv("IOLOG_MAX_CARRIER", "many")
    assert run(capsys, "props", "B4")[0] == 2


def test_trace(capsys, pq):
    code, out, _ = run(capsys, "close", pq, "--rules", "N1", "--trace", "p,T")
    assert code == 0 and "WO" in out
    code, out, _ = run(capsys, "close", pq, "--rules", "N1", "--trace", "(q,q)")
    assert code == 1 and "not derivable" in out
    code, out, _ = run(capsys, "close", pq, "--rules", "N1", "--trace", "p,p|q", "--json")
    assert code == 0 and json.loads(out)["steps"][-1]["rule"] == "WO"


def test_out(capsys, pq):
    code, out, _ = run(capsys, "out", pq, "--rules", "N1", "--inputs", "p", "--json")
    assert code == 0 and json.loads(out)["labels"] == ["q", "1"]


def test_perm_commands(capsys, pq, data_dir, tmp_path, golden):
    perms = tmp_path / "perm.json"
    perms.write_text('{"algebra": "B4", "role": "permission", "pairs": [["q", "p"]], '
                     '"assignment": {"p": 1, "q": 2}}')
    code, out, _ = run(capsys, "perm", "neg", pq, "--json")
    assert code == 0 and json.loads(out)["count"] == 14
    assert run(capsys, "perm", "dual", pq, "--classical")[0] == 0
    code, out, _ = run(capsys, "perm", "static", pq, perms, "--rules", "N1", "--json")
    assert sorted(json.loads(out)["labels"]) == golden["b4_static_qp"]
    code, out, _ = run(capsys, "perm", "dynamic", pq, perms, "--rules", "N1", "--json")
    assert ["q", "p"] in json.loads(out)["labels"]
    code, _, err = run(capsys, "perm", "dynamic", pq, perms, "--rules", "N4")
    assert code == 0 and "warning" in err
    (tmp_path / "h.json").write_text(pq.read_text())
    (tmp_path / "fam.json").write_text('{"members": ["h.json"]}')
    assert run(capsys, "perm", "gen", pq, perms, tmp_path / "fam.json", "--rules", "N1")[0] == 2
    closed = tmp_path / "closed.json"
    closed.write_text(run(capsys, "close", pq, "--rules", "N1", "--json")[1])
    (tmp_path / "fam.json").write_text('{"members": ["closed.json"]}')
    assert run(capsys, "perm", "gen", pq, perms, tmp_path / "fam.json", "--rules", "N1")[0] == 0


def test_audit(capsys, pq, tmp_path):
    code, out, _ = run(capsys, "audit", pq, "--variant", "SI>")
    assert code == 1 and "FAILS" in out
    closed = tmp_path / "closed.json"
    closed.write_text(run(capsys, "close", pq, "--rules", "N1", "--json")[1])
    assert run(capsys, "audit", closed, "--variant", "SI>")[0] == 0
    want = check_rule_closure(load_norms(closed).relation, "EX▷", load_norms(pq).relation,
                              load_norms(pq).binding)
    assert run(capsys, "audit", closed, "--variant", "EX>", "--context", pq)[0] == int(not want.holds)


def test_props(capsys):
    code, out, _ = run(capsys, "props", "DM4", "--props", "neg_I,neg_A")
    assert code == 1 and "holds  neg_I" in out and "FAILS  neg_A" in out
    code, out, _ = run(capsys, "props", "chain(3)", "--json")
    rows = {r["check_id"]: r["holds"] for r in json.loads(out)}
    assert code == 0 and rows["neg_Ir"] and not rows["neg_Il"]


def test_algebra_commands(capsys):
    code, out, _ = run(capsys, "algebra", "list")
    assert code == 0 and "DM4" in out
    code, out, _ = run(capsys, "algebra", "show", "O6", "--json")
    assert code == 0 and json.loads(out)["size"] == 6
    assert run(capsys, "algebra", "show")[0] == 2


def test_verify_example21(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "example21", "--json")
    rows = {r["notes"].split()[0]: r for r in json.loads(out)}
    assert code == 0
    dm4 = rows["DM4"]["details"]
    assert dm4["neg_I"] is True and dm4["neg_A"] is False


def test_verify_text_and_json_agree(capsys):
    argv = ["verify", "--suite", "negperm", "--algebras", "B2,chain(3)", "--seed", "3",
            "--count", "50", "--no-timing"]
    code_t, text, _ = run(capsys, *argv)
    code_j, js, _ = run(capsys, *argv, "--json")
    reports = json.loads(js)
    assert code_t == code_j == 0
    assert text.count("ok  ") == sum(r["holds"] for r in reports) == len(reports)
    assert js == run(capsys, *argv, "--json")[1]


def test_verify_single_check_failure_exit(capsys, monkeypatch):
    import iolog.cli as cli
    from iolog.algebra import PropertyReport

    monkeypatch.setattr(cli, "run_check", lambda *a, **k: PropertyReport("X", False, (1,)))
    assert run(capsys, "verify", "--check", "L-NEG-1", "--algebras", "B2")[0] == 1
