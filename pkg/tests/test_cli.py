import json

import pytest

from leveltree.cli import run
from leveltree.tree import tree_json


@pytest.fixture
def tree_file(tmp_path, nested_tree):
    path = tmp_path / "nested.json"
    path.write_text(tree_json(nested_tree.base, nested_tree.level))
    return str(path)


def test_validate_ok(tree_file, capsys):
    assert run(["validate", tree_file]) == 0
    assert "m=-2" in capsys.readouterr().out


def test_validate_rejects_bad_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"root": "o", ')
    assert run(["validate", str(path)]) == 2
    assert "malformed JSON" in capsys.readouterr().err


def test_validate_names_violated_invariant(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "root": "o", "parents": {"a": "o"}, "weights": {"o": 0, "a": 1},
        "levels": {"o": "0", "a": "1"}}))
    assert run(["validate", str(path)]) == 2
    assert "nonpositive" in capsys.readouterr().err


def test_indices_table(tree_file, capsys):
    assert run(["indices", tree_file]) == 0
    out = capsys.readouterr().out
    assert "m = -2" in out
    assert "I_plus  = ['-1', '-2']" in out
    assert "section(-2) = ['a', 'c', 'd']" in out


def test_indices_json_round_trip(tree_file, capsys):
    assert run(["indices", tree_file, "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["m"] == "-2"
    assert data["i_plus"] == ["-1", "-2"]


def test_contract_matches_expected_tree(tree_file, capsys):
    assert run(["contract", tree_file, "--levels=-2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["parents"] == {"a": "o", "b": "o"}
    assert data["levels"] == {"a": "-1", "b": "-1", "o": "0"}
    assert data["weights"] == {"a": 1, "b": 2, "o": 0}


def test_contract_mixed_subset(tree_file, capsys):
    assert run(["contract", tree_file, "--levels=-1,-2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["parents"] == {}


def test_contract_dot_output(tree_file, capsys):
    assert run(["contract", tree_file, "--levels=-2", "--dot"]) == 0
    assert capsys.readouterr().out.startswith("digraph")


def test_contract_rejects_foreign_label(tree_file, capsys):
    assert run(["contract", tree_file, "--levels=-7"]) == 2
    assert "outside the index set" in capsys.readouterr().err


def test_chart_prints_theta_and_mu(tree_file, capsys):
    assert run(["chart", tree_file, "--special=-1=b,-2=a"]) == 0
    out = capsys.readouterr().out
    assert "theta zeta_a = eps(-1) * eps(-2)" in out
    assert "mu[I={-1}] level=-2 edge=c: eps(-1)^-1 * u_c" in out


def test_verify_all_suites_pass(tree_file, capsys):
    assert run(["verify", tree_file, "--suite", "all"]) == 0
    out = capsys.readouterr().out
    assert "0 failures" in out and "suite charts" in out


def test_verify_json_is_deterministic(tree_file, capsys):
    assert run(["verify", tree_file, "--suite", "all", "--json"]) == 0
    first = capsys.readouterr().out
    assert run(["verify", tree_file, "--suite", "all", "--json"]) == 0
    second = capsys.readouterr().out
    assert first == second
    parsed = json.loads(first)
    assert all(r["failures"] == [] for r in parsed)


def test_blowup_report(tree_file, capsys):
    assert run(["blowup-report", tree_file]) == 0
    out = capsys.readouterr().out
    assert "stage 2: section ['a', 'b']" in out
    assert "divisor pullback k=2: eps(-1)" in out
    assert "reconstruction from slots [1, 2]" in out


def test_enumerate_counts(capsys):
    assert run(["enumerate", "--max-edges", "2", "--count-only"]) == 0
    assert capsys.readouterr().out.strip() == "63"


def test_enumerate_stream_is_valid_json_lines(capsys):
    assert run(["enumerate", "--max-edges", "1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 10
    for line in lines:
        blob = json.loads(line)
        assert {"root", "parents", "weights", "levels"} <= set(blob)


def test_enumerate_env_override(tree_file, capsys, monkeypatch):
    monkeypatch.setenv("LEVELTREE_MAX_EDGES", "1")
    from leveltree.cli import build_parser
    parser = build_parser()
    args = parser.parse_args(["enumerate", "--count-only"])
    assert args.max_edges == 1


def test_missing_file(capsys):
    assert run(["validate", "/nonexistent/tree.json"]) == 2
