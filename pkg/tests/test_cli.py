"""Golden-file tests for the command line.  Set PIREFINE_REGEN_GOLDEN=1 to rewrite the goldens."""

import io
import json
import os
from pathlib import Path

import pytest

from pirefine.cli.main import run
from pirefine.cli.workspace import parse_workspace
from pirefine.specs import normalize

GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("PIREFINE_REGEN_GOLDEN") == "1"


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


CASES = {
    "eval_entailed": (0, ["eval", "S", "q"]),
    "eval_not_entailed": (1, ["eval", "S", "r"]),
    "eval_derive": (0, ["eval", "D", "q"]),
    "eval_bad_sentence": (3, ["eval", "S", "p ->"]),
    "normalize_union": (0, ["normalize", "T"]),
    "normalize_derive": (3, ["normalize", "D"]),
    "closure_cpc": (0, ["check-closure", "CPC", "--size", "40", "--seed", "2"]),
    "closure_named_corpus": (0, ["check-closure", "CPC", "--corpus", "mp"]),
    "naturality_cpc2ba": (0, ["check-naturality", "cpc2ba", "--size", "20"]),
    "interpretation_cpc2ba": (0, ["check-interpretation", "cpc2ba", "--seed", "1", "--size", "100"]),
    "interpretation_collapse": (1, ["check-interpretation", "collapse", "--size", "20"]),
    "semi_collapse": (0, ["check-semi", "collapse", "--size", "20"]),
    "refinement": (0, ["check-refinement", "CPC", "BA", "--via", "cpc2ba", "--interpretant", "BA", "--size", "20"]),
    "refinement_no_interpretant": (3, ["check-refinement", "CPC", "BA", "--via", "cpc2ba"]),
    "syntactic_cpc_s5g": (0, ["check-syntactic", "CPC", "S5G", "--size", "30"]),
    "syntactic_s5g_cpc": (1, ["check-syntactic", "S5G", "CPC", "--size", "10"]),
    "local_swap": (0, ["check-local", "S", "A", "--via", "swap", "--size", "20"]),
    "local_witness": (0, ["check-local", "S", "A", "--via", "swap", "--witness", "A", "--size", "20"]),
    "conservative_swap": (0, ["check-conservative", "swap", "CPC", "--size", "30"]),
    "conservative_merge": (1, ["check-conservative", "merge", "CPC", "--size", "30"]),
    "structural_derive": (0, ["check-structural", "cpc2ba", "D", "--size", "20"]),
    "unknown_command": (3, ["frobnicate"]),
    "unknown_name": (3, ["check-naturality", "nosuch"]),
    "wrong_kind": (3, ["check-naturality", "CPC"]),
    "budget_too_small": (3, ["check-interpretation", "cpc2ba", "--budget", "1", "--size", "10"]),
}


def _golden(name, text):
    path = GOLDEN / f"{name}.txt"
    if REGEN:
        path.write_text(text)
    return path.read_text()


@pytest.mark.parametrize("name", sorted(CASES))
def test_command_golden(name):
    expected_code, argv = CASES[name]
    code, out, err = invoke(*argv, "--no-timestamp")
    assert code == expected_code, out + err
    assert f"exit: {code}\n--- stdout\n{out}--- stderr\n{err}" == _golden(name, f"exit: {code}\n--- stdout\n{out}--- stderr\n{err}")


def test_interpretation_shows_both_directions():
    code, out, _ = invoke("check-interpretation", "cpc2ba", "--seed", "1", "--size", "100")
    assert code == 0
    assert "preservation: 100/100" in out and "reflection: 100/100" in out


def test_diagnostics_golden(monkeypatch):
    monkeypatch.chdir(GOLDEN)
    code, out, err = invoke("eval", "S", "p", "--workspace", "bad.pi")
    assert code == 3 and out == ""
    assert err == _golden("diagnostics", err)
    assert "bad.pi:5:30: error: unknown morphism 'sigma'" in err


def test_workspace_examples():
    ws = parse_workspace("institution C = builtin cpc;")
    assert list(ws.institutions) == ["C"] and not ws.diagnostics
    ws = parse_workspace("institution C = builtin cpc;\nspec S = flat C { p; p -> q };\nspec T = union S S;")
    assert normalize(ws.specs["T"]) == normalize(ws.specs["S"])
    ws = parse_workspace("institution C = builtin cpc;\nspec S = flat C { p };\nspec U = translate S through sigma;")
    (d,) = ws.diagnostics
    assert "sigma" in d.message and (d.line, d.column) == (3, 30)


def test_parsing_is_total():
    text = "spec A = flat Z { p };\ninstitution C = builtin cpc;\nspec B = flat C { p };\nnonsense;\nspec E = flat C { q };"
    ws = parse_workspace(text)
    assert set(ws.specs) == {"B", "E"}
    assert [d.line for d in ws.diagnostics] == [1, 4]


def test_json_report_and_determinism(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["check-interpretation", "cpc2ba", "--seed", "3", "--size", "30", "--no-timestamp"]
    assert invoke(*argv, "--report", str(a))[0] == 0
    assert invoke(*argv, "--report", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["command"] == "check-interpretation" and doc["seed"] == 3 and doc["size"] == 30
    assert doc["exit_code"] == 0 and "timestamp" not in doc
    assert doc["report"]["counts"]["fail"] == 0
    assert len(doc["report"]["items"]) == 60
    code, out, _ = invoke(*argv[:-1], "--json")
    assert "timestamp" in json.loads(out)


def test_json_golden():
    code, out, _ = invoke("eval", "S", "r", "--json", "--no-timestamp")
    assert code == 1
    assert out == _golden("eval_json", out)


def test_exit_code_matches_report(tmp_path):
    for name, (expected, argv) in CASES.items():
        if expected == 3:
            continue
        path = tmp_path / f"{name}.json"
        code, _, _ = invoke(*argv, "--no-timestamp", "--report", str(path))
        report = json.loads(path.read_text())["report"]
        fails = _count(report, "fail")
        unknowns = _count(report, "unknown")
        assert (code == 0) == (report["status"] == "pass")
        if code == 1:
            assert fails > 0
        if code == 2:
            assert fails == 0 and unknowns > 0


def _count(report, status):
    return report["counts"][status] + sum(_count(p, status) for p in report.get("parts", {}).values())


def test_inconclusive_exit_code(tmp_path):
    ws = tmp_path / "u.pi"
    ws.write_text(
        "institution C = builtin cpc;\n"
        "spec S = flat C { q };\n"
        "morphism m : C -> C = { p |-> q; };\n"
        "spec D = derive S through m;\n"
        "spec R = flat C { r };\n"
        "spec U = union D R;\n"
    )
    code, out, err = invoke("eval", "U", "p /\\ r", "--workspace", str(ws))
    assert code == 2, err
    assert "UNKNOWN" in out


def test_shipped_workspace_loads():
    from pirefine.cli.workspace import load_workspace, standard_workspace_path

    ws = load_workspace(standard_workspace_path())
    assert {"CPC", "K", "S5G", "BA"} <= set(ws.institutions)
    assert {"cpc2ba", "collapse", "idCPC"} <= set(ws.translations)
