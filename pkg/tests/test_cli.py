"""Command-line interface: exit codes, JSON reports, determinism.

Exit code contract: 0 success, 1 mathematical failure, 2 input error.
JSON reports are sorted and schema-versioned, so two runs with the same
configuration must produce byte-identical files.
"""

import json

import pytest

from ophh.cli import main
from ophh.defs import serialize_operad


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_builtin_ok(capsys):
    code, out, _ = run(capsys, "validate", "--builtin", "assoc", "--cap", "5")
    assert code == 0
    assert "PASS" in out


def test_validate_json_payload(capsys):
    code, out, _ = run(capsys, "validate", "--builtin", "frobenius:dual1",
                       "--cap", "4", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == 1
    assert doc["report"]["passed"] is True


def test_unknown_builtin_is_input_error(capsys):
    code, _, err = run(capsys, "validate", "--builtin", "nope", "--cap", "3")
    assert code == 2
    assert "unknown built-in" in err


def test_malformed_file_is_input_error(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{ definitely not json")
    code, _, err = run(capsys, "validate", str(path))
    assert code == 2
    assert "error" in err


def test_axiom_failure_is_math_error(tmp_path, dual4, capsys):
    doc = json.loads(serialize_operad(dual4))
    # corrupt one coefficient of the arity-2 cyclic action
    r, c, coeff = doc["tau"]["2"][0]
    doc["tau"]["2"][0] = [r, c, "-7" if coeff != "-7" else "5"]
    path = tmp_path / "corrupt.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "validate", str(path), "--cap", "4")
    assert code == 1
    assert "FAIL" in out


def test_eval_expression(capsys):
    code, out, _ = run(capsys, "eval", "del(a1)", "--builtin", "assoc", "--cap", "4",
                       "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["arity"] == 2


def test_eval_bad_expression_is_input_error(capsys):
    code, _, err = run(capsys, "eval", "bullet(a1,", "--builtin", "assoc", "--cap", "4")
    assert code == 2


def test_eval_truncation_is_math_error(capsys):
    code, _, err = run(capsys, "eval", "o_1(a4, a4)", "--builtin", "assoc", "--cap", "4")
    assert code == 1
    assert "sizing" in err


def test_stdin_input(tmp_path, dual4, capsys, monkeypatch):
    import io
    import sys

    text = serialize_operad(dual4)
    monkeypatch.setattr(sys, "stdin", io.StringIO(text))
    code, out, _ = run(capsys, "validate", "-", "--cap", "4")
    assert code == 0


def test_homology_reports_expected_table(capsys):
    code, out, _ = run(capsys, "homology", "--builtin", "assoc", "--cap", "6",
                       "--ring", "Z", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["entries"] == {"0,0": {"betti": 1, "torsion": []}}


def test_homology_reps_are_cycles(capsys):
    code, out, _ = run(capsys, "homology", "--builtin", "frobenius:dual1",
                       "--cap", "4", "--reps", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert all("representatives" in v for v in doc["entries"].values())


def test_json_reports_are_deterministic(tmp_path, capsys):
    outputs = []
    for i in range(2):
        path = tmp_path / f"report{i}.json"
        code = main(["bvcheck", "--builtin", "frobenius:dual1", "--cap", "4",
                     "--samples", "25", "--seed", "42", "--format", "json",
                     "--output", str(path)])
        capsys.readouterr()
        assert code == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]

    outputs = []
    for i in range(2):
        path = tmp_path / f"hom{i}.json"
        code = main(["homology", "--builtin", "frobenius:dual1", "--cap", "4",
                     "--reps", "--format", "json", "--output", str(path)])
        capsys.readouterr()
        assert code == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
