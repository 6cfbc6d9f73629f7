from __future__ import annotations

import json

import pytest

from fuscomp.cli import run


def call(capsys, *args):
    code = run(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *args):
    code, out, err = call(capsys, *args)
    assert code == 0, err
    return json.loads(out)


def test_centrics_d8(capsys):
    rep = report(capsys, "centrics")
    assert rep["count"] == 4


def test_saturation(capsys):
    assert report(capsys, "saturation", "--group", "GL3_2")["saturated"]
    # the Sylow system of GL2(3) lives on the semidihedral group and is saturated
    assert report(capsys, "saturation", "--group", "GL2_3")["saturated"]


def test_product_and_decompose(capsys):
    rep = report(capsys, "product", "--H", "6", "--K", "6")
    assert len(rep["pairs"]) == 2
    rep = report(capsys, "decompose", "--group", "GL3_2", "--H", "50", "--K", "S")
    assert rep["holds"]


def test_mackey_basis_and_mul(capsys):
    rep = report(capsys, "mackey-basis", "--group", "C2", "--all")
    assert rep["biset_count"] == 5 and rep["holds"]
    rep = report(capsys, "mackey-mul", "--group", "C2")
    assert rep["holds"]


def test_burnside_and_gamma(capsys):
    rep = report(capsys, "burnside", "--group", "GL3_2", "--field", "q0")
    assert rep["unit"]
    assert report(capsys, "gamma", "--group", "GL3_2")["holds"]


def test_module_projectivity_vertex(capsys):
    rep = report(capsys, "module", "--group", "GL3_2", "--module", "example")
    assert [lv["dim"] for lv in rep["levels"]] == [2, 1]
    rep = report(capsys, "projectivity", "--group", "GL3_2", "--module", "example", "--family", "50")
    assert rep["projective"]
    code, out, _ = call(capsys, "projectivity", "--group", "GL3_2", "--module", "example")
    assert json.loads(out)["projective"] is False
    rep = report(capsys, "vertex", "--group", "GL3_2", "--module", "example")
    assert rep["vertex"]["id"] == 50


def test_green_example(capsys):
    rep = report(capsys, "green", "--example", "gl23")
    assert rep["passed"]
    code, out, _ = call(capsys, "green", "--example", "gl23-literal")
    assert code == 1 and json.loads(out)["failed_step"] == "saturation"


def test_verify_example_variants(capsys):
    assert report(capsys, "verify-example")["passed"]
    code, out, _ = call(capsys, "verify-example", "--idempotent", "literal")
    assert code == 1 and json.loads(out)["failed_step"] == "indecomposable"
    code, out, _ = call(capsys, "verify-example", "--idempotent", "corrupt")
    assert code == 1 and json.loads(out)["failed_step"] == "idempotent"


def test_verify_identities(capsys):
    rep = report(capsys, "verify-identities", "--suite", "properties-HXK")
    assert list(rep["items"]) == [f"({i})" for i in range(1, 8)]
    rep = report(capsys, "verify-identities", "--group", "GL3_2", "--suite", "transfer", "--module", "example")
    assert list(rep["items"]) == [f"({i})" for i in range(1, 12)]
    for suite in ("universal", "decomposition", "gamma", "nf-transfer", "workaround"):
        assert report(capsys, "verify-identities", "--group", "S4", "--suite", suite)["holds"]


def test_text_output(capsys):
    code, out, _ = call(capsys, "centrics", "--out", "text")
    assert code == 0 and "count: 4" in out


def test_usage_errors(capsys):
    code, _, err = call(capsys, "product", "--H", "1", "--K", "6")
    assert code == 2 and "centric" in err
    code, _, err = call(capsys, "product", "--H", "x", "--K", "6")
    assert code == 2
    code, _, err = call(capsys, "centrics", "--group", "NoSuchGroup")
    assert code == 2 and err.startswith("error [grp]")
    code, _, err = call(capsys, "green", "--group", "S4", "--H", "14", "--summand", "4")
    assert code == 2 and "error [green]" in err


def test_fusion_file(capsys, tmp_path):
    spec = {"abstract": {"S": "D8", "p": 2, "closure": "generate", "homs": [
        {"source": [[[1, 2], [3, 4]], [[1, 3], [2, 4]]], "images": [[[1, 3], [2, 4]], [[1, 4], [2, 3]]]}]}}
    path = tmp_path / "f.json"
    path.write_text(json.dumps(spec))
    assert report(capsys, "saturation", "--fusion", str(path))["saturated"]
    spec["abstract"]["closure"] = "check"
    path.write_text(json.dumps(spec))
    code, _, err = call(capsys, "saturation", "--fusion", str(path))
    assert code == 2 and "error [fusion]" in err and "lacks composite" in err


def test_group_bound_env(capsys, monkeypatch):
    monkeypatch.setenv("FUSCOMP_MAX_GROUP", "100")
    code, _, err = call(capsys, "centrics", "--group", "GL3_2")
    assert code == 2 and "FUSCOMP_MAX_GROUP" in err


@pytest.mark.parametrize("args", [
    ("centrics", "--group", "S4"),
    ("mackey-basis", "--group", "GL3_2", "--centric"),
    ("burnside", "--group", "GL3_2"),
    ("module", "--group", "GL3_2", "--module", "example-literal"),
])
def test_repeat_runs_identical(capsys, args):
    first = call(capsys, *args)
    second = call(capsys, *args)
    assert first == second
