import csv
import io
import json
from pathlib import Path

import pytest

import cmeis.genus
from cmeis.cli import main

SCHEMA_PATH = Path(__file__).resolve().parent.parent / "docs" / "coefficient-record-schema-v1.json"


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_coeffs_example_records(capsys):
    code, out, _ = _run(capsys, "coeffs", "--d1", "-3", "--d2", "-7", "--trace-max", "1")
    assert code == 0
    records = [json.loads(line) for line in out.splitlines()]
    assert len(records) == 4
    assert [r["x"] for r in records] == [-3, -1, 1, 3]
    assert [r["a_alpha"] for r in records] == [
        {"3": "4"},
        {"5": "4"},
        {"5": "4"},
        {"3": "4"},
    ]
    for r in records:
        # the coefficient map is four times the degree map, entrywise
        assert set(r["a_alpha"]) == set(r["deg_X"])
        for p, c in r["a_alpha"].items():
            assert int(c) == 4 * int(r["deg_X"][p])
        assert r["alpha"][0] == "1/2"


def test_coeffs_json_roundtrip_byte_identical(capsys):
    code, out, _ = _run(
        capsys, "coeffs", "--d1", "-3", "--d2", "-4", "--trace-max", "3",
        "--v1", "1.5", "--v2", "0.5",
    )
    assert code == 0
    for line in out.splitlines():
        assert json.dumps(json.loads(line), separators=(",", ":")) == line


def test_coeffs_csv_agrees_with_json(capsys):
    args = ("coeffs", "--d1", "-3", "--d2", "-7", "--trace-max", "2")
    code, json_out, _ = _run(capsys, *args)
    assert code == 0
    code, csv_out, _ = _run(capsys, *args, "--format", "csv")
    assert code == 0
    json_records = [json.loads(line) for line in json_out.splitlines()]
    reader = csv.DictReader(io.StringIO(csv_out))
    csv_records = list(reader)
    assert len(csv_records) == len(json_records)
    for jr, cr in zip(json_records, csv_records):
        assert int(cr["m"]) == jr["m"]
        assert int(cr["x"]) == jr["x"]
        assert [cr["alpha_u"], cr["alpha_v"]] == jr["alpha"]
        assert json.loads(cr["diff"]) == jr["diff"]
        assert json.loads(cr["a_alpha"]) == jr["a_alpha"]
        assert json.loads(cr["deg_X"]) == jr["deg_X"]
        assert cr["a_alpha_float"] == jr["a_alpha_float"]
        assert cr["nu"] == jr["nu"]


def test_coeffs_with_v_emits_constant_and_mixed(capsys):
    code, out, _ = _run(
        capsys, "coeffs", "--d1", "-3", "--d2", "-7", "--trace-max", "1",
        "--v1", "1", "--v2", "1",
    )
    assert code == 0
    records = [json.loads(line) for line in out.splitlines()]
    assert records[0]["m"] == 0 and records[0]["x"] == 0
    mixed = [r for r in records if r["m"] == 1 and abs(r["x"]) > 4]
    assert mixed, "expected mixed-signature records"
    assert all(r["a_alpha"] == {} and r["diff"] == [] for r in mixed)
    assert all(float(r["a_alpha_float"]) > 0 for r in mixed)


def test_output_is_deterministic(capsys):
    args = (
        "coeffs", "--d1", "-7", "--d2", "-8", "--trace-max", "3",
        "--v1", "1.25", "--v2", "2.5",
    )
    _, first, _ = _run(capsys, *args)
    _, second, _ = _run(capsys, *args)
    assert first == second


def test_records_validate_against_published_schema(capsys):
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads(SCHEMA_PATH.read_text())
    validator = jsonschema.Draft202012Validator(schema)
    code, out, _ = _run(
        capsys, "coeffs", "--d1", "-7", "--d2", "-8", "--trace-max", "2",
        "--v1", "2", "--v2", "0.5",
    )
    assert code == 0
    for line in out.splitlines():
        validator.validate(json.loads(line))


def test_trace_max_zero_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["coeffs", "--d1", "-3", "--d2", "-7", "--trace-max", "0"])
    assert exc.value.code == 2


def test_bad_setup_is_exit_2(capsys):
    code, _, err = _run(capsys, "degree", "--d1", "-9", "--d2", "-7", "--m", "1")
    assert code == 2
    assert "setup error" in err


def test_mismatched_v_flags(capsys):
    code, _, err = _run(
        capsys, "coeffs", "--d1", "-3", "--d2", "-7", "--trace-max", "1", "--v1", "1"
    )
    assert code == 2


def test_degree_command(capsys):
    code, out, _ = _run(capsys, "degree", "--d1", "-3", "--d2", "-7", "--m", "1")
    assert code == 0
    obj = json.loads(out)
    assert obj["deg_T"] == {"3": "2", "5": "2"}
    assert obj["deg_T_float"].startswith("5.41610040220442")
    code, out, _ = _run(capsys, "degree", "--d1", "-3", "--d2", "-4", "--m", "1")
    obj = json.loads(out)
    assert obj["deg_T"] == {"2": "2", "3": "1"}
    assert obj["deg_T_float"].startswith("2.4849066497880")


def test_singular_moduli_command(capsys):
    code, out, _ = _run(capsys, "singular-moduli", "--d1", "-3", "--d2", "-7")
    assert code == 0
    obj = json.loads(out)
    assert obj["resultant_abs"] == "3375"
    assert obj["resultant_factorization"] == {"3": "3", "5": "3"}
    assert obj["degree_side"] == obj["resultant_side"] == {"3": "2", "5": "2"}
    assert obj["pass"] is True


def test_verify_suite_passes(capsys):
    code, out, err = _run(capsys, "verify", "--suite", "oracle", "--seed", "42")
    assert code == 0
    assert err == ""
    assert all(line.startswith("ok oracle.") for line in out.splitlines())


def test_verify_reports_injected_fault(capsys, monkeypatch):
    # break one exact count and expect the named invariant on stderr
    original = cmeis.genus.norm_ideal_count

    def corrupted(setup, ideal):
        value = original(setup, ideal)
        return value + 1 if ideal.is_unit_ideal else value

    monkeypatch.setattr(cmeis.genus, "norm_ideal_count", corrupted)
    code, out, err = _run(capsys, "verify", "--suite", "genus", "--seed", "42")
    assert code == 1
    failures = [json.loads(line) for line in err.splitlines()]
    assert any(f["invariant"] == "zeta-convolution" for f in failures)
