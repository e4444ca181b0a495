import json
import math
from pathlib import Path

import numpy as np
import pytest

from beyondcp import PAULI_X, map_residual, operator
from beyondcp.catalog import depolarizer_kraus, gibbs_subspace, repolarizer
from beyondcp.cli import run_cli
from beyondcp.maps import map_from_kraus
from beyondcp.serialization import (
    emit_map,
    emit_operator,
    emit_subspace,
    inputs_digest,
    parse_map,
    parse_operator,
    parse_subspace,
    validate_document,
)

REPO_ROOT = Path(__file__).resolve().parents[1]


# ---------------------------------------------------------------------------
# codecs
# ---------------------------------------------------------------------------


def test_operator_roundtrip_pauli_x():
    doc = {"dims": [2], "matrix": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]}
    op = parse_operator(doc)
    assert np.allclose(op.entries, PAULI_X.entries)
    again = parse_operator(emit_operator(op))
    assert np.array_equal(again.entries, op.entries)


def test_operator_roundtrip_preserves_bits(rng):
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    op = operator(m, (2, 2), labels=("system", "bath"))
    doc = emit_operator(op)
    text = json.dumps(doc)
    again = parse_operator(json.loads(text))
    assert np.array_equal(again.entries, op.entries)
    assert again.layout.labels == ("system", "bath")


def test_operator_schema_violation_reports_pointer():
    with pytest.raises(ValueError, match="/dims"):
        parse_operator({"dims": [0], "matrix": [[[0, 0]]]})
    with pytest.raises(ValueError, match="matrix"):
        parse_operator({"dims": [2]})


def test_operator_dimension_mismatch():
    with pytest.raises(ValueError, match="/matrix"):
        parse_operator({"dims": [2], "matrix": [[[0, 0]]]})


def test_subspace_roundtrip():
    v = gibbs_subspace()
    doc = emit_subspace(v)
    again = parse_subspace(doc)
    assert again.dim == v.dim
    for b in v.basis:
        assert again.contains(b)


def test_subspace_from_generators_only():
    doc = {
        "dims": [2],
        "generators": [
            [[[1, 0], [0, 0]], [[0, 0], [1, 0]]],
            [[[0, 0], [1, 0]], [[1, 0], [0, 0]]],
        ],
    }
    v = parse_subspace(doc)
    assert v.dim == 2


def test_map_builtin_parse():
    phi = parse_map({"kind": "builtin", "name": "repolarizer", "epsilon": 0.1})
    assert map_residual(phi, repolarizer(0.1)) <= 1e-12
    alias = parse_map({"kind": "builtin", "name": "example1", "t": 0.5})
    from beyondcp.catalog import controlled_phase_map

    assert map_residual(alias, controlled_phase_map(0.5)) <= 1e-12


def test_map_builtin_requires_params():
    with pytest.raises(ValueError, match="epsilon"):
        parse_map({"kind": "builtin", "name": "repolarizer"})


def test_map_kraus_roundtrip():
    doc = {
        "kind": "kraus",
        "dims": [2],
        "operators": [emit_operator(k)["matrix"] for k in depolarizer_kraus(0.2)],
    }
    phi = parse_map(doc)
    assert map_residual(phi, map_from_kraus(depolarizer_kraus(0.2))) <= 1e-12


def test_map_matrix_roundtrip():
    phi = repolarizer(0.3)
    again = parse_map(emit_map(phi))
    assert map_residual(again, phi) <= 1e-12
    assert np.array_equal(again.coord_matrix, phi.coord_matrix)


def test_map_schema_rejects_unknown_kind():
    with pytest.raises(ValueError):
        parse_map({"kind": "mystery"})


def test_report_roundtrips_bit_exactly():
    from beyondcp.config import DEFAULT_TOL
    from beyondcp.serialization import Report, emit_report, parse_report

    report = Report("demo", inputs_digest({"x": 1}), 7, DEFAULT_TOL)
    report.add("alpha", True, 1.2345678901234567e-12, note="fine", count=3)
    report.add("beta", False, float("inf"), ratios=[1.0, 10.0])
    doc = emit_report(report)
    text = json.dumps(doc)
    assert parse_report(json.loads(text)) == doc
    assert json.dumps(json.loads(text)) == text


def test_inputs_digest_is_stable():
    a = inputs_digest({"b": 1, "a": [2, 3]})
    b = inputs_digest({"a": [2, 3], "b": 1})
    assert a == b
    assert len(a) == 64


def test_shipped_schemas_match_package_schemas():
    for name in ("operator", "subspace", "map", "report"):
        shipped = json.loads((REPO_ROOT / "schemas" / f"{name}.json").read_text())
        from beyondcp.serialization import load_schema

        assert shipped == load_schema(name)


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def _run(capsys, argv):
    code = run_cli(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip().startswith("{") else out


def test_cli_catalog_example1_passes(capsys):
    code, doc = _run(
        capsys, ["catalog", "example1", "--t", "0.7853981633974483"]
    )
    assert code == 0
    validate_document(doc, "report")
    names = {v["name"] for v in doc["verdicts"]}
    assert "derived_map_matches_closed_form" in names
    assert "kraus_completeness" in names
    assert "map" in doc["artifacts"]


def test_cli_analyze_transpose_cp_exits_one(capsys, tmp_path):
    path = _write(tmp_path, "map.json", {"kind": "builtin", "name": "transpose"})
    code, doc = _run(capsys, ["analyze-map", "--map", path, "--cp"])
    assert code == 1
    cp = next(v for v in doc["verdicts"] if v["name"] == "completely_positive")
    assert not cp["passed"]
    assert math.isclose(cp["details"]["min_choi_eigenvalue"], -1.0, abs_tol=1e-9)


def test_cli_violations_demonstrates_ratios(capsys):
    code, doc = _run(
        capsys, ["violations", "--epsilon", "0.1", "--pairs", "5", "--seed", "7"]
    )
    assert code == 1
    contract = next(v for v in doc["verdicts"] if v["name"] == "trace_norm_contractivity")
    assert not contract["passed"]
    for ratio in contract["details"]["ratios"]:
        assert abs(ratio - 10.0) <= 1e-6
    uhlmann = next(
        v for v in doc["verdicts"] if v["name"] == "relative_entropy_monotonicity"
    )
    assert not uhlmann["passed"]
    for ratio in uhlmann["details"]["ratios"]:
        assert ratio >= 10.0 - 1e-6
    control = next(v for v in doc["verdicts"] if v["name"] == "cptp_control_contractive")
    assert control["passed"]


def test_cli_reports_are_deterministic(capsys):
    run_cli(["violations", "--epsilon", "0.1", "--pairs", "3", "--seed", "9"])
    first = capsys.readouterr().out
    run_cli(["violations", "--epsilon", "0.1", "--pairs", "3", "--seed", "9"])
    second = capsys.readouterr().out
    assert first == second


def test_cli_env_seed_overrides_flag(capsys, monkeypatch):
    monkeypatch.setenv("BEYONDCP_SEED", "123")
    code, doc = _run(capsys, ["violations", "--epsilon", "0.1", "--pairs", "2", "--seed", "9"])
    assert doc["seed"] == 123


def test_cli_check_consistency_and_derive_map(capsys, tmp_path):
    from beyondcp.catalog import controlled_phase_unitary
    from beyondcp.operators import swap_unitary

    sub = _write(tmp_path, "sub.json", emit_subspace(gibbs_subspace()))
    good_u = _write(tmp_path, "u.json", emit_operator(controlled_phase_unitary(0.9)))
    bad_u = _write(tmp_path, "swap.json", emit_operator(swap_unitary(2)))

    code, doc = _run(capsys, ["check-consistency", "--subspace", sub, "--unitary", good_u])
    assert code == 0
    assert all(v["passed"] for v in doc["verdicts"])

    code, doc = _run(capsys, ["check-consistency", "--subspace", sub, "--unitary", bad_u])
    assert code == 1

    code, doc = _run(capsys, ["derive-map", "--subspace", sub, "--unitary", good_u])
    assert code == 0
    parsed = parse_map(doc["artifacts"]["map"])
    from beyondcp.catalog import controlled_phase_map

    assert map_residual(parsed, controlled_phase_map(0.9)) <= 1e-9

    code, doc = _run(capsys, ["derive-map", "--subspace", sub, "--unitary", bad_u])
    assert code == 1
    assert "map" not in doc["artifacts"]


def test_cli_represent_swap_and_kraus(capsys, tmp_path):
    repo = _write(tmp_path, "repo.json", {"kind": "builtin", "name": "repolarizer", "epsilon": 0.1})
    code, doc = _run(capsys, ["represent", "--map", repo, "--method", "swap", "--seed", "3"])
    assert code == 0
    assert doc["artifacts"]["representation"]["bath_dim"] == 2

    kraus_doc = {
        "kind": "kraus",
        "dims": [2],
        "operators": [emit_operator(k)["matrix"] for k in depolarizer_kraus(0.1)],
    }
    kraus = _write(tmp_path, "kraus.json", kraus_doc)
    code, doc = _run(capsys, ["represent", "--map", kraus, "--method", "kraus"])
    assert code == 0
    assert doc["artifacts"]["representation"]["bath_dim"] == 4

    code, _ = _run(capsys, ["represent", "--map", repo, "--method", "kraus"])
    assert code == 2


def test_cli_input_errors_exit_two(capsys, tmp_path):
    bad = _write(tmp_path, "bad.json", {"kind": "builtin"})
    assert run_cli(["analyze-map", "--map", bad]) == 2
    capsys.readouterr()
    assert run_cli(["analyze-map", "--map", str(tmp_path / "missing.json")]) == 2
    capsys.readouterr()
    assert run_cli(["no-such-command"]) == 2
    capsys.readouterr()


def test_cli_csv_format(capsys):
    code = run_cli(["catalog", "witness", "--format", "csv"])
    out = capsys.readouterr().out
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "name,passed,residual,details"
    assert any("factorization_gap_matches_expected" in line for line in lines)


def test_cli_catalog_witness_variants(capsys):
    for kind, expected in (("bell", 0.75), ("classical", 0.5), ("product", 0.0)):
        code, doc = _run(capsys, ["catalog", "witness", "--bath-witness", kind])
        assert code == 0
        verdict = doc["verdicts"][0]
        assert math.isclose(verdict["details"]["mismatch"], expected, abs_tol=1e-10)


def test_cli_catalog_gibbs_and_transpose_and_repolarizer(capsys):
    for argv in (
        ["catalog", "gibbs", "--theta", "1.0", "--beta", "0.5"],
        ["catalog", "transpose"],
        ["catalog", "repolarizer", "--epsilon", "0.1"],
    ):
        code, doc = _run(capsys, argv)
        assert code == 0, argv
        assert all(v["passed"] for v in doc["verdicts"]), argv
