import json

import pytest

from kzd import cli


BASE = {
    "schema_version": 1,
    "command": "flatness",
    "algebra": {"mode": "free", "gram": [["2"]]},
    "weights": {"lam_alpha": [["-3/5"], ["-3/5"]],
                "lam_lam": [["1", "1/2"], ["1/2", "1"]]},
    "lambda": [1],
    "n": 2,
    "z": ["0", "1"],
    "mu": {"alpha": ["1"], "lam": ["1/3", "-1/5"]},
    "kappa": "1",
    "numeric": {"seed": 7},
}


def _doc(**over):
    doc = json.loads(json.dumps(BASE))
    doc.update(over)
    return doc


def test_flatness_pass():
    report, code = cli.run(_doc())
    assert code == cli.EXIT_OK
    assert report["status"] == "pass"
    for check in report["checks"]:
        assert check["exact_zero"] is True
        assert check["max_abs_residual"] == "0/1"


def test_residuals_pass():
    doc = _doc(command="residuals",
               mu_dirs=[{"alpha": ["1/2"], "lam": ["1/4", "-1/2"]},
                        {"alpha": ["1/4"], "lam": ["1/3", "1/5"]}])
    report, code = cli.run(doc)
    assert code == cli.EXIT_OK
    assert all(c["value"] < 1e-6 for c in report["checks"])


def test_verify_operators_pass():
    report, code = cli.run(_doc(command="verify-operators"))
    assert code == cli.EXIT_OK


def test_os_check_pass():
    report, code = cli.run(_doc(command="os-check", **{"lambda": [2]}))
    assert code == cli.EXIT_OK


def test_malformed_gram_field_path():
    doc = _doc(algebra={"mode": "free", "gram": [["2", "1"], ["0", "2"]]},
               weights={"lam_alpha": [["1", "0"], ["1", "0"]],
                        "lam_lam": [["1", "0"], ["0", "1"]]})
    doc["lambda"] = [1, 0]
    with pytest.raises(cli.ConfigError) as err:
        cli.run(doc)
    assert "algebra/gram" in str(err.value)


def test_schema_rejects_bad_rational():
    doc = _doc()
    doc["kappa"] = "1.5"
    with pytest.raises(cli.ConfigError) as err:
        cli.run(doc)
    assert "kappa" in str(err.value)


def test_exit_codes(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(_doc()))
    assert cli.main(["flatness", "--config", str(cfg),
                     "--out", str(tmp_path / "o.json")]) == 0
    # resonance: mu pairing zero on a contributing root
    bad = _doc(mu={"alpha": ["0"], "lam": ["1", "1"]})
    cfg.write_text(json.dumps(bad))
    assert cli.main(["flatness", "--config", str(cfg)]) == cli.EXIT_SINGULAR
    # schema failure
    cfg.write_text("{\"schema_version\": 1}")
    assert cli.main(["flatness", "--config", str(cfg)]) == cli.EXIT_SCHEMA
    cfg.write_text("not json")
    assert cli.main(["flatness", "--config", str(cfg)]) == cli.EXIT_SCHEMA


def test_emit_round_trip():
    report, _ = cli.run(_doc())
    text = cli.emit(report, "json")
    assert json.loads(text) == report
    empty = {"schema_version": 1, "tool_version": "x", "command": "flatness",
             "status": "pass", "checks": [], "timing_s": 0.0}
    assert json.loads(cli.emit(empty, "json")) == empty
    human = cli.emit(report, "text")
    assert "flatness: pass" in human


def test_rationals_serialized_exactly():
    report, _ = cli.run(_doc())
    for check in report["checks"]:
        assert check["max_abs_residual"] == "0/1"


def test_determinism():
    doc = _doc(command="solve")
    r1, _ = cli.run(doc)
    r2, _ = cli.run(doc)
    r1.pop("timing_s")
    r2.pop("timing_s")
    assert json.dumps(r1, sort_keys=True) == json.dumps(r2, sort_keys=True)


def test_parallel_values_match_serial():
    doc = _doc(command="solve")
    doc["numeric"] = {"seed": 7, "threads": 1}
    r1, _ = cli.run(doc)
    doc["numeric"] = {"seed": 7, "threads": 4}
    r2, _ = cli.run(doc)
    assert r1["matrix"] == r2["matrix"]


def test_symmetrize_check_command():
    doc = _doc(command="symmetrize-check", z=["0", "3/10"])
    doc["lambda"] = [2]
    doc["numeric"] = {"seed": 7, "tol": 1e-8}
    report, code = cli.run(doc)
    assert code == cli.EXIT_OK
