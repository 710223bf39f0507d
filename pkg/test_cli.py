#!/usr/bin/env python3
"""
Test the command-line front end end to end
"""

import io
import json
import math
import sys

import pandas as pd
import pytest
from scipy.spatial import QhullError

import cli
from berwald import DivergentIntegralError
from cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, UsageError, main, parse_p_grid
from numerics import QuadratureError


def read_csv(text):
    return pd.read_csv(io.StringIO(text))


def key_values(text):
    pairs = (line.split(":", 1) for line in text.strip().splitlines())
    return {key.strip(): float(value) for key, value in pairs}


def test_parse_p_grid():
    assert parse_p_grid("0:4:5") == [0.0, 1.0, 2.0, 3.0, 4.0]
    assert parse_p_grid("-0.5, 1,2") == [-0.5, 1.0, 2.0]
    for bad in ("-1.5:2:4", "1:2", "0:1:1", "", "-1"):
        with pytest.raises(UsageError):
            parse_p_grid(bad)


def test_sweep_phi_linear(capsys):
    assert main(["sweep", "phi", "--gamma", "linear:2", "--p", "0:4:5"]) == EXIT_OK
    table = read_csv(capsys.readouterr().out)
    assert list(table.columns) == ["p", "value", "status"]
    assert table["value"].tolist() == pytest.approx([2.0] * 5, rel=1e-7)
    assert set(table["status"]) == {"ok"}


def test_sweep_phi_power_is_non_increasing(capsys):
    assert main(["sweep", "phi", "--gamma", "power:0.5", "--p", "-0.9:4:25"]) == EXIT_OK
    values = read_csv(capsys.readouterr().out)["value"].tolist()
    assert len(values) == 25
    assert all(b <= a * (1.0 + 1e-9) for a, b in zip(values, values[1:]))


def test_sweep_berwald_interval(capsys):
    argv = ["sweep", "berwald", "--f", "indicator:interval01", "--h", "affine:x",
            "--p", "-0.5,1,2"]
    assert main(argv) == EXIT_OK
    table = read_csv(capsys.readouterr().out)
    assert table["value"].tolist() == pytest.approx([0.785398, 0.5, 0.408248], rel=1e-5)


def test_sweep_classical_equality_case(capsys):
    argv = ["sweep", "classical", "--body", "interval01", "--phi", "affine:-1,1", "--p", "1,2"]
    assert main(argv) == EXIT_OK
    table = read_csv(capsys.readouterr().out)
    assert table["value"].tolist() == pytest.approx([1.0, 1.0], rel=1e-7)


def test_sweep_statuses(capsys, monkeypatch):
    def flaky(gamma, p, spec=None):
        if p < 0:
            raise DivergentIntegralError(p, math.inf, "diverges")
        if p > 1:
            raise QuadratureError("no convergence", 1.0, 1.0)
        return 1.0

    monkeypatch.setattr(cli, "phi_gamma", flaky)
    assert main(["sweep", "phi", "--gamma", "linear:1", "--p", "-0.5,1,2"]) == EXIT_OK
    table = read_csv(capsys.readouterr().out)
    assert table["status"].tolist() == ["diverged", "ok", "quadrature_failed"]


def test_sweep_classical_rejects_non_positive_p(capsys):
    argv = ["sweep", "holder", "--body", "interval01", "--phi", "affine:1,0", "--p", "0,1"]
    assert main(argv) == EXIT_USAGE
    assert "p > 0" in capsys.readouterr().err


def test_body_summary(capsys):
    assert main(["body", "--shape", "square"]) == EXIT_OK
    values = key_values(capsys.readouterr().out)
    assert values["volume"] == pytest.approx(4.0)
    assert values["polar_projection_volume"] == pytest.approx(0.5, rel=1e-4)
    assert values["product"] == pytest.approx(2.0, rel=1e-4)
    assert values["lower_bound"] == pytest.approx(1.5)
    assert values["upper_bound"] == pytest.approx(math.pi ** 2 / 4.0)


def test_body_single_quantities(capsys, tmp_path):
    assert main(["body", "--shape", "simplex2", "--compute", "zhang-product"]) == EXIT_OK
    assert float(capsys.readouterr().out) == pytest.approx(1.5, rel=1e-3)
    assert main(["body", "--shape", "disk", "--compute", "polar-volume", "--grid", "90"]) == EXIT_OK
    assert float(capsys.readouterr().out) == pytest.approx(math.pi / 4.0, rel=1e-9)

    radial = tmp_path / "radial.csv"
    assert main(["body", "--shape", "cube", "--grid", "200", "--radial-out", str(radial)]) == EXIT_OK
    capsys.readouterr()
    table = pd.read_csv(radial)
    assert list(table.columns) == ["theta_or_index", "u1", "u2", "u3", "rho"]
    assert len(table) == 200


def test_body_file(capsys, tmp_path):
    path = tmp_path / "rectangle.ini"
    path.write_text("[body]\nkind = hpolytope\ndim = 2\nconstraints =\n"
                    "    1 0 / 2\n    -1 0 / 2\n    0 1 / 1\n    0 -1 / 1\n", encoding="utf-8")
    assert main(["body", "--body-file", str(path), "--compute", "volume"]) == EXIT_OK
    assert float(capsys.readouterr().out) == pytest.approx(8.0)


def test_degenerate_body_file_is_a_usage_error(capsys, monkeypatch, tmp_path):
    def degenerate(path):
        raise QhullError("QH6154 initial simplex is flat")

    monkeypatch.setattr(cli, "load_body_file", degenerate)
    path = tmp_path / "flat.ini"
    path.write_text("[body]\n", encoding="utf-8")
    assert main(["body", "--body-file", str(path)]) == EXIT_USAGE
    assert "initial simplex is flat" in capsys.readouterr().err


def test_fn_quantities(capsys):
    assert main(["fn", "--f", "expnorm:square", "--compute", "l1"]) == EXIT_OK
    assert float(capsys.readouterr().out) == pytest.approx(8.0, rel=1e-8)
    assert main(["fn", "--f", "indicator:square", "--compute", "zhang-ratio", "--grid", "360"]) == EXIT_OK
    assert float(capsys.readouterr().out) == pytest.approx(0.25, rel=1e-3)


def test_covariogram_grid(capsys):
    assert main(["covariogram", "--f", "indicator:interval01", "--grid", "5"]) == EXIT_OK
    table = read_csv(capsys.readouterr().out)
    assert list(table.columns) == ["x1", "g_f"]
    assert table["x1"].tolist() == pytest.approx([-1.0, -0.5, 0.0, 0.5, 1.0])
    assert table["g_f"].tolist() == pytest.approx([0.0, 0.5, 1.0, 0.5, 0.0], abs=1e-9)


def test_verify_writes_json(tmp_path):
    out = tmp_path / "report.json"
    argv = ["verify", "--suite", "lemma21", "--presets", "power:0.5", "--out", str(out)]
    assert main(argv) == EXIT_OK
    records = json.loads(out.read_text(encoding="utf-8"))
    assert len(records) == 1
    assert records[0]["name"] == "lemma21:power:0.5"
    assert records[0]["status"] == "pass"
    assert set(records[0]) == {"name", "status", "lhs", "rhs", "margin", "tolerance",
                               "runtime_ms", "details"}


def test_verify_with_no_matching_cases(capsys):
    assert main(["verify", "--presets", "none"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out) == []


def test_verify_csv_format(capsys):
    assert main(["verify", "--suite", "lemma21", "--format", "csv"]) == EXIT_OK
    table = read_csv(capsys.readouterr().out)
    assert len(table) == 3
    assert set(table["status"]) == {"pass"}


def test_verify_tight_tolerance_fails(capsys):
    argv = ["verify", "--suite", "zhang", "--presets", "simplex2", "--grid", "360",
            "--mc-samples", "20000", "--tol", "1e-12"]
    assert main(argv) == EXIT_FAILED
    assert "FAIL" in capsys.readouterr().err


def test_verify_reads_config(tmp_path, capsys):
    path = tmp_path / "suite.ini"
    path.write_text("[suite]\nsuites = zhang\ngrid_size = 180\npresets = kite\n\n"
                    "[body.kite]\nkind = vpolytope\ndim = 2\nvertices =\n"
                    "    -1 0\n    0 -0.5\n    1 0\n    0 2\n", encoding="utf-8")
    assert main(["verify", "--config", str(path)]) == EXIT_OK
    records = json.loads(capsys.readouterr().out)
    assert [record["name"] for record in records] == ["zhang_petty_body:kite"]


def test_usage_errors(capsys, monkeypatch):
    assert main([]) == EXIT_USAGE
    assert main(["body", "--shape", "dodecahedron"]) == EXIT_USAGE
    assert main(["sweep", "phi", "--gamma", "power:0.5", "--p", "-1.5:2:4"]) == EXIT_USAGE
    assert main(["sweep", "phi", "--p", "1,2"]) == EXIT_USAGE
    assert main(["covariogram", "--f", "gaussian:1", "--grid", "2"]) == EXIT_USAGE
    assert main(["verify", "--suite", "nonsense"]) == EXIT_USAGE
    monkeypatch.setenv("LCG_SEED", "abc")
    assert main(["verify", "--presets", "none"]) == EXIT_USAGE
    assert "LCG_SEED" in capsys.readouterr().err


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("LCG_SEED", "7")
    assert main(["verify", "--suite", "lemma21", "--presets", "linear:3"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)[0]["status"] == "pass"


if __name__ == "__main__":
    print("=== Testing the command line ===")
    sys.exit(pytest.main([__file__, "-q"]))
