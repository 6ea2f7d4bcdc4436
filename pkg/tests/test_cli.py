import json
import math
import os

import pytest

from arfs_lab.cli import ScenarioConfig, load_config, main, run_experiment
from arfs_lab.errors import ConfigInvalid
from arfs_lab.reporting import Report, emit_report

AXES_FAMILY = {
    "dim": 2,
    "norm": "l2",
    "members": [
        {"label": "e1", "basis": [[1.0, 0.0]]},
        {"label": "e2", "basis": [[0.0, 1.0]]},
    ],
}


def write_config(path, scenarios):
    path.write_text(json.dumps({"scenarios": scenarios}))
    return str(path)


class TestConfigValidation:
    def test_empty_scenario_list(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", [])
        assert load_config(cfg) == []
        rc = main(["run", "--config", cfg, "--out", str(tmp_path / "out")])
        assert rc == 0
        data = json.loads((tmp_path / "out" / "reports.json").read_text())
        assert data == {"reports": []}

    def test_unknown_kind_rejected(self, tmp_path):
        cfg = write_config(
            tmp_path / "c.json",
            [{"kind": "nope", "params": {}, "seed": 0, "tolerances": {}}],
        )
        with pytest.raises(ConfigInvalid):
            load_config(cfg)
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_missing_field_rejected(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", [{"kind": "golitschek"}])
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_nonpositive_tolerance_rejected(self, tmp_path):
        cfg = write_config(
            tmp_path / "c.json",
            [{"kind": "golitschek", "params": {"alpha": 1.0, "exponents": [2.0]},
              "seed": 0, "tolerances": {"tol": 0.0}}],
        )
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


class TestScenarios:
    def test_golitschek_scenario(self, tmp_path):
        cfg = ScenarioConfig(
            "golitschek", {"alpha": 1.0, "exponents": [2.0]}, 0, {"tol": 1e-6}
        )
        reports = run_experiment(cfg, str(tmp_path), index=0)
        assert len(reports) == 1 and reports[0].passed
        assert reports[0].witness["bound"] == pytest.approx(0.5)
        assert reports[0].witness["certified_error_upper"] == pytest.approx(
            0.25, abs=1e-4
        )
        assert (tmp_path / "scenario_000_golitschek.json").exists()

    def test_decay_scenario_anchor(self, tmp_path):
        cfg = ScenarioConfig(
            "decay", {"delta": 1.0, "M": 1.0, "n_random": 5}, 3, {}
        )
        reports = run_experiment(cfg, str(tmp_path), index=0)
        assert all(r.passed for r in reports)
        rows = json.loads((tmp_path / "scenario_000_decay.json").read_text())
        assert rows["reports"][0]["check"] == "decay-constants-identity"
        csv_text = (tmp_path / "scenario_000_decay.csv").read_text()
        header, first = csv_text.splitlines()[:2]
        c_col = header.split(",").index("c")
        assert float(first.split(",")[c_col]) == pytest.approx(
            math.exp(7.0) * 2.0**10.5, rel=1e-9
        )

    def test_pt_family_scenario_rows(self, tmp_path):
        cfg = ScenarioConfig(
            "pt-family",
            {"families": [[1.0], [1.0, 2.0]], "delta": 1.0, "M": 1.5,
             "t_grid": [11.5, 13.0]},
            0,
            {"tol": 1e-4},
        )
        reports = run_experiment(cfg, str(tmp_path), index=2)
        assert reports[0].passed
        lines = (tmp_path / "scenario_002_pt-family.csv").read_text().splitlines()
        assert len(lines) == 3  # header + one row per time

    def test_stability_and_decomposition_and_criterion(self, tmp_path):
        scenarios = [
            {"kind": "arfs-criterion", "params": {"family": AXES_FAMILY},
             "seed": 0, "tolerances": {}},
            {"kind": "stability",
             "params": {"family": AXES_FAMILY, "r_fractions": [0.2]},
             "seed": 5, "tolerances": {}},
            {"kind": "decomposition",
             "params": {"family": AXES_FAMILY, "x": [1.0, 1.0], "samples": 100},
             "seed": 1, "tolerances": {}},
        ]
        cfg = write_config(tmp_path / "c.json", scenarios)
        rc = main(["run", "--config", cfg, "--out", str(tmp_path / "out")])
        assert rc == 0
        data = json.loads((tmp_path / "out" / "reports.json").read_text())
        checks = [r["check"] for r in data["reports"]]
        assert "arfs-criterion-constant" in checks
        assert any(c.startswith("stability-r=") for c in checks)
        assert "decomposition-duality" in checks

    def test_failing_margin_gives_exit_one(self, tmp_path):
        # drive the oracle-agreement tolerance below float rounding
        cfg = write_config(
            tmp_path / "c.json",
            [{"kind": "muntz-distance",
              "params": {"gamma_grid": [0.5, 1.7], "gammas": [1.3, 2.7, 5.1]},
              "seed": 0, "tolerances": {"rel": 1e-18}}],
        )
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "out")]) == 1


class TestDeterminism:
    def test_byte_identical_reruns(self, tmp_path):
        scenarios = [
            {"kind": "golitschek", "params": {"alpha": 1.0, "exponents": [2.0, 4.0]},
             "seed": 0, "tolerances": {}},
            {"kind": "decay",
             "params": {"delta_grid": [0.5, 1.0], "M_grid": [1.0, 2.0], "n_random": 4},
             "seed": 9, "tolerances": {}},
        ]
        cfg = write_config(tmp_path / "c.json", scenarios)
        for out in ("a", "b"):
            assert main(["run", "--config", cfg, "--out", str(tmp_path / out)]) == 0
        for name in os.listdir(tmp_path / "a"):
            assert (tmp_path / "a" / name).read_bytes() == (
                tmp_path / "b" / name
            ).read_bytes()

    def test_seed_override_and_csv_format(self, tmp_path):
        scenarios = [
            {"kind": "stability",
             "params": {"family": AXES_FAMILY, "r_fractions": [0.3]},
             "seed": 5, "tolerances": {}},
        ]
        cfg = write_config(tmp_path / "c.json", scenarios)
        rc = main(["run", "--config", cfg, "--out", str(tmp_path / "out"),
                   "--seed", "99", "--format", "csv"])
        assert rc == 0
        assert (tmp_path / "out" / "reports.csv").exists()
        header = (tmp_path / "out" / "reports.csv").read_text().splitlines()[0]
        assert header == "check,margin,pass,witness"

    def test_thread_pool_preserves_output(self, tmp_path, monkeypatch):
        scenarios = [
            {"kind": "golitschek", "params": {"alpha": 1.0, "exponents": [2.0]},
             "seed": 0, "tolerances": {}},
            {"kind": "decay", "params": {"delta": 1.0, "M": 1.0, "n_random": 3},
             "seed": 2, "tolerances": {}},
            {"kind": "arfs-criterion", "params": {"family": AXES_FAMILY},
             "seed": 0, "tolerances": {}},
            # two scenarios on the high-precision oracle exercise its lock
            {"kind": "muntz-distance",
             "params": {"gamma_grid": [0.5, 2.5], "gammas": [1.0, 4.0]},
             "seed": 0, "tolerances": {}},
            {"kind": "muntz-distance",
             "params": {"gamma_grid": [1.2, 3.3], "gammas": [0.7, 2.1, 6.0]},
             "seed": 0, "tolerances": {}},
        ]
        cfg = write_config(tmp_path / "c.json", scenarios)
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "seq")]) == 0
        monkeypatch.setenv("ARFS_LAB_THREADS", "4")
        assert main(["run", "--config", cfg, "--out", str(tmp_path / "par")]) == 0
        assert (tmp_path / "seq" / "reports.json").read_bytes() == (
            tmp_path / "par" / "reports.json"
        ).read_bytes()


class TestEmitReport:
    def test_json_shape_and_stability(self, tmp_path):
        reports = [Report("demo", True, 0.5, {"value": 1.0 / 3.0})]
        p1, p2 = tmp_path / "r1.json", tmp_path / "r2.json"
        emit_report(reports, "json", str(p1))
        emit_report(reports, "json", str(p2))
        assert p1.read_bytes() == p2.read_bytes()
        data = json.loads(p1.read_text())
        assert data["reports"][0] == {
            "check": "demo", "pass": True, "margin": 0.5,
            "witness": {"value": 0.333333333333},
        }

    def test_csv_rows(self, tmp_path):
        rows = [{"x": 1.0, "y": 2.0}, {"x": 3.0, "y": 4.0}]
        out = tmp_path / "rows.csv"
        emit_report(rows, "csv", str(out))
        lines = out.read_text().splitlines()
        assert lines[0] == "x,y"
        assert len(lines) == 3

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            emit_report([], "yaml", str(tmp_path / "x"))
