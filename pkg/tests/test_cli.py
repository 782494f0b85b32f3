import json
import re
from pathlib import Path

import pytest

from enhanced_zeta.cli import main


def run(args):
    return main(args)


def strip_timing(text: str) -> str:
    """Remove wall-clock fields before byte comparison."""
    text = re.sub(r'"timestamp": "[^"]*"', '"timestamp": null', text)
    text = re.sub(r'"runtime_s": [0-9.e+-]+', '"runtime_s": 0', text)
    return text


class TestBfunction:
    def test_pass_and_report(self, tmp_path, capsys):
        out = tmp_path / "bf.json"
        code = run(["bfunction", "--n", "2", "--d", "1", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["summary"]["all_passed"]
        kinds = {r["id"]: r for r in report["records"]}
        assert kinds["bfunction-2-1-first"]["params"]["kappa"] == "1"
        assert kinds["bfunction-2-1-second"]["params"]["kappa"] == "4"
        text = capsys.readouterr().out
        assert "[PASS]" in text

    def test_d_larger_than_n_is_config_error(self, capsys):
        code = run(["bfunction", "--n", "1", "--d", "2"])
        assert code == 2
        err = capsys.readouterr().err
        assert "vanishes identically" in err


class TestGammaCommand:
    def test_outputs_csv_and_figure(self, tmp_path):
        out = tmp_path / "gamma.json"
        code = run(["gamma", "--n", "2", "--d", "1", "--s2", "0.3",
                    "--grid-points", "21", "--out", str(out)])
        assert code == 0
        assert out.exists()
        csv_text = (tmp_path / "gamma.csv").read_text()
        assert csv_text.startswith("axis,")
        assert len(csv_text.splitlines()) == 22
        assert (tmp_path / "gamma.png").exists()

    def test_pole_annotation_not_fatal(self, tmp_path):
        out = tmp_path / "g.json"
        code = run(["gamma", "--n", "1", "--d", "1", "--s2", "0.0",
                    "--grid-lo", "-2", "--grid-hi", "0", "--grid-points", "9",
                    "--out", str(out)])
        assert code == 0
        rows = (tmp_path / "g.csv").read_text().splitlines()
        assert any(",True," in row for row in rows[1:])


class TestVerify:
    def test_orbits_quick(self, tmp_path):
        out = tmp_path / "orbits.json"
        code = run(["verify", "orbits", "--n", "2", "--d", "1",
                    "--profile", "quick", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        ids = [r["id"] for r in report["records"]]
        assert ids == sorted(ids)
        assert all(r["anchor"] == "open-orbit-classification" for r in report["records"])

    def test_missing_seed_for_mc_is_config_error(self):
        assert run(["verify", "gamma-const", "--n", "2", "--d", "1"]) == 2

    def test_invalid_dimensions(self):
        assert run(["verify", "orbits", "--n", "1", "--d", "2"]) == 2

    def test_failure_exit_code_with_impossible_tol(self, tmp_path):
        # an absurd tolerance forces a check failure, not a crash
        code = run(["verify", "clerc", "--n", "1", "--d", "1",
                    "--tol", "1e-300", "--profile", "quick"])
        assert code == 1

    def test_deterministic_reports(self, tmp_path):
        # identical config + seed: byte-identical report modulo timing fields
        out = tmp_path / "report.json"
        texts = []
        for _ in range(2):
            code = run(["verify", "gamma-const", "--n", "2", "--d", "1",
                        "--seed", "7", "--profile", "quick", "--out", str(out)])
            assert code == 0
            texts.append(strip_timing(out.read_text()))
        assert texts[0] == texts[1]

    def test_delta_residue_quick(self, tmp_path):
        out = tmp_path / "delta.json"
        code = run(["verify", "delta-residue", "--n", "1", "--d", "1",
                    "--profile", "quick", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["summary"]["n_records"] == 2


class TestConfigFile:
    def test_config_overrides_flags(self, tmp_path):
        cfg_file = tmp_path / "cfg.json"
        cfg_file.write_text(json.dumps({"n": 2, "d": 1, "profile": "quick"}))
        out = tmp_path / "r.json"
        code = run(["verify", "orbits", "--n", "3", "--d", "2",
                    "--config", str(cfg_file), "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["config"]["n"] == 2
        assert report["config"]["profile"] == "quick"

    def test_unknown_key_rejected(self, tmp_path):
        cfg_file = tmp_path / "cfg.json"
        cfg_file.write_text(json.dumps({"nn": 2}))
        assert run(["verify", "orbits", "--config", str(cfg_file)]) == 2

    def test_unreadable_config(self, tmp_path):
        assert run(["verify", "orbits", "--config", str(tmp_path / "nope.json")]) == 2


class TestReportSchema:
    def test_fields_present(self, tmp_path):
        out = tmp_path / "r.json"
        run(["verify", "orbits", "--n", "1", "--d", "1",
             "--profile", "quick", "--out", str(out)])
        report = json.loads(out.read_text())
        assert report["schema_version"] == 1
        env = report["environment"]
        for key in ("package_version", "seed", "samples", "profile", "timestamp"):
            assert key in env
        for rec in report["records"]:
            for key in ("id", "anchor", "params", "lhs", "rhs", "abs_error",
                        "rel_error", "stderr", "tol", "passed", "runtime_s"):
                assert key in rec
