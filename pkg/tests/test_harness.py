import json
import subprocess
import sys

import pytest

from atlas_sensing.harness.cli import main as cli_main
from atlas_sensing.harness.config import ConfigError, ExperimentSpec, fnv1a64
from atlas_sensing.harness.runner import (
    SUMMARY_HEADER,
    TRIALS_HEADER,
    run_experiment,
    run_trial,
)


def tiny_noise_spec(**overrides):
    data = {
        "kind": "noise_sweep",
        "n1": 6,
        "n2": 20,
        "R": 1,
        "s": 4,
        "m": 40,
        "noise_grid": [0.0, 0.2],
        "trials": 2,
        "base_seed": 7,
        "solver": {"alpha": 0.2, "beta": 0.2, "max_outer": 60},
    }
    data.update(overrides)
    return ExperimentSpec.from_dict(data)


class TestFnv1a64:
    def test_frozen_reference_values(self):
        # standard FNV-1a test vectors
        assert fnv1a64("") == 0xCBF29CE484222325
        assert fnv1a64("a") == 0xAF63DC4C8601EC8C
        assert fnv1a64("foobar") == 0x85944171F73967E8

    def test_distinct_inputs(self):
        assert fnv1a64("0|instance|1") != fnv1a64("0|instance|2")


class TestConfig:
    def test_unknown_field_rejected(self):
        with pytest.raises(ConfigError, match="unknown field"):
            ExperimentSpec.from_dict({"kind": "single", "typo_field": 1})

    def test_unknown_nested_field_rejected(self):
        with pytest.raises(ConfigError, match="solver"):
            ExperimentSpec.from_dict({"kind": "single", "solver": {"alhpa": 0.1}})

    def test_kind_specific_grids_required(self):
        with pytest.raises(ConfigError, match="beta_grid"):
            ExperimentSpec.from_dict({"kind": "param_sweep"})
        with pytest.raises(ConfigError, match="m_grid"):
            ExperimentSpec.from_dict({"kind": "phase", "s_grid": [2]})
        with pytest.raises(ConfigError, match="m_grid"):
            ExperimentSpec.from_dict({"kind": "rip_sweep"})

    def test_redraw_default_depends_on_kind(self):
        assert tiny_noise_spec().operator_redraw == "per_sweep"
        single = ExperimentSpec.from_dict({"kind": "single"})
        assert single.operator_redraw == "per_trial"

    def test_roundtrip_through_dict(self):
        spec = tiny_noise_spec()
        again = ExperimentSpec.from_dict(spec.to_dict())
        assert again == spec

    def test_unknown_kind(self):
        with pytest.raises(ConfigError, match="kind"):
            ExperimentSpec.from_dict({"kind": "mystery"})


class TestRunTrial:
    def test_row_is_deterministic(self):
        spec = tiny_noise_spec()
        cell = {"noise_ratio": 0.2}
        row_a, _ = run_trial(spec, cell, 0)
        row_b, _ = run_trial(spec, cell, 0)
        assert row_a == row_b

    def test_paired_instances_across_noise_levels(self):
        # the planted instance seed must not depend on the noise level
        spec = tiny_noise_spec()
        row_lo, _ = run_trial(spec, {"noise_ratio": 0.0}, 1)
        row_hi, _ = run_trial(spec, {"noise_ratio": 0.2}, 1)
        assert row_lo["seed"] == row_hi["seed"]

    def test_trials_differ(self):
        spec = tiny_noise_spec()
        row0, _ = run_trial(spec, {"noise_ratio": 0.0}, 0)
        row1, _ = run_trial(spec, {"noise_ratio": 0.0}, 1)
        assert row0["seed"] != row1["seed"]
        assert row0["rel_error"] != row1["rel_error"]

    def test_wall_ms_column_is_constant_zero(self):
        spec = tiny_noise_spec()
        row, extras = run_trial(spec, {"noise_ratio": 0.0}, 0)
        assert row["wall_ms"] == 0
        assert extras["wall_ms"] > 0.0

    def test_noise_adapted_rule_requires_noise(self):
        spec = tiny_noise_spec(alpha_beta_rule="noise_adapted")
        with pytest.raises(ConfigError, match="positive noise"):
            run_trial(spec, {"noise_ratio": 0.0}, 0)
        row, _ = run_trial(spec, {"noise_ratio": 0.2}, 0)
        assert row["alpha"] == row["beta"] > 0


class TestRunExperiment:
    def test_csv_layout_and_content(self, tmp_path):
        spec = tiny_noise_spec()
        rows, summary = run_experiment(spec, tmp_path)
        trials = (tmp_path / "trials.csv").read_text().splitlines()
        assert trials[0] == TRIALS_HEADER
        assert len(trials) == 1 + 2 * 2  # 2 noise levels x 2 trials
        summary_lines = (tmp_path / "summary.csv").read_text().splitlines()
        assert summary_lines[0] == SUMMARY_HEADER
        assert len(summary_lines) == 3
        run_info = json.loads((tmp_path / "run.json").read_text())
        assert run_info["config"]["kind"] == "noise_sweep"
        assert len(run_info["trial_wall_ms"]) == 4
        assert run_info["environment"]["kernel_backend"] in ("cython", "python")

    def test_summary_aggregates_block_means(self, tmp_path):
        spec = tiny_noise_spec()
        rows, summary = run_experiment(spec, tmp_path)
        block = [r for r in rows if r["noise_ratio"] == 0.2]
        mean = sum(r["rel_error"] for r in block) / len(block)
        line = [s for s in summary if s["noise_ratio"] == 0.2][0]
        assert line["mean_rel_error"] == pytest.approx(mean, rel=1e-12)
        assert line["trials"] == 2

    def test_json_format(self, tmp_path):
        spec = tiny_noise_spec()
        run_experiment(spec, tmp_path, fmt="json")
        rows = json.loads((tmp_path / "trials.json").read_text())
        assert len(rows) == 4
        assert set(rows[0]) == set(TRIALS_HEADER.split(","))

    def test_parallel_matches_serial_bytes(self, tmp_path):
        spec = tiny_noise_spec()
        run_experiment(spec, tmp_path / "serial", threads=1)
        run_experiment(spec, tmp_path / "par", threads=2)
        a = (tmp_path / "serial" / "trials.csv").read_bytes()
        b = (tmp_path / "par" / "trials.csv").read_bytes()
        assert a == b

    def test_init_study_arm_labels(self, tmp_path):
        spec = ExperimentSpec.from_dict({
            "kind": "init_study",
            "n1": 5, "n2": 12, "R": 1, "trials": 1, "base_seed": 3,
            "s_grid": [3], "m_grid": [30], "noise_grid": [0.1],
            "solver": {"alpha": 0.3, "beta": 0.3, "max_outer": 40},
        })
        rows, summary = run_experiment(spec, tmp_path)
        kinds = sorted({r["kind"] for r in rows})
        assert kinds == ["init_study:adjoint_svd", "init_study:perturbed_mild",
                        "init_study:perturbed_strong"]

    def test_rip_sweep_rows(self, tmp_path):
        spec = ExperimentSpec.from_dict({
            "kind": "rip_sweep",
            "n1": 4, "n2": 10, "R": 1, "s": 3, "base_seed": 5,
            "m_grid": [20, 80],
            "rip": {"samples": 30, "probes": 2},
        })
        rows, summary = run_experiment(spec, tmp_path)
        assert len(rows) == 4
        for r in rows:
            assert r["iters"] == 30  # sample count mapped onto iters
            assert r["rel_error"] >= r["objective"] >= 0.0  # max >= mean


class TestCli:
    def write_config(self, tmp_path, data):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(data))
        return str(p)

    def test_recover_happy_path(self, tmp_path):
        cfg = self.write_config(tmp_path, {
            "n1": 5, "n2": 12, "m": 40, "s": 3, "trials": 1,
            "solver": {"alpha": 0.3, "beta": 0.3, "max_outer": 40},
        })
        code = cli_main(["recover", "--config", cfg, "--out", str(tmp_path / "o"),
                         "--seed", "11"])
        assert code == 0
        lines = (tmp_path / "o" / "trials.csv").read_text().splitlines()
        assert lines[0] == TRIALS_HEADER
        assert len(lines) == 2

    def test_kind_mismatch_exit_2(self, tmp_path):
        cfg = self.write_config(tmp_path, {"kind": "noise_sweep",
                                           "noise_grid": [0.1]})
        assert cli_main(["recover", "--config", cfg, "--out", str(tmp_path)]) == 2

    def test_bad_json_exit_2(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{nope")
        assert cli_main(["recover", "--config", str(p), "--out", str(tmp_path)]) == 2

    def test_unknown_field_exit_2(self, tmp_path):
        cfg = self.write_config(tmp_path, {"bogus": 1})
        assert cli_main(["recover", "--config", cfg, "--out", str(tmp_path)]) == 2

    def test_divergence_exit_3(self, tmp_path):
        cfg = self.write_config(tmp_path, {
            "n1": 5, "n2": 12, "m": 40, "s": 3, "trials": 1,
            "target_frobenius": 500.0,
            "solver": {"alpha": 0.2, "beta": 0.2, "step_policy": "unit"},
        })
        assert cli_main(["recover", "--config", cfg,
                         "--out", str(tmp_path / "d")]) == 3

    def test_console_script_installed(self):
        out = subprocess.run([sys.executable, "-m", "atlas_sensing.harness.cli",
                              "--help"], capture_output=True, text=True)
        assert out.returncode == 0
        assert "noise-sweep" in out.stdout

    def test_seed_override_changes_rows(self, tmp_path):
        cfg = self.write_config(tmp_path, {
            "n1": 5, "n2": 12, "m": 40, "s": 3, "trials": 1,
            "solver": {"alpha": 0.3, "beta": 0.3, "max_outer": 40},
        })
        assert cli_main(["recover", "--config", cfg, "--out", str(tmp_path / "a"),
                         "--seed", "1"]) == 0
        assert cli_main(["recover", "--config", cfg, "--out", str(tmp_path / "b"),
                         "--seed", "2"]) == 0
        a = (tmp_path / "a" / "trials.csv").read_text()
        b = (tmp_path / "b" / "trials.csv").read_text()
        assert a != b
