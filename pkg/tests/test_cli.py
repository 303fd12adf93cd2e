import json
import math

import numpy as np
import pytest

from cvcavity.cli import main


def read_csv(path):
    params = {}
    columns = None
    rows = []
    for line in path.read_text().splitlines():
        if line.startswith("# ") and " = " in line:
            key, value = line[2:].split(" = ", 1)
            params[key] = value
        elif line.startswith("# "):
            columns = line[2:].split(",")
        else:
            rows.append([float(v) for v in line.split(",")])
    return params, columns, np.asarray(rows)


class TestSimulate:
    def test_golden_run_stays_entangled(self, tmp_path):
        out = tmp_path / "sim.csv"
        rc = main(["simulate", "--g0", "4", "--sigma-p", "0.868", "--zeta", "0",
                   "--out", str(out)])
        assert rc == 0
        params, columns, rows = read_csv(out)
        assert columns == ["t_tilde", "u", "n1", "n2", "g", "delta_sq"]
        # entangled (delta < 1) from pulse onset to the end of the window
        t, delta = rows[:, 0], rows[:, 5]
        onset = delta < 0.999
        assert onset.any()
        first = int(np.argmax(onset))
        assert np.all(delta[first:] < 1.0)
        assert abs(delta.min() - 0.2291) < 1e-3

    def test_asymmetric_losses_cross_above_one(self, tmp_path):
        out = tmp_path / "sim.csv"
        rc = main(["simulate", "--g0", "4", "--sigma-p", "0.868", "--zeta",
                   str(1.0 / 3.0), "--out", str(out)])
        assert rc == 0
        _, _, rows = read_csv(out)
        t, delta = rows[:, 0], rows[:, 5]
        dipped = delta < 0.9
        first = int(np.argmax(dipped))
        after = delta[first:] > 1.0
        assert after.any()
        t_cross = t[first + int(np.argmax(after))]
        assert 1.5 < t_cross < 2.5

    @pytest.mark.filterwarnings("ignore::cvcavity.errors.WindowBoundaryWarning")
    def test_constant_zero_pump_gives_vacuum_rows(self, tmp_path):
        # flat delta == 1 everywhere, so the minimum legitimately sits on the
        # window edge and the summary emits a boundary warning
        out = tmp_path / "sim.csv"
        rc = main(["simulate", "--pump", "constant", "--g0", "0",
                   "--t-start", "0", "--t-end", "2", "--step", "0.01",
                   "--out", str(out)])
        assert rc == 0
        _, _, rows = read_csv(out)
        assert np.all(rows[:, 1:5] == 0.0)
        assert np.all(rows[:, 5] == 1.0)

    def test_deterministic_output(self, tmp_path):
        args = ["simulate", "--g0", "2", "--t-start", "-4", "--t-end", "4",
                "--step", "0.01"]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_csv_round_trip_precision(self, tmp_path):
        out = tmp_path / "sim.csv"
        assert main(["simulate", "--g0", "4", "--t-start", "-3", "--t-end", "3",
                     "--step", "0.01", "--out", str(out)]) == 0
        _, _, rows = read_csv(out)
        u, n1, n2, delta = rows[:, 1], rows[:, 2], rows[:, 3], rows[:, 5]
        recomputed = (1.0 + n1 + n2) * np.exp(-2.0 * u)
        mask = delta > 0
        assert np.max(np.abs(recomputed[mask] / delta[mask] - 1.0)) < 1e-10

    def test_json_output(self, tmp_path):
        out = tmp_path / "sim.json"
        rc = main(["simulate", "--g0", "1", "--t-start", "-2", "--t-end", "2",
                   "--step", "0.01", "--format", "json", "--out", str(out)])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert doc["columns"] == ["t_tilde", "u", "n1", "n2", "g", "delta_sq"]
        assert len(doc["rows"]) == 401

    def test_physical_inputs_reproduce_reference_amplitude(self, tmp_path):
        out = tmp_path / "sim.csv"
        rc = main(["simulate", "--chi2-pm-v", "11", "--e0-mv-cm", "1",
                   "--lambda-p-nm", "775", "--radius-um", "20", "--n-eff", "3",
                   "--t-start", "-2", "--t-end", "2", "--step", "0.01",
                   "--out", str(out)])
        assert rc == 0
        params, _, _ = read_csv(out)
        assert abs(float(params["g0"]) - 4.0) / 4.0 < 0.05

    def test_physical_and_g0_conflict(self, tmp_path):
        rc = main(["simulate", "--g0", "4", "--chi2-pm-v", "11", "--e0-mv-cm",
                   "1", "--lambda-p-nm", "775", "--radius-um", "20",
                   "--n-eff", "3", "--out", str(tmp_path / "x.csv")])
        assert rc == 2


class TestSweep:
    def test_small_grid(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = main(["sweep", "--tau-points", "3", "--tau-min", "1.2",
                   "--tau-max", "2.4", "--zeta-points", "3", "--zeta-min",
                   "-0.4", "--zeta-max", "0.4", "--step", "0.005",
                   "--out", str(out)])
        assert rc == 0
        params, columns, rows = read_csv(out)
        assert columns == ["tau_tilde", "zeta", "delta_sq_min", "t_min",
                           "n1_min", "n2_min"]
        assert rows.shape == (9, 6)
        assert float(params["global_min_zeta"]) == 0.0
        assert 0.2 < float(params["global_min_delta_sq"]) < 0.3

    def test_offset_recorded(self, tmp_path):
        out = tmp_path / "sweep.csv"
        rc = main(["sweep", "--tau-points", "2", "--tau-min", "1.5",
                   "--tau-max", "1.8", "--zeta-points", "1", "--zeta-min", "0",
                   "--zeta-max", "0", "--step", "0.005", "--offset-mrad", "20",
                   "--out", str(out)])
        assert rc == 0
        params, _, _ = read_csv(out)
        assert float(params["offset_mrad"]) == 20.0


class TestOptimize:
    def test_reference_ring_report(self, tmp_path):
        out = tmp_path / "opt.csv"
        rc = main(["optimize", "--ap", "0.99", "--out", str(out)])
        assert rc == 0
        report = {}
        for line in out.read_text().splitlines():
            if line.startswith("#"):
                continue
            key, value = line.split(",")
            report[key] = float(value)
        assert abs(report["sigma_p"] - 0.8676) < 1e-3
        assert abs(report["tau_opt"] - 1.6107) < 2e-3
        assert abs(report["peak_strength_coefficient"] - 0.653) < 5e-4
        assert report["relative_gap"] < 0.03

    def test_requires_attenuation(self, tmp_path):
        assert main(["optimize", "--out", str(tmp_path / "x.csv")]) == 2


class TestValidate:
    def test_fast_comparison_passes(self, tmp_path):
        out = tmp_path / "val.csv"
        rc = main(["validate", "--g0", "0.3", "--nmax", "10", "--oracle-step",
                   "0.01", "--t-start", "-4", "--t-end", "4", "--samples", "9",
                   "--out", str(out)])
        assert rc == 0
        params, columns, rows = read_csv(out)
        assert float(params["max_abs_deviation"]) < 1e-3
        assert rows.shape == (9, 7)

    def test_rejects_large_amplitude(self, tmp_path):
        rc = main(["validate", "--g0", "2", "--out", str(tmp_path / "x.csv")])
        assert rc == 2

    def test_truncation_exit_code(self, tmp_path):
        rc = main(["validate", "--g0", "1.0", "--nmax", "4", "--oracle-step",
                   "0.01", "--t-start", "-4", "--t-end", "4",
                   "--out", str(tmp_path / "x.csv")])
        assert rc == 4


class TestDecay:
    def test_closed_form_agreement(self, tmp_path):
        out = tmp_path / "decay.csv"
        rc = main(["decay", "--n1", "2", "--n2", "2", "--zeta", "0.3",
                   "--t-end", "3", "--step", "0.001", "--out", str(out)])
        assert rc == 0
        params, _, rows = read_csv(out)
        assert float(params["max_abs_ode_error"]) < 1e-10
        t = rows[:, 0]
        assert np.allclose(rows[:, 1], 2.0 * np.exp(-1.3 * t), rtol=1e-12)
        assert np.allclose(rows[:, 2], 2.0 * np.exp(-0.7 * t), rtol=1e-12)


class TestErrorPaths:
    def test_bad_coupling_is_config_error(self, tmp_path):
        rc = main(["simulate", "--sigma-p", "1.5", "--out", str(tmp_path / "x.csv")])
        assert rc == 2

    def test_integration_failure_exit_code(self, tmp_path):
        rc = main(["simulate", "--pump", "constant", "--g0", "1e9", "--step",
                   "0.5", "--t-start", "0", "--t-end", "5",
                   "--out", str(tmp_path / "x.csv")])
        assert rc == 3

    def test_missing_config_file(self, tmp_path):
        rc = main(["simulate", "--config", str(tmp_path / "none.yaml"),
                   "--out", str(tmp_path / "x.csv")])
        assert rc == 2


class TestConfigFile:
    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "run.yaml"
        cfg.write_text("pump:\n  g0: 2.0\n  tau: 1.5\nzeta: 0.1\n"
                       "integrator:\n  t_start: -2.0\n  t_end: 2.0\n  step: 0.01\n")
        out = tmp_path / "sim.csv"
        rc = main(["simulate", "--config", str(cfg), "--g0", "3", "--out",
                   str(out)])
        assert rc == 0
        params, _, _ = read_csv(out)
        assert float(params["g0"]) == 3.0
        assert float(params["tau_tilde"]) == 1.5
        assert float(params["zeta"]) == 0.1

    def test_config_only(self, tmp_path):
        cfg = tmp_path / "run.yaml"
        cfg.write_text("pump:\n  variant: gaussian\n  g0: 1.0\n  tau: 2.0\n"
                       "integrator:\n  t_start: -3.0\n  t_end: 3.0\n  step: 0.01\n"
                       f"output:\n  path: {tmp_path / 'from_cfg.csv'}\n")
        rc = main(["simulate", "--config", str(cfg)])
        assert rc == 0
        params, _, rows = read_csv(tmp_path / "from_cfg.csv")
        assert params["pump"] == "gaussian"
        assert rows.shape[0] == 601
