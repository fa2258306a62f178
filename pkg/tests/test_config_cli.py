import json
from pathlib import Path

import numpy as np
import pytest

from squeezelock.cavity import airy_buildup
from squeezelock.cli import main
from squeezelock.config import (ConfigError, RunConfig, config_from_dict, config_to_dict,
                                dump_config, load_config)
from squeezelock.tables import CurveTable, read_csv

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"


class TestConfig:
    @pytest.mark.parametrize("name", ["default.yaml", "geo_longrun.yaml", "unstabilized.yaml"])
    def test_shipped_configs_load(self, name):
        load_config(CONFIGS / name)

    def test_default_file_matches_defaults(self):
        assert load_config(CONFIGS / "default.yaml") == RunConfig()

    def test_round_trip(self, tmp_path):
        cfg = load_config(CONFIGS / "geo_longrun.yaml")
        path = tmp_path / "c.yaml"
        dump_config(cfg, path)
        assert load_config(path) == cfg
        assert config_from_dict(config_to_dict(cfg)) == cfg

    def test_explicit_opo(self):
        cfg = config_from_dict({"opo": {"pump_ratio": 0.5, "detection_efficiency": 0.9,
                                        "threshold_power": 0.07}})
        assert cfg.calibration is None
        assert cfg.opo_params.pump_ratio == 0.5
        assert config_from_dict(config_to_dict(cfg)) == cfg

    def test_both_opo_and_calibration_rejected(self):
        with pytest.raises(ConfigError, match="exactly one"):
            config_from_dict({"opo": {"pump_ratio": 0.5, "detection_efficiency": 0.9},
                              "calibration": {"sqz_db": -9.3, "antisqz_db": 16.75}})

    @pytest.mark.parametrize("data", [
        {"bogus": 1},
        {"noise": {"relative_sigma": -0.1}},
        {"noise": {"sigma": 0.1}},
        {"cavity": {"output_transmittance": 2.0}},
        {"control": {"readout_mode": "q"}},
        {"spectrogram": {"bin_duration": 10, "fft_segment": 60}},
        {"dt": 0},
        {"loop": [1, 2]},
    ])
    def test_invalid(self, data):
        with pytest.raises(ConfigError):
            config_from_dict(data)

    def test_calibrated_threshold(self):
        cfg = RunConfig()
        assert cfg.opo_params.threshold_power == pytest.approx(
            cfg.thermal.set_point_power / cfg.opo_params.pump_ratio)


class TestTables:
    def test_csv_round_trip(self, tmp_path):
        t = CurveTable(["a", "b"], [[1.0, 2.5], [3.0, -1e-7]], "note")
        t.to_csv(tmp_path / "t.csv")
        back = read_csv(tmp_path / "t.csv")
        assert back.columns == ["a", "b"] and back.provenance == "note"
        np.testing.assert_array_equal(back.rows, t.rows)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            CurveTable(["a"], [[np.nan]])
        with pytest.raises(ValueError):
            CurveTable(["a", "b"], [[1.0]])


def run_cli(args, tmp_path, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCli:
    def test_resonance(self, tmp_path, capsys):
        code, _, _ = run_cli(["--out", str(tmp_path), "resonance", "--points", "401"],
                             tmp_path, capsys)
        assert code == 0
        t = read_csv(tmp_path / "resonance.csv")
        p, tr = t.column("pump_power_W"), t.column("transmission")
        assert p[np.argmax(tr)] == pytest.approx(34.5e-3)
        i = np.argmax(tr)
        assert np.all(np.diff(tr[: i + 1]) > 0) and np.all(np.diff(tr[i:]) < 0)
        at = np.isclose(p, 1.1 * 34.5e-3, rtol=1e-9)
        assert tr[at][0] == pytest.approx(airy_buildup(3e6), rel=1e-10)

    def test_resonance_empty_span(self, tmp_path, capsys):
        assert run_cli(["resonance", "--points", "0"], tmp_path, capsys)[0] == 1
        assert run_cli(["resonance", "--p-min", "0.04", "--p-max", "0.03"],
                       tmp_path, capsys)[0] == 1

    def test_phase(self, tmp_path, capsys):
        code, out, _ = run_cli(["phase", "--f-max", "200e6", "--points", "801"],
                               tmp_path, capsys)
        assert code == 0
        (tmp_path / "p.csv").write_text(out)
        t = read_csv(tmp_path / "p.csv")
        mid = 400
        assert np.all(t.rows[mid, 1:] == 0)
        for name in ("phi_rad", "theta_lo_rad"):
            c = t.column(name)
            np.testing.assert_allclose(c[::-1], -c, atol=1e-10)
        for name in ("delta_change_rad", "theta_a_rad"):
            c = t.column(name)
            np.testing.assert_allclose(c[::-1], c, atol=1e-10)
        d = t.column("delta_change_rad")
        far = np.abs(t.column("detuning_Hz")) >= 150e6
        assert np.ptp(d[far]) < 0.05 * np.abs(d[far]).max()

    def test_fig4(self, tmp_path, capsys):
        code, _, _ = run_cli(["--out", str(tmp_path), "fig4", "--points", "201"],
                             tmp_path, capsys)
        assert code == 0
        t = read_csv(tmp_path / "fig4.csv")
        mid = 100
        for m in "abcd":
            assert t.column(f"sqz_{m}_dB")[mid] == pytest.approx(-9.3, abs=1e-6)
        assert t.column("detuning_Hz")[0] == pytest.approx(-3e6)

    def test_fig4_trace_selection(self, tmp_path, capsys):
        code, out, _ = run_cli(["fig4", "--traces", "a,d", "--points", "3"], tmp_path, capsys)
        assert code == 0
        assert out.splitlines()[1] == "pump_power_W,detuning_Hz,sqz_a_dB,sqz_d_dB"
        assert run_cli(["fig4", "--traces", "ae"], tmp_path, capsys)[0] == 1

    def test_calibrate(self, tmp_path, capsys):
        code, out, _ = run_cli(["calibrate", "-9.3", "16.75"], tmp_path, capsys)
        assert code == 0
        vals = dict(line.split(" = ") for line in out.splitlines())
        assert float(vals["detection_efficiency"]) == pytest.approx(0.900, abs=5e-4)
        assert float(vals["pump_ratio"]) == pytest.approx(0.574, abs=5e-4)
        assert float(vals["forward_residual_dB"]) < 1e-9
        code, out, _ = run_cli(["calibrate", "-10", "10"], tmp_path, capsys)
        assert float(dict(l.split(" = ") for l in out.splitlines())["detection_efficiency"]) == 1.0

    def test_calibrate_infeasible(self, tmp_path, capsys):
        code, _, err = run_cli(["calibrate", "-3", "1"], tmp_path, capsys)
        assert code == 3 and "uncertainty" in err

    def test_bad_config(self, tmp_path, capsys):
        bad = tmp_path / "bad.yaml"
        bad.write_text("noise: {relative_sigma: -1}\n")
        assert run_cli(["--config", str(bad), "fig4"], tmp_path, capsys)[0] == 2
        assert run_cli(["--config", str(tmp_path / "missing.yaml"), "fig4"],
                       tmp_path, capsys)[0] == 2
        bad.write_text("noise: [\n")
        assert run_cli(["--config", str(bad), "fig4"], tmp_path, capsys)[0] == 2

    def test_usage_errors(self, tmp_path, capsys):
        for argv in ([], ["nonsense"], ["fig4", "--points", "x"]):
            with pytest.raises(SystemExit) as exc:
                main(argv)
            assert exc.value.code == 1

    def test_longrun_outputs(self, tmp_path, capsys):
        cfg = tmp_path / "c.yaml"
        cfg.write_text("duration: 7200\nlock: {lockloss_rate: 2.0}\n")
        code, out, _ = run_cli(["--config", str(cfg), "--out", str(tmp_path / "o"),
                                "--seed", "3", "longrun"], tmp_path, capsys)
        assert code == 0
        o = tmp_path / "o"
        stats = json.loads((o / "stats.json").read_text())
        assert set(stats) == {"duty_cycle", "n_locklosses", "longest_lock", "mean_squeezing_db"}
        assert json.loads(out) == stats
        spec = json.loads((o / "spectrogram.json").read_text())
        assert len(spec["values_db"]) == 8
        rows = (o / "spectrogram.csv").read_text().splitlines()
        assert len(rows) == 9
        assert len({len(r.split(",")) for r in rows}) == 1
        ev = read_csv(o / "events.csv")
        assert (ev.column("code") == 0).sum() == stats["n_locklosses"]

    def test_longrun_zero_duration(self, tmp_path, capsys, caplog):
        code, out, _ = run_cli(["--out", str(tmp_path / "z"), "longrun", "--duration", "0"],
                               tmp_path, capsys)
        assert code == 0
        assert json.loads(out)["duty_cycle"] == 1
        assert "zero-length" in caplog.text
        assert (tmp_path / "z" / "spectrogram.csv").read_text().count("\n") == 1

    def test_seed_flag_after_subcommand(self, tmp_path, capsys):
        a = run_cli(["longrun", "--duration", "3600", "--seed", "9", "--out",
                     str(tmp_path / "a")], tmp_path, capsys)
        b = run_cli(["--seed", "9", "--out", str(tmp_path / "b"), "longrun", "--duration",
                     "3600"], tmp_path, capsys)
        assert a[0] == b[0] == 0 and a[1] == b[1]
