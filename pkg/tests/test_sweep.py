import math

import numpy as np
import pytest

from deltamix import (
    ConfigError,
    figure_preset,
    load_config,
    parse_config_text,
    run_sweep,
    save_config,
    serialize_config,
    validate,
)
from deltamix.cli import main
from deltamix.sweep import CSV_COLUMNS, emit_csv, format_csv

MINIMAL = """
# minimal valid config
gamma13 = 3.0
gamma23 = 1.0
control_magnitude = 5.0
input_d_magnitude = 1.0
input_s_magnitude = 1.0
z = 1.0
points = 5
"""


@pytest.fixture
def config_path(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text(MINIMAL, encoding="utf-8")
    return p


class TestConfigParsing:
    def test_minimal_parses(self, config_path):
        cfg = load_config(config_path)
        assert cfg.rates.gamma13 == 3.0
        assert cfg.control.magnitude == 5.0
        assert cfg.sweep.points == 5
        assert cfg.sweep.channel == "both"

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="bogus_key"):
            parse_config_text(MINIMAL + "bogus_key = 1\n")

    def test_negative_rate_named(self):
        with pytest.raises(ConfigError, match="gamma13"):
            parse_config_text(MINIMAL.replace("gamma13 = 3.0", "gamma13 = -3.0"))

    def test_missing_required_key(self):
        with pytest.raises(ConfigError, match="control_magnitude"):
            parse_config_text("gamma13 = 3\ngamma23 = 1\n")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "nope.cfg")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text(MINIMAL + "gamma13 = 3.0\n")

    def test_bad_number_located(self):
        with pytest.raises(ConfigError, match="z"):
            parse_config_text(MINIMAL.replace("z = 1.0", "z = banana"))

    def test_round_trip_lossless(self, config_path, tmp_path):
        cfg = load_config(config_path)
        out = tmp_path / "round.cfg"
        save_config(cfg, out)
        assert load_config(out) == cfg
        assert serialize_config(load_config(out)) == serialize_config(cfg)

    def test_bad_sweep_bounds(self):
        with pytest.raises(ConfigError, match="delta_d_min"):
            parse_config_text(MINIMAL + "delta_d_min = 5\ndelta_d_max = -5\n")


class TestPresets:
    def test_fig2_shared_parameters(self):
        for name in ("fig2a", "fig2b", "fig2c", "fig2d"):
            cfg = figure_preset(name)
            assert cfg.rates.gamma13 == 3.0
            assert cfg.rates.gamma23 == 1.0
            assert cfg.rates.gphi2 == 0.0 and cfg.rates.gphi3 == 0.0
            assert cfg.z == 1.0
            assert cfg.control.magnitude == 5.0
            assert cfg.input_d.magnitude == cfg.input_s.magnitude == 1.0

    def test_fig2_phases(self):
        assert figure_preset("fig2a").sweep.phi_values == (-math.pi / 2,)
        assert figure_preset("fig2b").sweep.phi_values == (0.0,)
        assert figure_preset("fig2c").sweep.phi_values == (math.pi / 2,)
        assert figure_preset("fig2d").sweep.phi_values == (math.pi,)

    def test_fig3_parameters(self):
        for name in ("fig3a", "fig3b", "fig3c", "fig3d"):
            cfg = figure_preset(name)
            assert cfg.control.magnitude == 10.0
            assert cfg.z == 1.0
        assert figure_preset("fig3a").input_s.magnitude == 1.0
        cfg3c = figure_preset("fig3c")
        assert cfg3c.sweep.phi_values == (math.pi / 2,)
        assert cfg3c.input_s.magnitude / cfg3c.input_d.magnitude == 3.0
        assert figure_preset("fig3d").sweep.phi_values == (-math.pi / 2,)

    def test_unknown_preset(self):
        with pytest.raises(ConfigError, match="fig9z"):
            figure_preset("fig9z")


class TestRunSweep:
    def test_row_ordering(self, config_path):
        cfg = load_config(config_path)
        from dataclasses import replace

        cfg = replace(cfg, sweep=replace(cfg.sweep, phi_values=(0.0, 1.0), points=3))
        rows = run_sweep(cfg)
        assert [(r.delta_d, r.phi) for r in rows] == [
            (-10.0, 0.0), (-10.0, 1.0), (0.0, 0.0), (0.0, 1.0),
            (10.0, 0.0), (10.0, 1.0),
        ]

    def test_zero_distance_rows(self, config_path):
        from dataclasses import replace

        cfg = replace(load_config(config_path), z=0.0)
        for row in run_sweep(cfg):
            assert abs(row.i_s_tot - 1.0) < 1e-14
            assert abs(row.i_d_tot - 1.0) < 1e-14
            assert abs(row.i_s_interf) < 1e-14
            assert abs(row.i_d_interf) < 1e-14

    def test_fig2a_resonance_row(self):
        rows = run_sweep(figure_preset("fig2a"))
        row = min(rows, key=lambda r: abs(r.delta_d))
        assert row.delta_d == 0.0
        assert abs(row.i_s_tot - 1.985) < 1e-3
        assert abs(row.i_s_interf - 0.966) < 1e-3

    def test_fig2c_resonance_row(self):
        rows = run_sweep(figure_preset("fig2c"))
        row = min(rows, key=lambda r: abs(r.delta_d))
        assert abs(row.i_s_tot - 0.053) < 1e-3

    def test_interference_identity_per_row(self, config_path):
        for row in run_sweep(load_config(config_path)):
            assert row.i_s_interf == row.i_s_tot - row.i_s_inc - row.i_s_gen
            assert row.i_d_interf == row.i_d_tot - row.i_d_inc - row.i_d_gen

    def test_oracle_dev_small(self, config_path):
        for row in run_sweep(load_config(config_path)):
            assert row.oracle_dev <= 1e-10


class TestCsv:
    def test_header_and_roundtrip(self, config_path, tmp_path):
        rows = run_sweep(load_config(config_path))
        out = tmp_path / "sweep.csv"
        emit_csv(rows, out)
        text = out.read_text(encoding="utf-8")
        lines = text.splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == len(rows) + 1
        assert "\r" not in text
        parsed = [tuple(float(v) for v in line.split(",")) for line in lines[1:]]
        for row, vals in zip(rows, parsed):
            assert vals == row.csv_values()  # 17 significant digits round-trip

    def test_byte_identical_runs(self, tmp_path):
        cfg = figure_preset("fig2a")
        a = format_csv(run_sweep(cfg))
        b = format_csv(run_sweep(cfg))
        assert a.encode("utf-8") == b.encode("utf-8")

    def test_empty_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            emit_csv([], tmp_path / "empty.csv")

    def test_zero_distance_intensities_are_one(self, config_path, tmp_path):
        from dataclasses import replace

        cfg = replace(load_config(config_path), z=0.0)
        out = tmp_path / "z0.csv"
        emit_csv(run_sweep(cfg), out)
        header, *data = out.read_text().splitlines()
        idx = header.split(",").index("I_s_tot")
        for line in data:
            assert float(line.split(",")[idx]) == 1.0


class TestValidate:
    def test_quick_passes_on_preset(self):
        report = validate(figure_preset("fig2a"), level="quick")
        assert report.passed
        names = [c.name for c in report.checks]
        assert any("expm" in n for n in names)
        assert any("oracle" in n for n in names)

    def test_strong_drive_warns(self):
        from dataclasses import replace

        from deltamix import DriveField

        cfg = replace(figure_preset("fig2a"), input_d=DriveField(5.0, 0.0))
        report = validate(cfg, level="quick")
        assert any("perturbative" in w for w in report.warnings)

    def test_bad_level(self):
        with pytest.raises(ValueError):
            validate(figure_preset("fig2a"), level="medium")

    def test_render_contains_result(self):
        report = validate(figure_preset("fig2b"), level="quick")
        assert "RESULT:" in report.render()


class TestCli:
    def test_figure_writes_csv_and_png(self, tmp_path, capsys):
        out = tmp_path / "fig2a.csv"
        code = main(["figure", "--preset", "fig2a", "--out", str(out), "--points", "21"])
        assert code == 0
        assert out.exists()
        assert out.with_suffix(".png").exists()

    def test_figure_no_plot(self, tmp_path):
        out = tmp_path / "fig2b.csv"
        code = main(
            ["figure", "--preset", "fig2b", "--out", str(out),
             "--points", "11", "--no-plot"]
        )
        assert code == 0
        assert not out.with_suffix(".png").exists()

    def test_sweep(self, config_path, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code = main(
            ["sweep", "--config", str(config_path), "--out", str(out),
             "--points", "7", "--delta-range", "-2", "2", "--phi", "0,1.5708"]
        )
        assert code == 0
        assert len(out.read_text().splitlines()) == 1 + 7 * 2

    def test_steady_state(self, config_path, capsys):
        assert main(["steady-state", "--config", str(config_path)]) == 0
        assert "populations" in capsys.readouterr().out

    def test_coherences(self, config_path, capsys):
        assert main(["coherences", "--config", str(config_path), "--delta", "1.0"]) == 0
        assert "rho21_1" in capsys.readouterr().out

    def test_propagate(self, config_path, capsys):
        assert main(["propagate", "--config", str(config_path)]) == 0
        out = capsys.readouterr().out
        assert "channel s" in out and "channel d" in out

    def test_validate_default_config(self, capsys):
        assert main(["validate", "--seed", "7"]) == 0
        assert "RESULT: PASS" in capsys.readouterr().out

    def test_config_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text(MINIMAL + "mystery = 3\n", encoding="utf-8")
        assert main(["steady-state", "--config", str(bad)]) == 2
        assert "mystery" in capsys.readouterr().err

    def test_missing_config_exit_code(self, tmp_path):
        assert main(["sweep", "--config", str(tmp_path / "none.cfg"),
                     "--out", str(tmp_path / "o.csv")]) == 2

    def test_io_error_exit_code(self, config_path, tmp_path):
        assert main(["sweep", "--config", str(config_path),
                     "--out", str(tmp_path / "no" / "dir" / "o.csv")]) == 3
