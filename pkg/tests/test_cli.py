"""Config parsing and the command-line subcommands."""

import numpy as np
import pytest

from drbeam.cli import ConfigError, main, parse_config
from drbeam.frameio import load_frame, read_results


class TestParseConfig:
    def test_minimal_file_fills_defaults(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("n_tx=4\nn_rx=8\n")
        cfg = parse_config(path)
        assert cfg.n_tx == 4 and cfg.n_rx == 8
        assert cfg.episodes == 250
        assert cfg.test_len == 500
        assert cfg.snr_db == -10.0
        assert cfg.impulse.impulse_fraction == 0.10
        assert cfg.impulse.impulse_max_amplitude == 1.5
        assert len(cfg.methods) == 11

    def test_zero_episodes_rejected(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("episodes=0\n")
        with pytest.raises(ConfigError):
            parse_config(path)

    def test_override_precedence(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("snr_db=-10\n")
        cfg = parse_config(path, ["snr_db=10"])
        assert cfg.snr_db == 10.0

    def test_unknown_key_reports_line(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("n_tx=4\nwavelength=3\n")
        with pytest.raises(ConfigError, match=":2:"):
            parse_config(path)

    def test_bad_value_reports_field(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("episodes=many\n")
        with pytest.raises(ConfigError, match="episodes"):
            parse_config(path)

    def test_methods_with_params(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("methods=wiener,wiener_dl:epsilon=0.5,kernel_dl:epsilon=0.1\n")
        cfg = parse_config(path)
        assert [m.name for m in cfg.methods] == ["wiener", "wiener_dl", "kernel_dl"]
        assert cfg.methods[1].params["epsilon"] == 0.5

    def test_comments_and_blanks(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("# comment\n\nn_tx=2  # trailing\n")
        assert parse_config(path).n_tx == 2


def _write_tiny_config(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(
        "n_tx=2\nn_rx=4\nn_paths=6\nsnr_db=10\npilot_sizes=8,12\n"
        "test_len=40\nepisodes=2\nimpulse_fraction=0\nimpulse_max_amplitude=0\n"
        "methods=wiener,zf\nmaster_seed=3\n"
    )
    return path


class TestRunCommand:
    def test_writes_outputs(self, tmp_path):
        cfg_path = _write_tiny_config(tmp_path)
        out = tmp_path / "out"
        code = main(["run", "--config", str(cfg_path), "--out", str(out)])
        assert code == 0
        rows = read_results(out / "results.csv")
        assert len(rows) == 4  # 2 methods x 2 pilot sizes
        manifest = (out / "manifest.txt").read_text()
        assert "master_seed=3" in manifest
        assert (out / "results.gp").exists()

    def test_seed_flag_changes_results(self, tmp_path):
        cfg_path = _write_tiny_config(tmp_path)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        main(["run", "--config", str(cfg_path), "--out", str(out_a), "--seed", "3"])
        main(["run", "--config", str(cfg_path), "--out", str(out_b), "--seed", "4"])
        rows_a = read_results(out_a / "results.csv")
        rows_b = read_results(out_b / "results.csv")
        assert rows_a != rows_b

    def test_config_error_exit_code(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("episodes=0\n")
        assert main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == 2


class TestReproduceCommand:
    def test_invalid_preset(self, tmp_path, capsys):
        code = main(["reproduce", "--preset", "table9", "--out", str(tmp_path / "o")])
        assert code == 2
        assert "valid presets" in capsys.readouterr().err

    def test_table_preset_smoke(self, tmp_path):
        out = tmp_path / "t1"
        code = main(
            ["reproduce", "--preset", "table1", "--out", str(out), "--set", "episodes=2"]
        )
        assert code == 0
        rows = read_results(out / "results.csv")
        assert len(rows) == 11
        assert {r.pilot_size for r in rows} == {10}
        header = (out / "results.csv").read_text().splitlines()[0]
        assert "reference_mse" in header
        assert "preset=table1" in (out / "manifest.txt").read_text()

    def test_fig_preset_smoke(self, tmp_path):
        out = tmp_path / "f3a"
        code = main(
            ["reproduce", "--preset", "fig3a", "--out", str(out), "--set", "episodes=2"]
        )
        assert code == 0
        rows = read_results(out / "results.csv")
        assert {r.method for r in rows} == {"wiener", "wiener_ce", "capon", "zf", "kernel"}


class TestExportFrame:
    def test_round_trip_and_determinism(self, tmp_path):
        cfg_path = _write_tiny_config(tmp_path)
        a = tmp_path / "frame_a.csv"
        b = tmp_path / "frame_b.csv"
        assert main(["export-frame", "--config", str(cfg_path), "--seed", "9", str(a)]) == 0
        assert main(["export-frame", "--config", str(cfg_path), "--seed", "9", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        frame = load_frame(a)
        assert frame.s_block.shape == (2, 8)
        assert frame.x_block.shape == (4, 8)

    def test_noiseless_export_consistency(self, tmp_path):
        cfg_path = tmp_path / "exp.cfg"
        cfg_path.write_text(
            "n_tx=2\nn_rx=3\npilot_sizes=6\nsnr_db=1000000\n"
            "impulse_fraction=0\nimpulse_max_amplitude=0\nmethods=wiener\n"
        )
        path = tmp_path / "frame.csv"
        main(["export-frame", "--config", str(cfg_path), "--seed", "2", str(path)])
        frame = load_frame(path)
        residual = frame.x_block - frame.true_h @ frame.s_block
        assert np.max(np.abs(residual)) <= 1e-12


class TestTuneCommand:
    def test_singleton_grid(self, tmp_path, capsys):
        cfg_path = _write_tiny_config(tmp_path)
        code = main(
            [
                "tune",
                "--config", str(cfg_path),
                "--method", "wiener_dl",
                "--grid", "0.5",
                "--out", str(tmp_path / "tuned"),
            ]
        )
        assert code == 0
        assert "wiener_dl.epsilon=0.5" in capsys.readouterr().out
        assert (tmp_path / "tuned" / "tuned.txt").exists()
