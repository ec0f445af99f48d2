"""Command-line interface: simulate outputs and verify suites."""

import os
import subprocess
import sys

import numpy as np
import pytest

from levyfield.cli import field_to_csv, field_to_pgm, main
from levyfield.config import (
    ConfigError,
    format_config,
    parse_config_text,
    triplet_from_config,
)
from levyfield.synth import FieldRealization

CONFIG = """\
# directional field in the figure setup
family = gaussian
mu = 0
sigma2 = 1
operator = directional
factors = (2,1):-1.0+0j ; (2,-1):-0.8+0j
shape = 48,48
spacing = 0.020833333333333332
seed = 9
"""


def run_cli(args):
    return main(list(args))


class TestConfig:
    def test_parse_and_roundtrip(self):
        cfg = parse_config_text(CONFIG, "inline")
        assert cfg["family"] == "gaussian"
        again = parse_config_text(format_config(cfg), "inline")
        assert again == cfg

    def test_error_carries_line_number(self):
        with pytest.raises(ConfigError, match="inline:2"):
            parse_config_text("a = 1\nbroken line\n", "inline")

    def test_error_carries_field_name(self):
        with pytest.raises(ConfigError, match="alpha"):
            triplet_from_config({"family": "sas", "mu": "0", "sigma2": "0"}, "x")
        with pytest.raises(ConfigError, match="family"):
            triplet_from_config({"family": "unknown"}, "x")


class TestSimulate:
    def test_outputs_and_reproducibility(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text(CONFIG)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert run_cli(["simulate", "--config", str(cfg), "--out", str(out1)]) == 0
        sidecar = out1 / "field.provenance.txt"
        assert sidecar.exists()
        assert run_cli(["simulate", "--config", str(sidecar), "--out", str(out2)]) == 0
        assert (out1 / "field.csv").read_bytes() == (out2 / "field.csv").read_bytes()
        assert (out1 / "field.pgm").read_bytes() == (out2 / "field.pgm").read_bytes()

    def test_seed_override_changes_output(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text(CONFIG)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        run_cli(["simulate", "--config", str(cfg), "--out", str(out1)])
        run_cli(["simulate", "--config", str(cfg), "--seed", "10", "--out", str(out2)])
        assert (out1 / "field.csv").read_bytes() != (out2 / "field.csv").read_bytes()

    def test_invalid_config_reports_location(self, tmp_path, capsys):
        cfg = tmp_path / "bad.txt"
        cfg.write_text("family = sas\nshape = 8,8\nspacing = 0.1\nseed = 1\n")
        code = run_cli(["simulate", "--config", str(cfg), "--out", str(tmp_path)])
        assert code == 2
        err = capsys.readouterr().err
        assert "alpha" in err

    def test_csv_format(self):
        field = FieldRealization(
            np.array([[1.0, 2.0], [3.0, 4.0]]), 0.5, (0, 0), {}
        )
        text = field_to_csv(field).decode()
        lines = text.strip().split("\n")
        assert lines[0] == "i,j,value"
        assert lines[1] == "0,0,1"
        assert len(lines) == 5
        # 17 significant digits round-trip
        field2 = FieldRealization(np.array([[np.pi, np.e]]), 1.0, (0, 0), {})
        row = field_to_csv(field2).decode().strip().split("\n")[1]
        assert float(row.split(",")[2]) == np.pi

    def test_pgm_format(self):
        field = FieldRealization(
            np.array([[0.0, 1.0], [2.0, 3.0]]), 0.5, (0, 0), {}
        )
        data, vmin, vmax = field_to_pgm(field)
        assert data.startswith(b"P5\n2 2\n65535\n")
        pix = np.frombuffer(data.split(b"65535\n", 1)[1], dtype=">u2").reshape(2, 2)
        assert pix[0, 0] == 0 and pix[1, 1] == 65535
        assert (vmin, vmax) == (0.0, 3.0)


class TestVerify:
    def test_unknown_suite(self, capsys):
        assert run_cli(["verify", "--suite", "nope"]) == 2

    def test_certificates_suite_passes(self, capsys):
        assert run_cli(["verify", "--suite", "certificates", "--seed", "1"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out

    def test_exit_code_zero_iff_all_pass(self, capsys):
        code = run_cli(["verify", "--suite", "psd", "--seed", "2"])
        out = capsys.readouterr().out
        lines = [l for l in out.strip().split("\n") if l]
        assert all(l.startswith(("PASS", "FAIL")) for l in lines)
        assert (code == 0) == all(l.startswith("PASS") for l in lines)


class TestThreadCountDeterminism:
    def test_simulate_independent_of_worker_env(self, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text(CONFIG.replace("48,48", "32,32"))
        outs = []
        for workers in ("1", "4"):
            out = tmp_path / f"w{workers}"
            env = dict(os.environ, LEVYFIELD_THREADS=workers)
            res = subprocess.run(
                [sys.executable, "-m", "levyfield.cli", "simulate",
                 "--config", str(cfg), "--out", str(out)],
                env=env, capture_output=True, text=True,
            )
            assert res.returncode == 0, res.stderr
            outs.append((out / "field.csv").read_bytes())
        assert outs[0] == outs[1]
