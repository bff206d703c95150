import os

import numpy as np
import pytest

from mhdbox.checkpoint import load_checkpoint
from mhdbox.cli import main
from mhdbox.config import RunConfig, parse_config
from mhdbox.scenarios import simulate

SMALL_CFG = """
[grid]
n1 = 32
n2 = 32
[init]
seed = 77
epsilon = 1e-3
[diag]
sample_interval = 0.25
[run]
t_end = 1.0
checkpoint_every = 0.5
"""


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("sim")
    cfg = parse_config(SMALL_CFG)
    report = simulate(cfg, str(out))
    return cfg, out, report


class TestSimulate:
    def test_outputs_exist(self, small_run):
        _, out, report = small_run
        assert report.passed
        assert (out / "timeseries.csv").exists()
        assert (out / "summary.txt").exists()
        assert (out / "final.mhd2").exists()
        assert (out / "figures" / "timeseries.png").exists()
        assert (out / "checkpoint_t0.500.mhd2").exists()

    def test_csv_deterministic(self, small_run, tmp_path):
        cfg, out, _ = small_run
        simulate(cfg, str(tmp_path))
        a = (out / "timeseries.csv").read_bytes()
        b = (tmp_path / "timeseries.csv").read_bytes()
        assert a == b

    def test_resume_equivalence(self, small_run, tmp_path):
        cfg, out, _ = small_run
        # straight run to t = 1 already exists; resume from t = 0.5
        state, params = load_checkpoint(out / "checkpoint_t0.500.mhd2",
                                        expect_grid=cfg.grid())
        report = simulate(cfg, str(tmp_path), resume_state=state,
                          resume_params=params)
        assert report.passed
        resumed, _ = load_checkpoint(tmp_path / "final.mhd2")
        straight, _ = load_checkpoint(out / "final.mhd2")
        assert np.array_equal(resumed.coeff_stack(), straight.coeff_stack())
        assert resumed.time == straight.time


class TestCli:
    def test_simulate_requires_config(self, capsys):
        assert main(["simulate"]) == 2

    def test_missing_config_file(self):
        assert main(["simulate", "--config", "/nonexistent.cfg"]) == 2

    def test_invalid_config_reports_line(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("[diag]\nsigma = 0.9\n[run]\nt_end = 1\n")
        assert main(["simulate", "--config", str(bad)]) == 2
        err = capsys.readouterr().err
        assert "sigma" in err

    def test_simulate_end_to_end(self, tmp_path, capsys):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text(SMALL_CFG)
        out = tmp_path / "out"
        rc = main(["simulate", "--config", str(cfgfile), "--out", str(out)])
        assert rc == 0
        assert (out / "timeseries.csv").exists()
        assert "PASS" in capsys.readouterr().out

    def test_unknown_scenario_rejected(self):
        with pytest.raises(SystemExit):
            main(["frobnicate"])


def test_scenario_outputs_and_exit_line(tmp_path, capsys):
    # smallest real scenario: linear-modes at reduced kmax through the
    # library API, then the CSV shape
    from mhdbox.scenarios import linear_modes
    rep = linear_modes(str(tmp_path), kmax=2)
    assert rep.passed
    lines = (tmp_path / "damping_map.csv").read_text().strip().split("\n")
    assert lines[0] == "k1,k2,abscissa,kernel_dim"
    assert len(lines) == 1 + 24
    assert (tmp_path / "figures" / "damping_map.png").exists()
    # summary written by run_scenario only; write here explicitly
    from mhdbox.scenarios import _write_summary
    _write_summary(rep)
    assert "PASS" in (tmp_path / "summary.txt").read_text()
