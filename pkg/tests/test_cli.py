import subprocess
import sys

import pytest

from backsec.cli import CSV_HEADER, main
from backsec.config import RunConfig, dump_config, parse_config
from backsec.errors import ConfigError


def test_config_round_trip_and_comments():
    text = "# comment\nalpha = 0.4  # trailing\nschemes = general, no_an\nswept_values = 1, 2\n\nstep_memory = false\n"
    cfg = parse_config(text)
    assert cfg.alpha == 0.4 and cfg.schemes == ("general", "no_an")
    assert cfg.swept_values == (1.0, 2.0) and cfg.step_memory is False
    assert parse_config(dump_config(cfg)) == cfg


def test_config_rejects_unknown_key_by_name():
    with pytest.raises(ConfigError, match="'colour'"):
        parse_config("colour = blue\n")
    with pytest.raises(ConfigError, match="bad value for alpha"):
        parse_config("alpha = lots\n")
    with pytest.raises(ConfigError, match="alpha"):
        parse_config("alpha = 3\n")
    with pytest.raises(ConfigError, match="expected"):
        parse_config("just words\n")


def test_config_defaults_are_standard_setting():
    p = RunConfig().system_params()
    assert (p.m_tx, p.n_rx, p.l_tag, p.k_eve) == (3, 2, 2, 3)
    assert p.total_power == pytest.approx(0.01) and p.sigma2_eve == pytest.approx(1e-5)


def _value(out, key):
    for line in out.splitlines():
        if line.startswith(key + ":"):
            return float(line.split(":")[1])
    raise KeyError(key)


def test_solve_no_an(capsys):
    assert main(["solve", "--scheme", "no_an", "--p-dbm", "10", "--seed", "7"]) == 0
    assert _value(capsys.readouterr().out, "secrecy_rate_bps_hz") >= 0


def test_solve_reports_dimension_error(capsys):
    assert main(["solve", "--scheme", "nbs_an", "--m", "2", "--l", "2"]) == 2
    assert "M > L" in capsys.readouterr().err


def test_solve_general_dominates_no_an(capsys, tmp_path):
    dump = tmp_path / "lam.csv"
    assert main(["solve", "--scheme", "general", "--seed", "3", "--dump-solution", str(dump)]) == 0
    gen = _value(capsys.readouterr().out, "secrecy_rate_bps_hz")
    assert main(["solve", "--scheme", "no_an", "--seed", "3"]) == 0
    no = _value(capsys.readouterr().out, "secrecy_rate_bps_hz")
    assert gen >= no - 1e-9
    rows = dump.read_text().splitlines()
    assert len(rows) == 3 and all(len(r.split(",")) == 6 for r in rows)


def test_solve_bad_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("bogus_key = 1\n")
    assert main(["solve", "--config", str(cfg)]) == 2
    assert "bogus_key" in capsys.readouterr().err
    assert main(["solve", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_sweep_rows_and_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep", "--trials", "2", "--values", "0,10", "--schemes", "nsi_an"]
    assert main(args + ["-o", str(a)]) == 0
    assert main(args + ["-o", str(b), "--threads", "2"]) == 0
    lines = a.read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 3
    assert a.read_bytes() == b.read_bytes()


def test_sweep_alpha_axis_nbs_constant(tmp_path):
    out = tmp_path / "alpha.csv"
    cfg = tmp_path / "alpha.cfg"
    cfg.write_text("swept_name = alpha\nswept_values = 0, 0.5, 1\ntrials = 3\nschemes = nbs_an\n")
    assert main(["sweep", "--config", str(cfg), "-o", str(out)]) == 0
    means = [float(r.split(",")[3]) for r in out.read_text().splitlines()[1:]]
    assert max(means) - min(means) <= 1e-9


def test_sweep_unwritable_path(tmp_path):
    assert main(["sweep", "--trials", "1", "-o", str(tmp_path / "nope" / "x.csv")]) == 2


def test_validate_suite_exit_code(capsys):
    assert main(["validate", "--suite", "equivalence"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "backsec", "solve", "--scheme", "no_an"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0 and "secrecy_rate_bps_hz" in res.stdout
