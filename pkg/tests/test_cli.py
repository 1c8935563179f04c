import csv
import io
import math
import re
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from thermo_neutral.cli import (
    HORSESHOE_COLUMNS,
    MMRNE_COLUMNS,
    PRESSURE_COLUMNS,
    VERIFY_COLUMNS,
    fmt,
    run,
)
from thermo_neutral.config import parse_config, parse_number
from thermo_neutral import cli
from thermo_neutral.errors import ConfigError, NoConvergence, PositivityViolated, TargetOutOfRange

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
FLOAT_17 = re.compile(r"^-?\d\.\d{16}(e[+-]\d+)?$|^-?\d+(\.\d+)?(e[+-]\d+)?$|^nan$|^-?inf$")


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def run_to(tmp_path, command, cfg_path, *extra, name="out.csv"):
    out = tmp_path / name
    code = run([command, "--config", str(cfg_path), "--out", str(out), *extra])
    return code, out


def read_rows(path):
    text = Path(path).read_text()
    return list(csv.DictReader(io.StringIO(text))), text


class TestFormatting:
    def test_fmt(self):
        assert fmt(0.1) == "0.10000000000000001"
        assert fmt(math.log(2)) == "0.69314718055994529"
        assert fmt(True) == "true" and fmt(np.bool_(False)) == "false"
        assert fmt(3) == "3" and fmt("family") == "family"

    def test_parse_number(self):
        assert parse_number("exp(-1)") == math.exp(-1)
        assert parse_number("0.9703 ** 117") == 0.9703**117
        assert parse_number(" 2.5 ") == 2.5


class TestConfig:
    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="line 2: unknown key"):
            parse_config("r = 1\nbogus.key = 3\n")

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="line 3: duplicate key"):
            parse_config("r = 1\n# comment\nr = 2\n")

    def test_missing_equals(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_config("system.kind horseshoe\n")

    def test_bad_adjacency_row(self):
        text = "system.kind = sft\nsystem.adjacency = 1 1; 1 2\nsystem.phi_u = 1, 2\nsystem.phi_s = -1, -2\n"
        with pytest.raises(ConfigError, match=r"line 2: .*row 1"):
            parse_config(text)

    def test_empty_row(self):
        text = "system.kind = sft\nsystem.adjacency = 1 0; 0 0\nsystem.phi_u = 1, 2\nsystem.phi_s = -1, -2\n"
        with pytest.raises(ConfigError, match=r"line 2: .*row 1"):
            parse_config(text)

    def test_invalid_horseshoe(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_config("system.kind = horseshoe\nsystem.eta1 = 0.6\nsystem.eta2 = 0.5\n")

    def test_invalid_theta(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config("r = 1\nmetric.theta = 1.5\n")

    def test_negative_r(self):
        cfg = parse_config("r.grid = 0, -1\n")
        with pytest.raises(ConfigError, match="line 1"):
            cfg.r_values()

    def test_depth_two_potential(self):
        cfg = parse_config(
            "system.kind = sft\nsystem.adjacency = 1 1; 1 1\n"
            "system.phi_u = 1 2; 3 4\nsystem.phi_s = -1, -2\n"
        )
        assert cfg.system.phi_u.depth == 2 and cfg.system.phi_s.depth == 1


class TestPressure:
    def test_nine_rows(self, tmp_path):
        code, out = run_to(tmp_path, "pressure", CONFIGS / "horseshoe_pressure.cfg")
        assert code == 0
        rows, text = read_rows(out)
        assert text.splitlines()[0] == ",".join(PRESSURE_COLUMNS)
        assert len(rows) == 9
        origin = [r for r in rows if float(r["p"]) == 0 and float(r["q"]) == 0]
        assert abs(float(origin[0]["Q"]) - math.log(2)) < 1e-12
        assert all(float(r["residual_u"]) < 1e-6 and float(r["residual_s"]) < 1e-6 for r in rows)
        # lexicographic grid order
        assert [(float(r["p"]), float(r["q"])) for r in rows] == sorted((float(r["p"]), float(r["q"])) for r in rows)

    def test_malformed_adjacency_exit_code(self, tmp_path, capsys):
        cfg = write(tmp_path, "system.kind = sft\nsystem.adjacency = 1 1; 1 x\nsystem.phi_u = 1, 2\nsystem.phi_s = -1, -2\n")
        code, _ = run_to(tmp_path, "pressure", cfg)
        assert code == 2
        err = capsys.readouterr().err
        assert "line 2" in err and "row 1" in err

    def test_missing_system(self, tmp_path):
        cfg = write(tmp_path, "r = 1\n")
        assert run_to(tmp_path, "pressure", cfg)[0] == 2

    def test_missing_file(self, tmp_path):
        assert run(["pressure", "--config", str(tmp_path / "nope.cfg")]) == 2

    def test_stdout_when_no_out(self, tmp_path, capsys):
        code = run(["pressure", "--config", str(CONFIGS / "horseshoe_pressure.cfg")])
        assert code == 0
        assert capsys.readouterr().out.startswith("p,q,Q,")


class TestMmrne:
    def test_symmetric_horseshoe_family(self, tmp_path):
        cfg = write(
            tmp_path,
            "system.kind = horseshoe\nsystem.eta1 = 0.4\nsystem.eta2 = 0.4\nmmrne.mode = family\nr.grid = 0, 0.1, 1, 10\n",
        )
        code, out = run_to(tmp_path, "mmrne", cfg)
        assert code == 0
        rows, text = read_rows(out)
        assert text.splitlines()[0] == ",".join(MMRNE_COLUMNS)
        assert [float(r["r"]) for r in rows] == [0, 0.1, 1, 10]
        assert all(float(r["p"]) == 0 and float(r["q"]) == 0 for r in rows)
        assert all(r["edge_hit"] == "false" for r in rows)

    def test_reference_two_maximizers(self, tmp_path):
        code, out = run_to(tmp_path, "mmrne", CONFIGS / "reference_mmrne.cfg")
        assert code == 0
        rows, _ = read_rows(out)
        by_r = {float(r["r"]): r for r in rows}
        assert by_r[3.0]["multiple_maximizers"] == "true" and by_r[3.0]["n_maximizers"] == "2"
        assert by_r[1.0]["multiple_maximizers"] == "false"
        hr = np.array([float(r["hr_max"]) for r in rows])
        rs = np.array([float(r["r"]) for r in rows])
        assert np.all(np.diff(hr) > 0)
        # convexity on the nonuniform grid: slopes nondecreasing
        slopes = np.diff(hr) / np.diff(rs)
        assert np.all(np.diff(slopes) >= -1e-9)

    def test_bad_mode(self, tmp_path):
        cfg = write(tmp_path, "system.kind = horseshoe\nsystem.eta1 = 0.4\nsystem.eta2 = 0.2\nmmrne.mode = magic\nr = 1\n")
        assert run_to(tmp_path, "mmrne", cfg)[0] == 2

    def test_golden_family(self, tmp_path):
        code, out = run_to(tmp_path, "mmrne", CONFIGS / "golden_mmrne.cfg")
        assert code == 0
        rows, _ = read_rows(out)
        assert abs(float(rows[0]["h"]) - math.log((1 + math.sqrt(5)) / 2)) < 1e-8


class TestVerify:
    def test_uniform(self, tmp_path):
        code, out = run_to(tmp_path, "verify", CONFIGS / "uniform_verify.cfg")
        assert code == 0
        rows, text = read_rows(out)
        assert text.splitlines()[0] == ",".join(VERIFY_COLUMNS)
        assert float(rows[0]["mean"]) == pytest.approx(3 * math.log(2), rel=1e-14)
        assert float(rows[0]["stddev"]) == pytest.approx(0.0, abs=1e-13)

    def test_parry(self, tmp_path):
        code, out = run_to(tmp_path, "verify", CONFIGS / "parry_verify.cfg")
        assert code == 0
        rows, _ = read_rows(out)
        mean, pred = float(rows[0]["mean"]), float(rows[0]["predicted"])
        assert abs(mean - pred) / pred < 0.02

    def test_seed_override_changes_output(self, tmp_path):
        _, a = run_to(tmp_path, "verify", CONFIGS / "parry_verify.cfg", name="a.csv")
        _, b = run_to(tmp_path, "verify", CONFIGS / "parry_verify.cfg", "--seed", "99", name="b.csv")
        assert a.read_bytes() != b.read_bytes()

    def test_missing_theta(self, tmp_path):
        cfg = write(tmp_path, "verify.measure = bernoulli\nverify.weights = 0.5, 0.5\nr = 1\nn = 10\n")
        assert run_to(tmp_path, "verify", cfg)[0] == 2


class TestHorseshoeDemo:
    def test_summary_and_rows(self, tmp_path, capsys):
        code, out = run_to(tmp_path, "horseshoe", CONFIGS / "reference_horseshoe.cfg")
        assert code == 0
        summary = capsys.readouterr().out
        rows, text = read_rows(out)
        assert text.splitlines()[0] == ",".join(HORSESHOE_COLUMNS)
        r0, r3 = rows
        assert r0["n_maximizers"] == "1" and float(r0["p_star"]) == pytest.approx(0.5, abs=1e-10)
        assert float(r0["second_derivative"]) == -4.0
        assert r3["n_maximizers"] == "2" and float(r3["first_derivative"]) == 0.0
        assert float(r3["second_derivative"]) == pytest.approx(0.58, abs=0.005)
        assert abs(float(r3["p_star"]) + float(r3["p_mirror"]) - 1) < 1e-10
        assert float(r3["hr_star"]) > float(r3["hr_half"])
        assert "d2/dp2 h^r(1/2) = 0.583184" in summary
        assert "critical r = 2.61826" in summary

    def test_defaults_without_config_values(self, tmp_path):
        cfg = write(tmp_path, "# all defaults\n")
        code, out = run_to(tmp_path, "horseshoe", cfg)
        assert code == 0
        assert [float(r["r"]) for r in read_rows(out)[0]] == [0.0, 3.0]


@pytest.mark.parametrize(
    "command,cfg",
    [
        ("pressure", "horseshoe_pressure.cfg"),
        ("mmrne", "reference_mmrne.cfg"),
        ("verify", "parry_verify.cfg"),
        ("horseshoe", "reference_horseshoe.cfg"),
    ],
)
def test_byte_identical_and_17_digits(tmp_path, command, cfg):
    _, a = run_to(tmp_path, command, CONFIGS / cfg, name="a.csv")
    _, b = run_to(tmp_path, command, CONFIGS / cfg, name="b.csv")
    data = a.read_bytes()
    assert data == b.read_bytes()
    assert b"\r" not in data and data.endswith(b"\n")
    rows = list(csv.reader(io.StringIO(data.decode())))
    for row in rows[1:]:
        for cell in row:
            if cell in ("true", "false", "family", "bernoulli"):
                continue
            assert FLOAT_17.match(cell), cell
            if "." in cell or "e" in cell:
                assert float(format(float(cell), ".17g")) == float(cell)


def test_threads_env_var(tmp_path, monkeypatch):
    _, a = run_to(tmp_path, "mmrne", CONFIGS / "reference_mmrne.cfg", name="a.csv")
    monkeypatch.setenv("THERMO_NEUTRAL_THREADS", "2")
    _, b = run_to(tmp_path, "mmrne", CONFIGS / "reference_mmrne.cfg", name="b.csv")
    assert a.read_bytes() == b.read_bytes()


def test_bad_threads_env(tmp_path, monkeypatch):
    monkeypatch.setenv("THERMO_NEUTRAL_THREADS", "many")
    assert run(["mmrne", "--config", str(CONFIGS / "reference_mmrne.cfg")]) == 2


def test_empty_grid_axis(tmp_path):
    cfg = write(tmp_path, "system.kind = horseshoe\nsystem.eta1 = 0.4\nsystem.eta2 = 0.2\ngrid.p.n = 0\n")
    assert run_to(tmp_path, "pressure", cfg)[0] == 2


def test_console_script_entry_point(tmp_path):
    out = tmp_path / "o.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "thermo_neutral.cli", "horseshoe", "--config", str(CONFIGS / "reference_horseshoe.cfg"), "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().startswith("r,first_derivative")


@pytest.mark.parametrize(
    "exc,code",
    [(NoConvergence("stuck"), 3), (TargetOutOfRange("outside"), 4), (PositivityViolated("h < 0"), 4)],
)
def test_error_exit_codes(tmp_path, monkeypatch, exc, code):
    def boom(cfg, seed=None, threads=1):
        raise exc

    monkeypatch.setitem(cli.COMMANDS, "pressure", boom)
    assert run_to(tmp_path, "pressure", CONFIGS / "horseshoe_pressure.cfg")[0] == code
