import json

import pytest

from clifford_doubling import cli


def _cfg(tmp_path, body):
    p = tmp_path / "run.toml"
    p.write_text(body)
    return str(p)


BASIC = """
[construction]
m = 6
n_theta = 64

[solve]
max_iter = 10

[output]
deterministic = true
"""


def test_config_errors(tmp_path, capsys):
    assert cli.main(["check", str(tmp_path / "missing.toml")]) == 4
    assert cli.main(["check", _cfg(tmp_path, "[construction\nm=")]) == 4
    assert cli.main(["check", _cfg(tmp_path, "[bogus]\nx=1\n")]) == 4
    assert cli.main(["check", _cfg(tmp_path, "[construction]\nm = 6\nfoo = 1\n")]) == 4
    assert cli.main(["construct", _cfg(tmp_path, "[construction]\nzeta = 0.0\n")]) == 4
    assert cli.main(["construct", "--m", "2"]) == 4
    assert cli.main(["check", "--m", "6", "notasuite"]) == 4
    assert cli.main(["frobnicate"]) == 4


def test_parse_m_range():
    assert cli.parse_m_range("4..7") == [4, 5, 6, 7]
    assert cli.parse_m_range("8,10") == [8, 10]
    with pytest.raises(cli.ConfigError):
        cli.parse_m_range("a..b")


def test_flags_override_config(tmp_path):
    cfg = cli.load_config(_cfg(tmp_path, BASIC))
    args = cli.build_parser().parse_args(["construct", "--m", "8", "--zeta", "0.5"])
    p = cli.params_from_config(cli._merge_flags(cfg, args))
    assert p.m == 8 and p.zeta == 0.5 and p.n_theta == 64


def test_construct_writes_outputs(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.main(["construct", _cfg(tmp_path, BASIC), "--out", str(out)]) == 0
    d = json.loads((out / "construct.json").read_text())
    assert d["schema_version"] == "1.0"
    assert d["embeddedness"]["genus"] == 37
    assert (out / "initial.obj").exists()


def test_check_ambient_passes(capsys):
    assert cli.main(["check", "--m", "6", "ambient"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["passed"] and "ambient" in d["sections"]


def test_check_construction_reports_failure(capsys):
    # the bound needs m tau small; at m = 4 and zeta = 1 it fails
    assert cli.main(["check", "--m", "6", "construction", "--m-range", "4..5"]) == 2
    assert cli.main(["check", "--m", "6", "construction", "--m-range", "6..8"]) == 0


def test_force_and_spectrum_tables(tmp_path, capsys):
    out = tmp_path / "o"
    cli.main(["force", "--m", "8", "--out", str(out)])
    assert (out / "forces.csv").exists()
    cli.main(["spectrum", "--m", "6", "--out", str(out), "--k", "4"])
    assert (out / "spectrum.csv").read_text().count("\n") == 5


def test_solve_and_export_deterministic(tmp_path, capsys):
    cfg = _cfg(tmp_path, BASIC)
    codes = [cli.main(["solve", cfg, "--out", str(tmp_path / f"r{i}")]) for i in range(2)]
    assert codes == [0, 0]
    a = (tmp_path / "r0" / "solve.json").read_bytes()
    b = (tmp_path / "r1" / "solve.json").read_bytes()
    assert a == b
    assert (tmp_path / "r0" / "convergence.csv").exists()
    assert cli.main(["export", cfg, "--out", str(tmp_path / "e")]) == 0
    assert (tmp_path / "e" / "surface.obj").exists() and (tmp_path / "e" / "vertices.csv").exists()
