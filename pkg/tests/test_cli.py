import json
import math
import subprocess
import sys

import pytest

from rmprop.cli import read_config_file, run


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    lines = text.splitlines()
    header = lines[0].split(",")
    return header, [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_potential_default(capsys):
    code, out, err = invoke(capsys, "potential", "--l", "2", "--chi-steps", "3")
    assert code == 0 and err == ""
    header, rows = parse_csv(out)
    assert header == ["chi", "V", "cot_term", "barrier"]
    mid = rows[1]
    assert float(mid["chi"]) == pytest.approx(math.pi / 2)
    assert float(mid["cot_term"]) == pytest.approx(0.0, abs=1e-12)
    assert float(mid["V"]) == pytest.approx(float(mid["barrier"]))
    assert float(mid["barrier"]) == pytest.approx(6.0)


def test_potential_l0_barrier_zero(capsys):
    code, out, _ = invoke(capsys, "potential", "--chi-min", "0.1", "--chi-max", "3.0")
    assert code == 0
    _, rows = parse_csv(out)
    assert len(rows) == 99
    assert all(float(r["barrier"]) == 0.0 for r in rows)


def test_potential_endpoint_exit_3(capsys):
    code, out, err = invoke(capsys, "potential", "--chi-min", "0", "--chi-max", "1")
    assert code == 3
    assert out == ""
    assert "chi endpoint" in err


def test_invalid_param_exit_2(capsys):
    code, out, err = invoke(capsys, "potential", "--kappa", "-1")
    assert code == 2 and "kappa" in err and out == ""


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        run(["propagator", "--format", "xml"])
    assert info.value.code == 2


def test_propagator_columns_and_q0(capsys):
    code, out, _ = invoke(capsys, "propagator", "--q-steps", "5")
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["q", "x", "Pi_closed", "Pi_over_c"]
    assert float(rows[0]["Pi_closed"]) == 1.0
    assert float(rows[0]["Pi_over_c"]) == 0.5
    assert "nan" not in out.lower()


def test_propagator_verify(capsys):
    code, out, err = invoke(capsys, "propagator", "--verify")
    assert code == 0
    header, rows = parse_csv(out)
    assert header[-3:] == ["Pi_north", "Pi_south", "abs_err"]
    assert len(rows) == 129
    assert max(float(r["abs_err"]) for r in rows) <= 1e-8
    assert "max abs_err" in err


def test_propagator_south(capsys):
    _, north, _ = invoke(capsys, "propagator", "--verify", "--q-steps", "9")
    code, south, _ = invoke(capsys, "propagator", "--verify", "--q-steps", "9", "--hemisphere", "south")
    assert code == 0
    for n, s in zip(parse_csv(north)[1], parse_csv(south)[1]):
        assert float(s["Pi_closed"]) == pytest.approx(-float(n["Pi_closed"]), abs=1e-15)
        assert float(s["Pi_south"]) == pytest.approx(-float(n["Pi_north"]), abs=2e-8)
        assert float(s["abs_err"]) <= 1e-8


def test_propagator_verify_failure_exit_4(capsys, monkeypatch):
    import rmprop.momentum as mom

    monkeypatch.setattr(mom, "SIGN_CONVENTION", 1)
    code, out, err = invoke(capsys, "propagator", "--verify", "--q-steps", "3", "--q-max", "1")
    assert code == 4
    assert "max abs_err" in err
    assert out.startswith("q,x,")


def test_fig1_surface(capsys):
    code, out, _ = invoke(capsys, "fig1", "--kappas", "0.5,1,2", "--q-steps", "33")
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["kappa", "q", "Pi"]
    assert len(rows) == 3 * 33
    q0 = {float(r["kappa"]): float(r["Pi"]) for r in rows if float(r["q"]) == 0.0}
    assert q0 == {0.5: 2.0, 1.0: 1.0, 2.0: 0.5}
    assert all(math.isfinite(float(r["Pi"])) for r in rows)


def test_fig1_south_mirrors(capsys):
    _, north, _ = invoke(capsys, "fig1", "--q-steps", "9")
    _, south, _ = invoke(capsys, "fig1", "--q-steps", "9", "--hemisphere", "south")
    for n, s in zip(parse_csv(north)[1], parse_csv(south)[1]):
        assert float(s["Pi"]) == -float(n["Pi"])


def test_spectrum_free(capsys):
    code, out, _ = invoke(capsys, "spectrum", "--G", "0", "--chi-steps", "800", "--k-max", "2")
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["l", "level_index", "n", "eigenvalue", "spread"]
    for r in rows:
        assert float(r["eigenvalue"]) == pytest.approx(int(r["n"]) ** 2, rel=1e-3)


def test_spectrum_coupled(capsys):
    code, out, err = invoke(capsys, "spectrum")
    assert code == 0
    _, rows = parse_csv(out)
    assert max(float(r["spread"]) for r in rows) < 1e-3
    assert len(rows) == 10


def test_spectrum_threshold_violation_exit_4(capsys):
    code, out, _ = invoke(capsys, "spectrum", "--chi-steps", "64", "--no-extrapolate",
                          "--threshold", "1e-6")
    assert code == 4
    assert out.startswith("l,level_index")


def test_spectrum_too_many_levels_exit_2(capsys):
    code, _, err = invoke(capsys, "spectrum", "--chi-steps", "40", "--n-levels", "11")
    assert code == 2 and "n_levels" in err


def test_spectrum_solver_failure_exit_5(capsys, monkeypatch):
    import rmprop.operators as ops

    def broken(*a, **k):
        raise ops.LinAlgError("boom")

    monkeypatch.setattr(ops, "eigh_tridiagonal", broken)
    code, _, err = invoke(capsys, "spectrum", "--chi-steps", "64")
    assert code == 5 and "solver" in err


def test_harmonic_default(capsys):
    code, out, _ = invoke(capsys, "harmonic")
    assert code == 0
    header, rows = parse_csv(out)
    assert header == ["n_points", "residual", "observed_order"]
    residuals = [float(r["residual"]) for r in rows]
    assert residuals == sorted(residuals, reverse=True)
    assert rows[0]["observed_order"] == ""
    assert float(rows[-1]["observed_order"]) >= 1.9


def test_harmonic_single_grid_exit_2(capsys):
    code, _, err = invoke(capsys, "harmonic", "--grids", "200")
    assert code == 2 and "grids" in err


def test_harmonic_order_failure_exit_4(capsys):
    code, _, _ = invoke(capsys, "harmonic", "--grids", "200,400", "--min-order", "1.9")
    assert code == 4


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# natural units except curvature\nkappa = 4\nq-steps = 3\nG = 2\n")
    _, out, _ = invoke(capsys, "propagator", "--config", str(cfg), "--G", "1")
    _, rows = parse_csv(out)
    assert len(rows) == 3
    assert float(rows[0]["Pi_closed"]) == pytest.approx(0.25)  # c/2 with G=1, kappa=4


def test_bad_config_file_exit_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("kappa: 4\n")
    code, _, err = invoke(capsys, "propagator", "--config", str(cfg))
    assert code == 2
    cfg.write_text("bogus = 1\n")
    code, _, err = invoke(capsys, "propagator", "--config", str(cfg))
    assert code == 2 and "bogus" in err
    code, _, _ = invoke(capsys, "propagator", "--config", str(tmp_path / "missing.cfg"))
    assert code == 2


def test_json_schema(capsys):
    code, out, _ = invoke(capsys, "propagator", "--format", "json", "--q-steps", "4", "--verify")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"config", "rows"}
    assert doc["config"]["command"] == "propagator"
    assert doc["config"]["params"] == {"hbar": 1.0, "mu": 0.5, "G": 1.0, "kappa": 1.0, "l": 0}
    assert doc["config"]["options"]["verify"] is True
    assert list(doc["rows"][0]) == ["q", "x", "Pi_closed", "Pi_over_c", "Pi_north", "Pi_south", "abs_err"]
    assert doc["rows"][0]["Pi_closed"] == 1.0


@pytest.mark.parametrize("command", ["potential", "propagator", "fig1", "harmonic"])
def test_json_round_trip_as_fixture(command, tmp_path, capsys):
    first = tmp_path / "first.json"
    code, _, _ = invoke(capsys, command, "--format", "json", "--out", str(first), "--kappa", "2.5")
    assert code == 0
    assert read_config_file(first)["kappa"] == 2.5
    code, out, _ = invoke(capsys, command, "--config", str(first))
    assert code == 0
    assert out == first.read_text()
    doc = json.loads(out)
    assert json.loads(json.dumps(doc)) == doc


def test_csv_line_endings_and_precision(capsys):
    _, out, _ = invoke(capsys, "propagator", "--q-steps", "3", "--q-max", "3.14159265358979")
    assert "\r" not in out and out.endswith("\n")
    value = out.splitlines()[2].split(",")[2]
    assert len(value.replace(".", "").lstrip("0")) <= 12


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rmprop", "propagator", "--q-steps", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("q,x,Pi_closed,Pi_over_c\n")
