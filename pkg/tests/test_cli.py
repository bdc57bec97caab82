import math

import numpy as np
import pytest

from nsexact import cli
from nsexact import eigen as E


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    return [line.split(",") for line in text.strip().splitlines()[1:]]


def test_eigen_ball(capsys):
    code, out, _ = run(capsys, "eigen", "ball", "--radius", "1", "--count", "3")
    assert code == 0
    vals = [float(row[1]) for row in table(out)]
    assert np.allclose(vals, [math.pi, 2 * math.pi, 3 * math.pi], rtol=0, atol=1e-14)


def test_eigen_disc(capsys):
    code, out, _ = run(capsys, "eigen", "disc", "--radius", "1", "--count", "1")
    assert code == 0 and float(table(out)[0][1]) == pytest.approx(2.404825557695773, abs=1e-14)


def test_eigen_annulus_against_shooting(capsys, tmp_path):
    code, out, _ = run(capsys, "eigen", "annulus", "--r1", "1", "--r2", "2", "--bc", "dirichlet",
                       "--count", "2", "--output", str(tmp_path / "e.csv"))
    assert code == 0
    vals = [float(row[1]) for row in table(out)]
    ref = E.shooting_eigenvalues(E.AnnulusSpec(1.0, 2.0), E.SeparatedBC.dirichlet(), 2)
    assert np.max(np.abs(np.array(vals) - ref)) < 1e-8
    assert (tmp_path / "e.csv").read_text() == out


def test_exit_codes_for_bad_input(capsys):
    assert run(capsys, "eigen", "annulus", "--bc", "K:2,1,1,2")[0] == 2
    assert run(capsys, "eigen", "ball", "--radius", "-1")[0] == 2
    assert run(capsys, "eigen", "torus")[0] == 2
    assert run(capsys, "eigen", "annulus", "--count", "50", "--zeta-max", "5")[0] == 3


def test_verify_pass_and_negative_control(capsys, tmp_path):
    args = ["verify", "--flow", "radial", "--lam", "1", "--beta", "0", "--nu", "0.5",
            "--samples", "40", "--outdir", str(tmp_path)]
    code, out, _ = run(capsys, *args)
    assert code == 0 and "passed = True" in out
    assert (tmp_path / "report.txt").exists() and (tmp_path / "report.csv").exists()
    code, _, err = run(capsys, *args, "--corrupt-pressure")
    assert code == 1 and "momentum" in err


def test_verify_zero_flow(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--flow", "zero", "--samples", "10", "--outdir", str(tmp_path))
    assert code == 0
    maxima = [float(line.split("=")[1]) for line in out.splitlines() if ".max_abs" in line]
    assert maxima and all(v == 0.0 for v in maxima)


def test_tolerance_recorded(capsys, tmp_path):
    run(capsys, "verify", "--flow", "radial", "--samples", "10", "--tolerance", "1e-7",
        "--outdir", str(tmp_path))
    assert "tolerance = 1e-07" in (tmp_path / "report.txt").read_text()


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("# demo\nflow = radial\nnu = 0.2\n[verify]\nsamples = 12\n")
    code, out, _ = run(capsys, "verify", "--config", str(cfg), "--outdir", str(tmp_path))
    assert code == 0 and "nu = 0.2" in out and "samples = 12" in out
    code, out, _ = run(capsys, "verify", "--config", str(cfg), "--nu", "0.3", "--outdir", str(tmp_path))
    assert "nu = 0.3" in out
    bad = tmp_path / "bad.ini"
    bad.write_text("bogus = 1\n")
    code, _, err = run(capsys, "verify", "--config", str(bad))
    assert code == 2 and "bogus" in err
    assert run(capsys, "verify", "--config", str(tmp_path / "missing.ini"))[0] == 2


def test_outdir_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTDIR_ENV, str(tmp_path / "env"))
    assert run(capsys, "construct", "--flow", "disc", "--eta", "1")[0] == 0
    assert "tag = Y_E" in (tmp_path / "env" / "construct.txt").read_text()


def test_pathlimit(capsys, tmp_path):
    code, out, _ = run(capsys, "pathlimit", "--flow", "radial", "--omega", "0.1,1.0", "--probes", "20",
                       "--outdir", str(tmp_path))
    assert code == 0 and "double limit does not exist" in out
    code, out, _ = run(capsys, "pathlimit", "--flow", "radial", "--omega", "0.5", "--probes", "20",
                       "--outdir", str(tmp_path))
    assert code == 0 and "undetermined" in out
    assert run(capsys, "pathlimit", "--flow", "radial", "--probes", "5")[0] == 2


def test_pathlimit_gaussian_swirl(capsys, tmp_path):
    code, out, _ = run(capsys, "pathlimit", "--flow", "swirl-heat", "--nu", "1", "--omega", "0.2",
                       "--schedule", "10,1000", "--probes", "5", "--outdir", str(tmp_path))
    assert code == 0
    dev = float(next(line for line in out.splitlines() if line.startswith("max_deviation")).split("=")[1])
    assert dev <= 1e-8


def test_export_zero_flow(capsys, tmp_path):
    code, _, _ = run(capsys, "export", "--flow", "zero", "--resolution", "2,2,2", "--outdir", str(tmp_path))
    assert code == 0
    lines = (tmp_path / "field_000.csv").read_text().splitlines()
    assert lines[0] == ",".join(cli.CSV_COLUMNS) and len(lines) == 9
    for line in lines[1:]:
        assert all(float(v) == 0.0 for v in line.split(",")[4:])


def test_export_decay_halves_velocity(capsys, tmp_path):
    nu, lam = 0.5, 1.0
    t2 = math.log(2.0) / (nu * lam ** 2)
    run(capsys, "export", "--flow", "radial", "--nu", str(nu), "--times", f"0.0,{t2!r}",
        "--resolution", "3,3,3", "--outdir", str(tmp_path))
    a = np.loadtxt(tmp_path / "field_000.csv", delimiter=",", skiprows=1)
    b = np.loadtxt(tmp_path / "field_001.csv", delimiter=",", skiprows=1)
    assert np.allclose(b[:, 4:7], 0.5 * a[:, 4:7], rtol=1e-14, atol=1e-17)


def test_export_masks_and_determinism(capsys, tmp_path):
    args = ["export", "--flow", "radial", "--beta", "1", "--r-min", "0.5", "--resolution", "3,3,3"]
    code, _, err = run(capsys, *args, "--outdir", str(tmp_path / "a"))
    assert code == 0 and "1 grid point(s)" in err
    run(capsys, *args, "--outdir", str(tmp_path / "b"), "--workers", "3")
    a = (tmp_path / "a" / "field_000.csv").read_bytes()
    assert a == (tmp_path / "b" / "field_000.csv").read_bytes()
    assert len(a.splitlines()) == 27


def test_export_vtk(capsys, tmp_path):
    run(capsys, "export", "--flow", "swirl", "--phi", "rigid", "--format", "vtk", "--resolution", "3,2,2",
        "--outdir", str(tmp_path))
    text = (tmp_path / "field_000.vtk").read_text().splitlines()
    assert text[0].startswith("# vtk DataFile") and "DIMENSIONS 3 2 2" in text
    assert "POINT_DATA 12" in text and "VECTORS u double" in text
