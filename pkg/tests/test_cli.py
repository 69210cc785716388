import subprocess
import sys

import numpy as np
import pytest

from conftest import random_field
from polardirac.cli import OUT_ENV, main
from polardirac.sources import GridField, field_to_text


def write(tmp_path, text, name="run.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def max_line(out):
    return float([line for line in out.splitlines() if line.startswith("max,")][0].split(",")[1])


def test_equivalence_dim4(capsys):
    assert main(["equivalence", "--dim", "4", "--n", "1000", "--seed", "7", "--assert"]) == 0
    assert max_line(capsys.readouterr().out) < 1e-10


def test_rest_plane_wave_residuals_vanish(tmp_path, capsys):
    cfg = write(tmp_path, 'command = "residuals"\ndim = 4\n[field]\nkind = "plane-waves"\nmass = 1.3\n[[field.modes]]\np = [0.0, 0.0, 0.0]\n')
    assert main(["--config", cfg, "--n", "10"]) == 0
    out = capsys.readouterr().out
    assert max_line(out) < 1e-13
    assert "# system,residuals-4" in out


def test_assert_reports_residual_failure(capsys):
    assert main(["residuals", "--dim", "2", "--n", "5", "--tol", "1e-300", "--assert"]) == 1
    assert main(["residuals", "--dim", "2", "--n", "5", "--tol", "1e-300"]) == 0


def test_unknown_key_is_named(tmp_path, capsys):
    cfg = write(tmp_path, 'command = "residuals"\nbogus = 1\n')
    assert main(["--config", cfg]) == 2
    assert "unknown config key 'bogus'" in capsys.readouterr().err


@pytest.mark.parametrize(
    "text, needle",
    [
        ('command = "residuals"\n[field]\nmass = "heavy"\n', "field.mass"),
        ('command = "fly"\n', "unknown command"),
        ('command = "residuals"\ndim = 5\n', "dim"),
        ('command = "residuals"\n[em]\nB = 1.0\n', "em.B"),
        ('command = "residuals"\n[field]\nkind = "file"\n', "field.path"),
        ('command = "residuals\n', "malformed"),
    ],
)
def test_configuration_errors(tmp_path, capsys, text, needle):
    assert main(["--config", write(tmp_path, text)]) == 2
    assert needle in capsys.readouterr().err


def test_bad_flag_and_missing_file(capsys):
    assert main(["residuals", "--dim", "two"]) == 2
    assert main(["residuals", "--config", "/nonexistent/run.toml"]) == 2


def test_numerical_failure(tmp_path, capsys):
    cfg = write(tmp_path, 'command = "decompose"\ndim = 4\n[field]\nkind = "plane-waves"\n[[field.modes]]\np = [0.1, 0.0, 0.0]\namplitude = 0.0\n')
    assert main(["--config", cfg]) == 3
    assert "numerical failure" in capsys.readouterr().err


@pytest.mark.parametrize("command", ["decompose", "residuals", "conserve", "trajectories", "schrodinger"])
def test_outputs_are_byte_identical(tmp_path, capsys, command):
    extra = ["--n", "3"] if command != "schrodinger" else []
    cfg = write(tmp_path, "[trajectories]\nsteps = 40\ndtau = 0.01\n[schrodinger]\nsteps = 10\nextent = 8.0\nh = 0.05\n")
    runs = []
    for k in range(2):
        out = tmp_path / f"out{k}"
        assert main([command, "--dim", "2", "--seed", "5", "--out", str(out), "--config", cfg] + extra) == 0
        runs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert runs[0] == runs[1]
    assert f"{command}.csv" in runs[0]


def test_output_directory_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env"))
    assert main(["decompose", "--dim", "3", "--n", "4"]) == 0
    files = {p.name for p in (tmp_path / "env").iterdir()}
    assert files == {"decompose.csv", "decompose_points.csv"}
    # an explicit flag wins
    assert main(["decompose", "--dim", "3", "--n", "4", "--out", str(tmp_path / "flag")]) == 0
    assert (tmp_path / "flag" / "decompose.csv").exists()


def test_flags_override_config(tmp_path, capsys):
    cfg = write(tmp_path, 'command = "equivalence"\ndim = 3\nn = 2\nseed = 1\n')
    assert main(["--config", cfg, "--dim", "2"]) == 0
    out = capsys.readouterr().out
    assert "# system,equivalence-2" in out and "# n,2" in out


def _field_file(tmp_path, dim=2, h=0.02):
    f = random_field(dim, 8)
    g = GridField.sample(lambda x: f.evaluate(x)[0], -2 * h * np.ones(dim), np.full(dim, h), (5,) * dim)
    path = tmp_path / "field.txt"
    path.write_text(field_to_text(g, "dirac-1p1"))
    A0 = ", ".join(repr(float(a)) for a in f.A0)
    return path, f"[field]\nkind = \"file\"\npath = \"{path}\"\nmass = {f.mass}\n[em]\nq = {f.q}\nA0 = [{A0}]\n"


def test_field_file_input(tmp_path, capsys):
    _, table = _field_file(tmp_path)
    cfg = write(tmp_path, 'command = "residuals"\ndim = 2\n' + table)
    assert main(["--config", cfg, "--n", "9"]) == 0
    out = capsys.readouterr().out
    assert 0 < max_line(out) < 1e-3
    no_em = write(tmp_path, 'command = "residuals"\ndim = 4\n' + table.split("[em]")[0], "no_em.toml")
    assert main(["--config", no_em]) == 2
    assert "does not match dim" in capsys.readouterr().err
    assert main(["conserve", "--config", cfg]) == 2
    assert "not supported by 'conserve'" in capsys.readouterr().err


def test_schrodinger_writes_field_file(tmp_path, capsys):
    cfg = write(tmp_path, "[schrodinger]\nsteps = 5\nextent = 6.0\nh = 0.05\n")
    assert main(["schrodinger", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    text = (tmp_path / "o" / "schrodinger_field.txt").read_text()
    assert "# basis,schrodinger" in text
    assert (tmp_path / "o" / "schrodinger.csv").read_text().startswith("# system,schrodinger-madelung-1")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "polardirac", "equivalence", "--dim", "2", "--n", "5"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("# system,equivalence-2")
