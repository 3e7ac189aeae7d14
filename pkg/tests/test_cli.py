import csv
import os

import numpy as np
import pytest

from qgdmhd.cli import EXIT_CONFIG, EXIT_IO, main

SMOOTH_RUN = """
[scenario]
name = smooth

[grid]
d = 1
n = 32
extent = 1.0
boundary = periodic

[time]
t_end = 0.02
cfl = 0.4
scheme = rk2

[output]
directory = {out}
snapshot_every = 0
audit_every = 5
residuals = true
"""


def write_cfg(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_run_subcommand(tmp_path, capsys):
    out = tmp_path / "out"
    cfg = write_cfg(tmp_path, SMOOTH_RUN.format(out=out))
    assert main(["run", cfg]) == 0
    assert (out / "config_echo.ini").exists()
    assert (out / "snapshot_initial.txt").exists()
    assert (out / "snapshot_final.txt").exists()
    with open(out / "audit.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) >= 2
    mass = [float(r["mass"]) for r in rows]
    assert abs(mass[-1] - mass[0]) < 1e-12 * abs(mass[0])
    assert float(rows[-1]["resid_internal_energy"]) < 1.0
    assert "completed" in capsys.readouterr().out


def test_run_with_override(tmp_path):
    out = tmp_path / "out"
    cfg = write_cfg(tmp_path, SMOOTH_RUN.format(out=out))
    assert main(["run", cfg, "--override", "time.t_end=0.005",
                 "--override", f"output.directory={tmp_path / 'alt'}"]) == 0
    assert (tmp_path / "alt" / "snapshot_final.txt").exists()


def test_audit_subcommand(tmp_path, capsys):
    out = tmp_path / "out"
    cfg = write_cfg(tmp_path, SMOOTH_RUN.format(out=out))
    main(["run", cfg])
    capsys.readouterr()
    assert main(["audit", str(out / "snapshot_final.txt")]) == 0
    text = capsys.readouterr().out
    assert "max |div B|" in text
    assert "min Xi" in text
    assert "nonnegativity conditions hold = True" in text


def test_convergence_subcommand(tmp_path, capsys):
    out = tmp_path / "out"
    cfg = write_cfg(tmp_path, """
[scenario]
name = manufactured
seed = 3

[output]
directory = {out}
""".format(out=out))
    assert main(["convergence", cfg, "--levels", "16,32"]) == 0
    text = capsys.readouterr().out
    assert "internal_energy_balance" in text
    assert (out / "convergence.txt").exists()


def test_bad_config_exit_code(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "[limiter]\nkind = minmod\n")
    assert main(["run", cfg]) == EXIT_CONFIG
    assert main(["run", str(tmp_path / "missing.ini")]) == EXIT_CONFIG
    assert main(["convergence", cfg, "--levels", "16,x"]) == EXIT_CONFIG


def test_audit_io_exit_code(tmp_path, capsys):
    assert main(["audit", str(tmp_path / "missing.txt")]) == EXIT_IO


def test_audit_without_regularization_metadata(tmp_path, capsys):
    from qgdmhd.eos import IdealGas
    from qgdmhd.grid import Grid
    from qgdmhd.io import write_snapshot
    from qgdmhd.scenarios import smooth_state
    g = Grid(shape=(16,), extent=(1.0,))
    path = str(tmp_path / "bare.txt")
    write_snapshot(path, smooth_state(g, IdealGas()), IdealGas())
    assert main(["audit", path]) == EXIT_CONFIG
