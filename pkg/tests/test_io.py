import csv

import numpy as np
import pytest

from qgdmhd.errors import ConfigurationError
from qgdmhd.eos import IdealGas
from qgdmhd.grid import Grid
from qgdmhd.io import AUDIT_COLUMNS, AuditWriter, read_snapshot, write_snapshot
from qgdmhd.regularization import CoefficientLaw, RegParams
from qgdmhd.scenarios import smooth_state

EOS = IdealGas(R=1.0, c_v=1.5)


def test_snapshot_roundtrip_1d(tmp_path):
    g = Grid(shape=(24,), extent=(1.0,), boundary=("transmissive",))
    st = smooth_state(g, EOS)
    params = RegParams(tau_mode="constant", tau0=0.01,
                       mu=CoefficientLaw("tau_scaled", 0.3))
    path = str(tmp_path / "snap.txt")
    write_snapshot(path, st, EOS, params)
    back, eos2, params2 = read_snapshot(path)
    assert back.grid == g
    assert np.allclose(back.rho, st.rho, rtol=1e-15)
    assert np.allclose(back.u, st.u, rtol=1e-15)
    assert np.allclose(back.theta, st.theta, rtol=1e-15)
    assert np.allclose(back.B, st.B, rtol=1e-15)
    assert eos2.describe() == EOS.describe()
    assert params2 == params


def test_snapshot_roundtrip_2d(tmp_path):
    g = Grid(shape=(8, 12), extent=(1.0, 1.5))
    st = smooth_state(g, EOS)
    path = str(tmp_path / "snap2d.txt")
    write_snapshot(path, st, EOS)
    back, _, params = read_snapshot(path)
    assert params is None
    assert back.grid.shape == (8, 12)
    assert np.allclose(back.rho, st.rho)


def test_snapshot_is_plain_columnar_text(tmp_path):
    g = Grid(shape=(8,), extent=(1.0,))
    path = str(tmp_path / "snap.txt")
    write_snapshot(path, smooth_state(g, EOS), EOS)
    lines = open(path).read().splitlines()
    assert lines[0].startswith("# meta = ")
    assert lines[1].startswith("# columns: x1 rho u1 u2 u3 theta B1 B2 B3 p")
    assert len(lines) == 2 + 8
    assert len(lines[2].split()) == 10


def test_snapshot_missing_metadata(tmp_path):
    path = tmp_path / "junk.txt"
    path.write_text("1.0 2.0 3.0\n")
    with pytest.raises(ConfigurationError):
        read_snapshot(str(path))


def test_audit_writer(tmp_path):
    path = str(tmp_path / "audit.csv")
    with AuditWriter(path) as w:
        w.write_row(t=0.0, mass=1.0, energy=2.0)
        w.write_row(t=0.1, mass=1.0, energy=2.0, min_xi=0.5)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == AUDIT_COLUMNS
    assert len(rows) == 3
    assert rows[1][0] == "0.0"
    # unspecified columns stay blank
    assert rows[1][AUDIT_COLUMNS.index("min_xi")] == ""
    assert rows[2][AUDIT_COLUMNS.index("min_xi")] == "0.5"
