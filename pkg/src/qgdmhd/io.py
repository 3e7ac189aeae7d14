"""Snapshot and audit-series files.

Snapshots are columnar text: metadata as '# key = <json>' comment lines,
a '# columns:' header naming the columns, then one row per cell with the
coordinates followed by rho, u1, u2, u3, theta, B1, B2, B3, p.
"""
from __future__ import annotations

import csv
import json

import numpy as np

from .eos import EquationOfState, make_eos
from .errors import ConfigurationError
from .grid import Grid
from .regularization import CoefficientLaw, RegParams
from .system import FieldState

AUDIT_COLUMNS = (
    "t", "mass", "mom1", "mom2", "mom3", "energy", "entropy",
    "entropy_corrected", "max_div_B", "min_xi", "equiv_err",
    "resid_internal_energy", "resid_entropy",
)


def _params_meta(params: RegParams) -> dict:
    return {
        "tau_mode": params.tau_mode,
        "tau0": params.tau0,
        "alpha": params.alpha,
        "mu": [params.mu.kind, params.mu.value],
        "lam": [params.lam.kind, params.lam.value],
        "kappa": [params.kappa.kind, params.kappa.value],
    }


def params_from_meta(meta: dict) -> RegParams:
    return RegParams(
        tau_mode=meta["tau_mode"],
        tau0=meta["tau0"],
        alpha=meta["alpha"],
        mu=CoefficientLaw(*meta["mu"]),
        lam=CoefficientLaw(*meta["lam"]),
        kappa=CoefficientLaw(*meta["kappa"]),
    )


def write_snapshot(path, state: FieldState, eos: EquationOfState,
                   params: RegParams = None):
    g = state.grid
    meta = {
        "grid": {
            "shape": list(g.shape),
            "extent": list(g.extent),
            "boundary": list(g.boundary),
            "stencil_order": g.stencil_order,
        },
        "eos": eos.describe(),
        "t": state.t,
    }
    if params is not None:
        meta["regularization"] = _params_meta(params)

    coords = g.coords()
    p = eos.pressure(state.rho, state.theta)
    cols = [coords[a].ravel() for a in range(g.ndim)]
    cols += [state.rho.ravel()]
    cols += [state.u[i].ravel() for i in range(3)]
    cols += [state.theta.ravel()]
    cols += [state.B[i].ravel() for i in range(3)]
    cols += [np.asarray(p).ravel()]
    names = [f"x{a + 1}" for a in range(g.ndim)] + [
        "rho", "u1", "u2", "u3", "theta", "B1", "B2", "B3", "p",
    ]
    table = np.column_stack(cols)
    with open(path, "w") as fh:
        fh.write(f"# meta = {json.dumps(meta)}\n")
        fh.write("# columns: " + " ".join(names) + "\n")
        np.savetxt(fh, table, fmt="%.17e")


def read_snapshot(path):
    """Returns (state, eos, params-or-None)."""
    meta = None
    with open(path) as fh:
        for line in fh:
            if line.startswith("# meta = "):
                meta = json.loads(line[len("# meta = "):])
                break
    if meta is None:
        raise ConfigurationError(f"snapshot {path} has no metadata line")
    gmeta = meta["grid"]
    grid = Grid(
        shape=tuple(gmeta["shape"]),
        extent=tuple(gmeta["extent"]),
        boundary=tuple(gmeta["boundary"]),
        stencil_order=gmeta["stencil_order"],
    )
    eos_meta = dict(meta["eos"])
    eos = make_eos(eos_meta.pop("type"), **eos_meta)
    data = np.loadtxt(path)
    d = grid.ndim
    shape = grid.shape

    def col(i):
        return data[:, i].reshape(shape)

    rho = col(d)
    u = np.stack([col(d + 1 + i) for i in range(3)])
    theta = col(d + 4)
    B = np.stack([col(d + 5 + i) for i in range(3)])
    state = FieldState(grid=grid, rho=rho, u=u, theta=theta, B=B, t=meta["t"])
    params = params_from_meta(meta["regularization"]) if "regularization" in meta else None
    return state, eos, params


class AuditWriter:
    """CSV audit series, one row per output time; flushed per row."""

    def __init__(self, path):
        self._fh = open(path, "w", newline="")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(AUDIT_COLUMNS)
        self._fh.flush()

    def write_row(self, **values):
        row = [values.get(name, "") for name in AUDIT_COLUMNS]
        self._writer.writerow(row)
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
