"""Batch driver: `qgdmhd run|convergence|audit`.

Exit codes: 0 success, 2 configuration error, 3 runtime physical
failure (with the last good snapshot flushed), 4 I/O failure.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .config import build_all, load_config
from .diagnostics import (
    entropy_audit,
    entropy_boundary_outflux,
    identity_suite,
    residual_convergence,
    residual_entropy_balance,
    residual_internal_energy,
    totals,
)
from .errors import ConfigurationError, NonPhysicalStateError, QgdMhdError
from .io import AuditWriter, read_snapshot, write_snapshot
from .manufactured import random_manufactured_state
from .regularization import compute_regterms
from .system import cfl_dt, step

EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_IO = 4


def _audit_row(writer, state, eos, params, sources, corrected_entropy,
               with_residuals):
    reg = compute_regterms(state, params, sources, eos)
    tot = totals(state, eos)
    audit = entropy_audit(state, params, sources, eos, reg=reg)
    row = dict(
        t=state.t,
        mass=tot.mass,
        mom1=tot.momentum[0], mom2=tot.momentum[1], mom3=tot.momentum[2],
        energy=tot.energy,
        entropy=tot.entropy,
        entropy_corrected=corrected_entropy(tot.entropy),
        max_div_B=tot.max_div_B,
        min_xi=audit.min_xi,
        equiv_err=audit.equiv_err,
    )
    if with_residuals:
        row["resid_internal_energy"] = float(
            np.max(np.abs(residual_internal_energy(state, reg, sources, eos)))
        )
        row["resid_entropy"] = float(
            np.max(np.abs(residual_entropy_balance(state, reg, sources, eos)))
        )
    writer.write_row(**row)


def run(cfg, outdir=None) -> int:
    grid, eos, params, sources, state, name = build_all(cfg)
    outdir = outdir or cfg.get("output", "directory")
    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, "config_echo.ini"), "w") as fh:
        fh.write(cfg.dump())

    t_end = cfg.getfloat("time", "t_end")
    cfl = cfg.getfloat("time", "cfl")
    scheme = cfg.get("time", "scheme")
    max_steps = cfg.getint("time", "max_steps")
    snapshot_every = cfg.getint("output", "snapshot_every")
    audit_every = cfg.getint("output", "audit_every")
    with_residuals = cfg.getbool("output", "residuals")

    # Boundary-flux tally makes the entropy total monotone on open domains.
    track_outflux = any(b != "periodic" for b in grid.boundary)
    scalar_rhs = {}
    if track_outflux:
        scalar_rhs["entropy_outflux"] = lambda st: entropy_boundary_outflux(
            st, compute_regterms(st, params, sources, eos)
        )
    outflux_tally = 0.0

    writer = AuditWriter(os.path.join(outdir, "audit.csv"))
    write_snapshot(os.path.join(outdir, "snapshot_initial.txt"), state, eos, params)

    n = 0
    try:
        while state.t < t_end - 1e-14 and n < max_steps:
            if audit_every and n % audit_every == 0:
                _audit_row(writer, state, eos, params, sources,
                           lambda s: s + outflux_tally, with_residuals)
            if snapshot_every and n and n % snapshot_every == 0:
                write_snapshot(
                    os.path.join(outdir, f"snapshot_{n:07d}.txt"), state, eos, params
                )
            dt = min(cfl_dt(state, params, eos, cfl), t_end - state.t)
            state, incs = step(state, dt, params, sources, eos, scheme=scheme,
                               scalar_rhs=scalar_rhs)
            outflux_tally += incs.get("entropy_outflux", 0.0)
            n += 1
    except NonPhysicalStateError as exc:
        print(f"run aborted after {n} steps: {exc}", file=sys.stderr)
        write_snapshot(os.path.join(outdir, "snapshot_last_good.txt"), state, eos, params)
        writer.close()
        return EXIT_PHYSICS

    _audit_row(writer, state, eos, params, sources,
               lambda s: s + outflux_tally, with_residuals)
    write_snapshot(os.path.join(outdir, "snapshot_final.txt"), state, eos, params)
    writer.close()
    print(f"completed {n} steps to t = {state.t:.6g}, output in {outdir}")
    return 0


def convergence(cfg, levels) -> int:
    grid, eos, params, sources, _, name = build_all(cfg)
    seed = cfg.getint("scenario", "seed")
    rng = np.random.default_rng(seed)
    ms = random_manufactured_state(rng, grid.extent, grid.ndim, u_amp=0.5, b_amp=0.5)
    if params.tau_mode != "constant":
        raise ConfigurationError("convergence studies need tau_mode = constant")

    study = residual_convergence(ms, params, sources, eos, ndim=grid.ndim,
                                 extent=grid.extent, Ns=levels,
                                 stencil_order=grid.stencil_order)
    identities = identity_suite(ms, eos, ndim=grid.ndim, extent=grid.extent,
                                Ns=levels, stencil_order=grid.stencil_order,
                                tau0=params.tau0 or 0.1, sources=sources)

    lines = [f"{'check':28s} " + " ".join(f"N={N:<10d}" for N in levels) + " rate"]
    for label, res, rate in (
        ("internal_energy_balance", study.internal_energy, study.rate_internal_energy),
        ("entropy_balance", study.entropy_balance, study.rate_entropy_balance),
    ):
        vals = " ".join(f"{res[N]:.6e}" for N in levels)
        lines.append(f"{label:28s} {vals} {rate:.2f}")
    for ident in identities:
        vals = " ".join(f"{ident.residuals[N]:.6e}" for N in levels)
        rate = "exact" if ident.exact else f"{ident.rate:.2f}"
        lines.append(f"{ident.name:28s} {vals} {rate}")
    table = "\n".join(lines)
    print(table)

    outdir = cfg.get("output", "directory")
    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, "convergence.txt"), "w") as fh:
        fh.write(table + "\n")
    return 0


def audit_snapshot(path) -> int:
    state, eos, params = read_snapshot(path)
    if params is None:
        raise ConfigurationError(f"snapshot {path} carries no regularization metadata")
    # Stored snapshots carry no source closures; audit assumes F = 0, Q = 0.
    audit = entropy_audit(state, params, None, eos)
    tot = totals(state, eos)
    print(f"t = {state.t:.6g}")
    print(f"mass = {tot.mass:.12e}")
    print(f"momentum = {tot.momentum[0]:.6e} {tot.momentum[1]:.6e} {tot.momentum[2]:.6e}")
    print(f"energy = {tot.energy:.12e}")
    print(f"entropy = {tot.entropy:.12e}")
    print(f"max |div B| = {tot.max_div_B:.6e}")
    print(f"min Xi = {audit.min_xi:.6e}")
    print(f"Xi form equivalence error = {audit.equiv_err:.6e}")
    print(f"nonnegativity conditions hold = {audit.condition_ok}")
    if audit.negative_cells:
        print(f"negative production at {len(audit.negative_cells)} cells")
    return 0


def _parse_levels(raw):
    try:
        return tuple(int(p) for p in raw.split(","))
    except ValueError:
        raise ConfigurationError(f"cannot parse levels from {raw!r}") from None


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qgdmhd",
        description="Regularized compressible MHD solver and verification driver",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured scenario")
    p_run.add_argument("config")
    p_run.add_argument("--override", action="append", default=[],
                       metavar="section.key=value")

    p_conv = sub.add_parser("convergence", help="residual/identity refinement study")
    p_conv.add_argument("config")
    p_conv.add_argument("--levels", default="32,64,128")
    p_conv.add_argument("--override", action="append", default=[],
                        metavar="section.key=value")

    p_audit = sub.add_parser("audit", help="recompute the entropy audit of a snapshot")
    p_audit.add_argument("snapshot")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return run(load_config(args.config, args.override))
        if args.command == "convergence":
            return convergence(load_config(args.config, args.override),
                               _parse_levels(args.levels))
        return audit_snapshot(args.snapshot)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonPhysicalStateError as exc:
        print(f"physical failure: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
