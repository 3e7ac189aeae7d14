"""Initial conditions and per-scenario defaults for the batch driver.

The shock-tube setups (Sod, Brio-Wu) are the community-standard test
problems; see Sod (JCP 1978) and Brio & Wu (JCP 1988) for the original
configurations.
"""
from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .eos import EquationOfState, IdealGas
from .grid import Grid
from .manufactured import random_manufactured_state
from .regularization import RegParams, compute_tau
from .system import FieldState


def div_free_from_potential(grid: Grid, potential) -> np.ndarray:
    """In-plane B from the grid's own discrete curl: exactly div-free.

    B1 = D_y A, B2 = -D_x A with the grid's central differences, so the
    discrete divergence vanishes to round-off by commutation of the
    difference operators.
    """
    B = np.zeros((3,) + grid.shape)
    B[0] = grid.deriv(potential, 1)
    B[1] = -grid.deriv(potential, 0)
    return B


def _riemann_1d(grid: Grid, left, right, x_jump=0.5, smooth_cells=2.0):
    """Primitive fields (rho, u(3), p, B(3)) jumping at x_jump.

    The jump is mollified by a tanh over a couple of cells so the
    central-difference startup does not ring; the mollification width
    vanishes with h, leaving the Riemann data unchanged in the limit.
    """
    x = grid.axis_coords(0)
    if smooth_cells > 0.0:
        blend = 0.5 * (1.0 + np.tanh((x - x_jump) / (smooth_cells * grid.spacing[0])))
    else:
        blend = (x >= x_jump).astype(float)

    def pick(key):
        lv = np.asarray(left[key], dtype=float)
        rv = np.asarray(right[key], dtype=float)
        if lv.ndim == 0:
            return lv + (rv - lv) * blend
        return np.stack([lv[i] + (rv[i] - lv[i]) * blend for i in range(3)])

    return pick("rho"), pick("u"), pick("p"), pick("B")


def uniform_state(grid: Grid, eos: EquationOfState, rho=1.0, theta=1.0,
                  u=(0.0, 0.0, 0.0), B=(0.0, 0.0, 0.0)) -> FieldState:
    uu = np.zeros((3,) + grid.shape)
    BB = np.zeros((3,) + grid.shape)
    for i in range(3):
        uu[i] = u[i]
        BB[i] = B[i]
    return FieldState(grid=grid, rho=np.full(grid.shape, rho), u=uu,
                      theta=np.full(grid.shape, theta), B=BB).validate()


def sod_state(grid: Grid, eos: EquationOfState) -> FieldState:
    """Sod shock tube: rho, p jumps 1.0/0.125 and 1.0/0.1, B = 0."""
    if grid.ndim != 1:
        raise ConfigurationError("sod scenario is one-dimensional")
    left = {"rho": 1.0, "u": (0.0, 0.0, 0.0), "p": 1.0, "B": (0.0, 0.0, 0.0)}
    right = {"rho": 0.125, "u": (0.0, 0.0, 0.0), "p": 0.1, "B": (0.0, 0.0, 0.0)}
    rho, u, p, B = _riemann_1d(grid, left, right)
    theta = p / eos.pressure_theta(rho, 1.0)  # p_theta = rho R, so theta = p/(rho R)
    return FieldState(grid=grid, rho=rho, u=u, theta=theta, B=B).validate()


def briowu_state(grid: Grid, eos: EquationOfState) -> FieldState:
    """Brio-Wu shock tube: B_x = 0.75, B_y = +/-1, gamma = 2."""
    if grid.ndim != 1:
        raise ConfigurationError("briowu scenario is one-dimensional")
    left = {"rho": 1.0, "u": (0.0, 0.0, 0.0), "p": 1.0, "B": (0.75, 1.0, 0.0)}
    right = {"rho": 0.125, "u": (0.0, 0.0, 0.0), "p": 0.1, "B": (0.75, -1.0, 0.0)}
    rho, u, p, B = _riemann_1d(grid, left, right)
    theta = p / eos.pressure_theta(rho, 1.0)
    return FieldState(grid=grid, rho=rho, u=u, theta=theta, B=B).validate()


def smooth_state(grid: Grid, eos: EquationOfState) -> FieldState:
    """Deterministic smooth periodic state with discretely div-free B."""
    x = grid.coords()
    k = 2.0 * np.pi / grid.extent[0]
    rho = 1.0 + 0.2 * np.sin(k * x[0])
    theta = 1.0 + 0.1 * np.cos(k * x[0])
    u = np.zeros((3,) + grid.shape)
    u[0] = 0.3 * np.sin(k * x[0])
    u[1] = 0.2 * np.cos(k * x[0])
    if grid.ndim == 2:
        ky = 2.0 * np.pi / grid.extent[1]
        rho = rho + 0.1 * np.cos(ky * x[1])
        theta = theta + 0.05 * np.sin(ky * x[1])
        u[1] = u[1] + 0.2 * np.sin(ky * x[1])
        potential = 0.3 / k * np.sin(k * x[0]) * np.sin(ky * x[1])
        B = div_free_from_potential(grid, potential)
        B[2] = 0.2 * np.sin(k * x[0])
    else:
        B = np.zeros((3,) + grid.shape)
        B[0] = 0.5
        B[1] = 0.4 * np.sin(k * x[0])
        B[2] = 0.2 * np.cos(k * x[0])
    return FieldState(grid=grid, rho=rho, u=u, theta=theta, B=B).validate()


def manufactured_state(grid: Grid, eos: EquationOfState, seed=0) -> FieldState:
    """Seeded random smooth periodic state (analytically div-free B)."""
    rng = np.random.default_rng(seed)
    ms = random_manufactured_state(rng, grid.extent, grid.ndim,
                                   u_amp=0.5, b_amp=0.5)
    return ms.sample(grid)


_SCENARIOS = {
    "uniform": uniform_state,
    "sod": sod_state,
    "briowu": briowu_state,
    "smooth": smooth_state,
    "manufactured": manufactured_state,
}


def initial_state(name: str, grid: Grid, eos: EquationOfState, seed=0) -> FieldState:
    try:
        builder = _SCENARIOS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown scenario '{name}', available: {sorted(_SCENARIOS)}"
        ) from None
    if name == "manufactured":
        return builder(grid, eos, seed=seed)
    return builder(grid, eos)


def auto_tau0(state: FieldState, eos: EquationOfState, alpha: float) -> float:
    """Constant tau from the initial state: alpha * h_min / max(c_f + |u|)."""
    scaled = RegParams(tau_mode="scaled", alpha=alpha)
    tau = compute_tau(state, scaled, eos)
    return float(np.min(tau))


def scenario_defaults(name: str) -> dict:
    """Per-scenario default config values, overridable by the config file."""
    defaults = {
        "uniform": {
            "grid": {"d": "1", "n": "64", "extent": "1.0", "boundary": "periodic"},
            "eos": {"type": "ideal", "R": "1.0", "c_v": "1.5"},
            "regularization": {"tau_mode": "constant", "tau0": "0.01"},
            "time": {"t_end": "0.1", "cfl": "0.4", "scheme": "rk2"},
        },
        "sod": {
            "grid": {"d": "1", "n": "400", "extent": "1.0", "boundary": "transmissive"},
            "eos": {"type": "ideal", "R": "1.0", "c_v": "2.5"},
            "regularization": {
                "tau_mode": "scaled", "alpha": "0.4",
                "mu": "tau_scaled:0.3", "lam": "tau_scaled:0.0",
                "kappa": "tau_scaled_cp:0.15",
            },
            "time": {"t_end": "0.2", "cfl": "0.4", "scheme": "rk2"},
        },
        "briowu": {
            "grid": {"d": "1", "n": "800", "extent": "1.0", "boundary": "transmissive"},
            "eos": {"type": "ideal", "R": "1.0", "c_v": "1.0"},
            "regularization": {
                "tau_mode": "constant", "tau0": "auto", "alpha": "0.4",
                "mu": "tau_scaled:0.3", "lam": "tau_scaled:0.0",
                "kappa": "tau_scaled_cp:0.15",
            },
            "time": {"t_end": "0.1", "cfl": "0.3", "scheme": "rk2"},
        },
        "smooth": {
            "grid": {"d": "1", "n": "64", "extent": "1.0", "boundary": "periodic"},
            "eos": {"type": "ideal", "R": "1.0", "c_v": "1.5"},
            "regularization": {"tau_mode": "constant", "tau0": "0.005",
                               "mu": "constant:0.001", "kappa": "constant:0.001"},
            "time": {"t_end": "0.2", "cfl": "0.4", "scheme": "rk2"},
        },
        "manufactured": {
            "grid": {"d": "1", "n": "64", "extent": "6.283185307179586",
                     "boundary": "periodic"},
            "eos": {"type": "ideal", "R": "1.0", "c_v": "1.5"},
            "regularization": {"tau_mode": "constant", "tau0": "0.01",
                               "mu": "constant:0.01", "kappa": "constant:0.01"},
            "time": {"t_end": "0.1", "cfl": "0.4", "scheme": "rk2"},
        },
    }
    if name not in defaults:
        raise ConfigurationError(
            f"unknown scenario '{name}', available: {sorted(defaults)}"
        )
    return defaults[name]
