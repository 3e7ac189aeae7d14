"""Semi-discrete right-hand sides and explicit time stepping.

Time integration works on the conserved variables (rho, rho u,
E + |B|^2/2, B) so that mass, momentum and total energy balances are
structural: every flux is assembled as a field and differentiated with
the central-difference operators, which telescope on periodic grids.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eos import EquationOfState
from .errors import NonPhysicalStateError
from .grid import Grid, div, div_tensor, dot, grad, outer, tensor_dot_vec
from .regularization import (
    RegParams,
    RegTerms,
    compute_regterms,
    compute_tau,
    fast_speed,
    navier_stokes_stress,
)
from .grid import grad_vec


@dataclass(frozen=True)
class FieldState:
    """Primitive fields on one grid at one time level."""

    grid: Grid
    rho: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    B: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "rho", self.grid.check_scalar(self.rho))
        object.__setattr__(self, "u", self.grid.check_vector(self.u))
        object.__setattr__(self, "theta", self.grid.check_scalar(self.theta))
        object.__setattr__(self, "B", self.grid.check_vector(self.B))

    def validate(self):
        """Raise NonPhysicalStateError with the offending cell reported."""
        for name, f in (("rho", self.rho), ("theta", self.theta)):
            if not np.all(np.isfinite(f)):
                idx = np.unravel_index(int(np.argmin(np.isfinite(f))), f.shape)
                idx = tuple(int(i) for i in idx)
                raise NonPhysicalStateError(f"non-finite {name} at cell {idx} (t={self.t})")
            if np.min(f) <= 0.0:
                idx = np.unravel_index(int(np.argmin(f)), f.shape)
                idx = tuple(int(i) for i in idx)
                raise NonPhysicalStateError(
                    f"non-positive {name} at cell {idx}: {float(f[idx])} (t={self.t})"
                )
        return self


@dataclass(frozen=True)
class Sources:
    """Body force F(x, t) and heat source Q(x, t) >= 0 as closures."""

    F: object = None  # callable(coords, t) -> (3, *shape)
    Q: object = None  # callable(coords, t) -> (*shape,)

    def evaluate(self, state):
        g = state.grid
        x = g.coords()
        F = np.zeros((3,) + g.shape) if self.F is None else np.asarray(self.F(x, state.t), float)
        Q = np.zeros(g.shape) if self.Q is None else np.asarray(self.Q(x, state.t), float)
        F = np.broadcast_to(F, (3,) + g.shape).copy()
        Q = np.broadcast_to(Q, g.shape).copy()
        if np.min(Q) < 0.0:
            raise NonPhysicalStateError(f"heat source must be >= 0, got min Q = {float(np.min(Q))}")
        return F, Q


@dataclass(frozen=True)
class ConservedState:
    """(rho, momentum, total energy incl. magnetic, B); also used for tendencies."""

    rho: np.ndarray
    mom: np.ndarray
    etot: np.ndarray
    B: np.ndarray

    def __add__(self, other):
        return ConservedState(
            self.rho + other.rho, self.mom + other.mom,
            self.etot + other.etot, self.B + other.B,
        )

    def scaled(self, a):
        return ConservedState(a * self.rho, a * self.mom, a * self.etot, a * self.B)


def to_conserved(state: FieldState, eos: EquationOfState) -> ConservedState:
    eps = eos.energy(state.rho, state.theta)
    kinetic = 0.5 * state.rho * dot(state.u, state.u)
    magnetic = 0.5 * dot(state.B, state.B)
    return ConservedState(
        rho=state.rho.copy(),
        mom=state.rho * state.u,
        etot=kinetic + state.rho * eps + magnetic,
        B=state.B.copy(),
    )


def to_primitive(cons: ConservedState, grid: Grid, eos: EquationOfState, t=0.0,
                 theta_guess=None) -> FieldState:
    rho = cons.rho
    if np.min(rho) <= 0.0:
        idx = tuple(int(i) for i in np.unravel_index(int(np.argmin(rho)), rho.shape))
        raise NonPhysicalStateError(
            f"non-positive density at cell {idx}: {float(rho[idx])} (t={t})"
        )
    u = cons.mom / rho
    eps = (cons.etot - 0.5 * rho * dot(u, u) - 0.5 * dot(cons.B, cons.B)) / rho
    theta = eos.invert_temperature(rho, eps, theta_guess=theta_guess)
    return FieldState(grid=grid, rho=rho, u=u, theta=np.asarray(theta), B=cons.B, t=t).validate()


def rhs_from_regterms(state: FieldState, reg: RegTerms, eos: EquationOfState) -> ConservedState:
    """Tendencies of the regularized system, all fluxes in divergence form."""
    g = state.grid
    th = reg.thermo
    u_rel = state.u - reg.w          # u - w      (mass / energy transport)
    u_hat = state.u - reg.w_hat      # u - w_hat  (magnetic transport)
    p_tot = th.p + 0.5 * dot(state.B, state.B)

    # mass
    d_rho = -div(g, state.rho * u_rel)

    # momentum
    mom_flux = outer(state.rho * u_rel, state.u) - outer(state.B, state.B)
    force = (state.rho - reg.tau * div(g, state.rho * state.u)) * reg.F
    d_mom = -div_tensor(g, mom_flux) - grad(g, p_tot) + div_tensor(g, reg.Pi) + force

    # total energy
    E = 0.5 * state.rho * dot(state.u, state.u) + state.rho * th.eps
    B2 = dot(state.B, state.B)
    adv_flux = (
        (E + th.p) * u_rel
        + B2 * u_hat
        - dot(u_hat, state.B) * state.B
    )
    diss_flux = -reg.q + reg.tau * dot(reg.bhat, state.B) * state.u + tensor_dot_vec(reg.Pi, state.u)
    d_etot = -div(g, adv_flux) + div(g, diss_flux) + state.rho * dot(u_rel, reg.F) + reg.Q

    # Faraday (antisymmetric fluxes: discrete div B is exactly stationary)
    far_flux = (
        outer(u_hat, state.B) - outer(state.B, u_hat)
        - reg.tau * (outer(state.u, reg.bhat) - outer(reg.bhat, state.u))
    )
    d_B = -div_tensor(g, far_flux)

    return ConservedState(rho=d_rho, mom=d_mom, etot=d_etot, B=d_B)


def rhs_regularized(state: FieldState, params: RegParams, sources, eos: EquationOfState,
                    return_regterms=False):
    """Tendencies of the regularized system from a primitive snapshot."""
    reg = compute_regterms(state, params, sources, eos)
    tend = rhs_from_regterms(state, reg, eos)
    if return_regterms:
        return tend, reg
    return tend


def rhs_classical(state: FieldState, params: RegParams, sources, eos: EquationOfState) -> ConservedState:
    """Classical Navier-Stokes-MHD baseline, written out independently.

    Uses the same mu/lam/kappa laws as `params` but none of the
    regularizing terms; serves as the tau = 0 oracle.
    """
    g = state.grid
    state.validate()
    th = eos.evaluate(state.rho, state.theta)
    if sources is None:
        F = np.zeros((3,) + g.shape)
        Q = np.zeros(g.shape)
    else:
        F, Q = sources.evaluate(state)
    tau = compute_tau(state, params, eos, thermo=th)
    mu = params.mu.evaluate(tau, state.rho, th)
    lam = params.lam.evaluate(tau, state.rho, th)
    kappa = params.kappa.evaluate(tau, state.rho, th)

    Pi_NS = navier_stokes_stress(grad_vec(g, state.u), mu, lam)
    p_tot = th.p + 0.5 * dot(state.B, state.B)

    d_rho = -div(g, state.rho * state.u)
    mom_flux = outer(state.rho * state.u, state.u) - outer(state.B, state.B)
    d_mom = -div_tensor(g, mom_flux) - grad(g, p_tot) + div_tensor(g, Pi_NS) + state.rho * F

    E = 0.5 * state.rho * dot(state.u, state.u) + state.rho * th.eps
    B2 = dot(state.B, state.B)
    adv_flux = (E + th.p + B2) * state.u - dot(state.u, state.B) * state.B
    diss_flux = kappa * grad(g, state.theta) + tensor_dot_vec(Pi_NS, state.u)
    d_etot = -div(g, adv_flux) + div(g, diss_flux) + state.rho * dot(state.u, F) + Q

    far_flux = outer(state.u, state.B) - outer(state.B, state.u)
    d_B = -div_tensor(g, far_flux)
    return ConservedState(rho=d_rho, mom=d_mom, etot=d_etot, B=d_B)


def cfl_dt(state: FieldState, params: RegParams, eos: EquationOfState, cfl: float) -> float:
    """Explicit stability bound: hyperbolic h/(|u|+c_f) and diffusive h^2/(2 d nu)."""
    if not 0.0 < cfl <= 1.0:
        raise ValueError(f"cfl must lie in (0, 1], got {cfl}")
    th = eos.evaluate(state.rho, state.theta)
    g = state.grid
    tau = compute_tau(state, params, eos, thermo=th)
    mu = params.mu.evaluate(tau, state.rho, th)
    kappa = params.kappa.evaluate(tau, state.rho, th)
    cf = fast_speed(state, th)
    speed = np.sqrt(dot(state.u, state.u)) + cf
    h = g.h_min
    dt_hyp = h / np.max(speed)
    nu = np.maximum(mu / state.rho, np.maximum(kappa / (state.rho * th.eps_theta), tau * cf**2))
    nu_max = float(np.max(nu))
    if nu_max > 0.0:
        dt_diff = h**2 / (2.0 * g.ndim * nu_max)
        return cfl * min(dt_hyp, dt_diff)
    return cfl * dt_hyp


def step(state: FieldState, dt: float, params: RegParams, sources, eos: EquationOfState,
         scheme: str = "rk2", scalar_rhs=None):
    """Advance one explicit step; returns (new_state, scalar_increments).

    scheme: 'euler' or 'rk2' (Heun).  `scalar_rhs` is an optional mapping
    name -> callable(state) returning a global scalar tendency; the
    scalars are integrated with the same scheme (used for boundary-flux
    tallies on non-periodic runs).
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if scheme not in ("euler", "rk2"):
        raise ValueError(f"unknown scheme '{scheme}'")
    scalar_rhs = scalar_rhs or {}

    cons = to_conserved(state, eos)
    k1 = rhs_regularized(state, params, sources, eos)
    s1 = {name: fn(state) for name, fn in scalar_rhs.items()}

    if scheme == "euler":
        new = cons + k1.scaled(dt)
        incs = {name: dt * v for name, v in s1.items()}
        return (
            to_primitive(new, state.grid, eos, t=state.t + dt, theta_guess=state.theta),
            incs,
        )

    mid_cons = cons + k1.scaled(dt)
    mid = to_primitive(mid_cons, state.grid, eos, t=state.t + dt, theta_guess=state.theta)
    k2 = rhs_regularized(mid, params, sources, eos)
    s2 = {name: fn(mid) for name, fn in scalar_rhs.items()}
    new = cons + (k1 + k2).scaled(0.5 * dt)
    incs = {name: 0.5 * dt * (s1[name] + s2[name]) for name in s1}
    return (
        to_primitive(new, state.grid, eos, t=state.t + dt, theta_guess=state.theta),
        incs,
    )
