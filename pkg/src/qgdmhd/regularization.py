"""Constitutive and auxiliary quantities of the regularized MHD system.

Two evaluation paths are provided:

* grid path -- finite differences through the grid operators, computing
  divergence-form expressions exactly as they appear in the fluxes (this
  is what the solver uses);
* pointwise path -- expanded product-rule forms driven by a
  ``GradientBundle`` of first derivatives, which may come from finite
  differences or from exact analytic derivatives of manufactured fields
  (this is what the identity and entropy suites use).

All regularizing terms carry a factor tau; at tau = 0 the quantities
reduce to their classical Navier-Stokes(-MHD) counterparts.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eos import EquationOfState, ThermoPoint
from .errors import ConfigurationError, NonPhysicalStateError
from .grid import Grid, div, div_tensor, dot, grad, grad_vec, outer

_COEFF_KINDS = ("constant", "tau_scaled", "tau_scaled_cp")


@dataclass(frozen=True)
class CoefficientLaw:
    """Transport coefficient law: a constant, or tied to tau.

    'tau_scaled'    -> value * tau * rho * cs2      (viscosity-like)
    'tau_scaled_cp' -> value * tau * rho * cs2 * c_p (conductivity-like)
    """

    kind: str = "constant"
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in _COEFF_KINDS:
            raise ConfigurationError(f"unknown coefficient law '{self.kind}'")
        if self.value < 0.0:
            raise ConfigurationError(f"coefficient value must be >= 0, got {self.value}")

    def evaluate(self, tau, rho, thermo: ThermoPoint):
        if self.kind == "constant":
            return np.full(np.shape(rho), self.value)
        base = self.value * tau * rho * thermo.cs2
        if self.kind == "tau_scaled_cp":
            base = base * thermo.c_p
        return base


@dataclass(frozen=True)
class RegParams:
    """Relaxation parameter law and transport coefficients."""

    tau_mode: str = "constant"  # 'constant' or 'scaled'
    tau0: float = 0.0
    alpha: float = 0.5
    mu: CoefficientLaw = CoefficientLaw("constant", 0.0)
    lam: CoefficientLaw = CoefficientLaw("constant", 0.0)
    kappa: CoefficientLaw = CoefficientLaw("constant", 0.0)

    def __post_init__(self):
        if self.tau_mode not in ("constant", "scaled"):
            raise ConfigurationError(f"unknown tau_mode '{self.tau_mode}'")
        if self.tau_mode == "constant" and self.tau0 < 0.0:
            raise ConfigurationError(f"tau0 must be >= 0, got {self.tau0}")
        if self.tau_mode == "scaled" and self.alpha <= 0.0:
            raise ConfigurationError(f"alpha must be > 0, got {self.alpha}")


@dataclass(frozen=True)
class GradientBundle:
    """First spatial derivatives of the primitive fields.

    rho, theta: (3, *shape);  u, B: (3, 3, *shape) with [i, j] = d_i f_j.
    """

    rho: np.ndarray
    theta: np.ndarray
    u: np.ndarray
    B: np.ndarray

    @property
    def div_u(self):
        return np.einsum("ii...->...", self.u)

    @property
    def div_B(self):
        return np.einsum("ii...->...", self.B)

    @property
    def strain(self):
        """D(u) = (grad u + grad u^T)/2."""
        return 0.5 * (self.u + np.einsum("ij...->ji...", self.u))


def fd_gradients(state) -> GradientBundle:
    """Finite-difference gradient bundle of a field state."""
    g = state.grid
    return GradientBundle(
        rho=grad(g, state.rho),
        theta=grad(g, state.theta),
        u=grad_vec(g, state.u),
        B=grad_vec(g, state.B),
    )


@dataclass(frozen=True)
class RegTerms:
    """All per-cell auxiliary quantities derived from one snapshot."""

    tau: np.ndarray
    w: np.ndarray
    w_hat: np.ndarray
    bhat: np.ndarray
    q: np.ndarray
    Pi_NS: np.ndarray
    Pi: np.ndarray
    pt_hat_p: np.ndarray
    # pre-tau momentum residuals: w = (tau/rho) W, w_hat = (tau/rho) V
    W: np.ndarray
    V: np.ndarray
    mu: np.ndarray
    lam: np.ndarray
    kappa: np.ndarray
    thermo: ThermoPoint
    F: np.ndarray
    Q: np.ndarray


def _check_admissible(state):
    if np.min(state.rho) <= 0.0:
        raise NonPhysicalStateError(f"non-positive density, min rho = {float(np.min(state.rho))}")
    if np.min(state.theta) <= 0.0:
        raise NonPhysicalStateError(
            f"non-positive temperature, min theta = {float(np.min(state.theta))}"
        )


def _thermo(state, eos, thermo):
    return thermo if thermo is not None else eos.evaluate(state.rho, state.theta)


def fast_speed(state, thermo: ThermoPoint):
    """Fast magnetosonic bound sqrt(cs2 + |B|^2/rho)."""
    return np.sqrt(thermo.cs2 + dot(state.B, state.B) / state.rho)


def compute_tau(state, params: RegParams, eos: EquationOfState, thermo=None):
    """Relaxation parameter field: constant tau0 or alpha*h_min/(c_f+|u|)."""
    _check_admissible(state)
    if params.tau_mode == "constant":
        return np.full(state.grid.shape, params.tau0)
    th = _thermo(state, eos, thermo)
    speed = fast_speed(state, th) + np.sqrt(dot(state.u, state.u))
    return params.alpha * state.grid.h_min / speed


def _zero_vector(grid):
    return np.zeros((3,) + grid.shape)


def total_pressure(state, thermo: ThermoPoint):
    return thermo.p + 0.5 * dot(state.B, state.B)


def compute_w(state, tau, F, eos: EquationOfState, thermo=None):
    """w = (tau/rho)[div(rho u x u - B x B) + grad(p + |B|^2/2) - rho F]."""
    _check_admissible(state)
    th = _thermo(state, eos, thermo)
    W = momentum_flux_residual_fd(state, th, F)
    return (tau / state.rho) * W


def momentum_flux_residual_fd(state, thermo: ThermoPoint, F):
    """W such that w = (tau/rho) W, divergence form via grid operators."""
    g = state.grid
    flux = outer(state.rho * state.u, state.u) - outer(state.B, state.B)
    W = div_tensor(g, flux) + grad(g, total_pressure(state, thermo))
    if F is not None:
        W = W - state.rho * F
    return W


def compute_w_hat(state, tau, F, eos: EquationOfState, thermo=None):
    """w_hat = (tau/rho)[rho(u.grad)u - div(B x B) + grad(p + |B|^2/2) - rho F]."""
    _check_admissible(state)
    th = _thermo(state, eos, thermo)
    V = convective_residual_fd(state, th, F)
    return (tau / state.rho) * V


def convective_residual_fd(state, thermo: ThermoPoint, F):
    """V such that w_hat = (tau/rho) V, via grid operators."""
    g = state.grid
    grad_u = grad_vec(g, state.u)
    conv = state.rho * np.einsum("i...,ij...->j...", state.u, grad_u)
    V = conv - div_tensor(g, outer(state.B, state.B)) + grad(g, total_pressure(state, thermo))
    if F is not None:
        V = V - state.rho * F
    return V


def compute_bhat(state):
    """Divergence (conservative) form: bhat = div(u x B - B x u)."""
    g = state.grid
    return div_tensor(g, outer(state.u, state.B) - outer(state.B, state.u))


def compute_bhat_expanded(state, bundle: GradientBundle = None):
    """Expanded form (div u)B + (u.grad)B - (B.grad)u, for cross-validation."""
    if bundle is None:
        bundle = fd_gradients(state)
    return bhat_pointwise(state.u, state.B, bundle)


def compute_pt_hat_p(state, Q, eos: EquationOfState, thermo=None):
    """Euler-frame pressure rate -(u.grad p + rho cs2 div u - p_theta Q/(rho eps_theta)).

    Does not depend on the magnetic field.
    """
    _check_admissible(state)
    th = _thermo(state, eos, thermo)
    g = state.grid
    u_grad_p = dot(state.u, grad(g, np.asarray(th.p)))
    div_u = div(g, state.u)
    source = 0.0 if Q is None else th.p_theta / (state.rho * th.eps_theta) * Q
    return -(u_grad_p + state.rho * th.cs2 * div_u - source)


def _identity_times(scalar, shape):
    out = np.zeros((3, 3) + shape)
    for i in range(3):
        out[i, i] = scalar
    return out


def navier_stokes_stress(grad_u, mu, lam):
    """Pi_NS = mu[2 D(u) - (2/3)(div u) I] + lam (div u) I."""
    div_u = np.einsum("ii...->...", grad_u)
    strain2 = grad_u + np.einsum("ij...->ji...", grad_u)
    shape = div_u.shape
    return mu * (strain2 - _identity_times((2.0 / 3.0) * div_u, shape)) + _identity_times(
        lam * div_u, shape
    )


def compute_Pi(state, tau, w_hat, bhat, Q, eos: EquationOfState, mu, lam, thermo=None):
    """(Pi_NS, Pi): classical symmetric and regularized non-symmetric stress."""
    _check_admissible(state)
    th = _thermo(state, eos, thermo)
    g = state.grid
    grad_u = grad_vec(g, state.u)
    Pi_NS = navier_stokes_stress(grad_u, mu, lam)
    div_u = np.einsum("ii...->...", grad_u)
    u_grad_p = dot(state.u, grad(g, np.asarray(th.p)))
    q_source = 0.0 if Q is None else th.p_theta / (state.rho * th.eps_theta) * Q
    bracket = u_grad_p + state.rho * th.cs2 * div_u + dot(bhat, state.B) - q_source
    Pi = (
        Pi_NS
        + outer(state.rho * state.u, w_hat)
        - tau * (outer(bhat, state.B) + outer(state.B, bhat))
        + _identity_times(tau * bracket, g.shape)
    )
    return Pi_NS, Pi


def compute_q(state, tau, Q, eos: EquationOfState, kappa, thermo=None):
    """Regularized heat flux: -q = kappa grad(theta) + tau[rho(u.grad eps - (p/rho^2) u.grad rho) - Q] u."""
    _check_admissible(state)
    th = _thermo(state, eos, thermo)
    g = state.grid
    u_grad_eps = dot(state.u, grad(g, np.asarray(th.eps)))
    u_grad_rho = dot(state.u, grad(g, state.rho))
    transport = state.rho * (u_grad_eps - th.p / state.rho**2 * u_grad_rho)
    if Q is not None:
        transport = transport - Q
    minus_q = kappa * grad(g, state.theta) + tau * transport * state.u
    return -minus_q


def compute_regterms(state, params: RegParams, sources, eos: EquationOfState) -> RegTerms:
    """Assemble every auxiliary quantity from one snapshot (grid FD path)."""
    _check_admissible(state)
    th = eos.evaluate(state.rho, state.theta)
    g = state.grid
    if sources is None:
        F = _zero_vector(g)
        Q = np.zeros(g.shape)
    else:
        F, Q = sources.evaluate(state)
    tau = compute_tau(state, params, eos, thermo=th)
    mu = params.mu.evaluate(tau, state.rho, th)
    lam = params.lam.evaluate(tau, state.rho, th)
    kappa = params.kappa.evaluate(tau, state.rho, th)

    W = momentum_flux_residual_fd(state, th, F)
    V = convective_residual_fd(state, th, F)
    w = (tau / state.rho) * W
    w_hat = (tau / state.rho) * V
    bhat = compute_bhat(state)
    Pi_NS, Pi = compute_Pi(state, tau, w_hat, bhat, Q, eos, mu, lam, thermo=th)
    q = compute_q(state, tau, Q, eos, kappa, thermo=th)
    pt_hat_p = compute_pt_hat_p(state, Q, eos, thermo=th)
    return RegTerms(
        tau=tau, w=w, w_hat=w_hat, bhat=bhat, q=q, Pi_NS=Pi_NS, Pi=Pi,
        pt_hat_p=pt_hat_p, W=W, V=V, mu=mu, lam=lam, kappa=kappa,
        thermo=th, F=F, Q=Q,
    )


# ---------------------------------------------------------------------------
# Pointwise (bundle-driven) forms.  These accept arrays of any shape whose
# leading axes are the vector/tensor components, so they work both on grid
# fields and on batches of sampled states.
# ---------------------------------------------------------------------------

def bhat_pointwise(u, B, bundle: GradientBundle):
    """(div u)B + (u.grad)B - (B.grad)u from a gradient bundle."""
    div_u = bundle.div_u
    u_grad_B = np.einsum("i...,ij...->j...", u, bundle.B)
    B_grad_u = np.einsum("i...,ij...->j...", B, bundle.u)
    return div_u * B + u_grad_B - B_grad_u


def grad_p_pointwise(thermo: ThermoPoint, bundle: GradientBundle):
    """grad p = p_rho grad rho + p_theta grad theta (chain rule, exact)."""
    return thermo.p_rho * bundle.rho + thermo.p_theta * bundle.theta


def grad_magnetic_pressure_pointwise(B, bundle: GradientBundle):
    """grad(|B|^2/2)_i = B_j d_i B_j."""
    return np.einsum("j...,ij...->i...", B, bundle.B)


def div_BB_pointwise(B, bundle: GradientBundle):
    """div(B x B)_j = (div B) B_j + (B.grad) B_j."""
    return bundle.div_B * B + np.einsum("i...,ij...->j...", B, bundle.B)


def convective_residual_pointwise(rho, u, B, thermo: ThermoPoint, bundle: GradientBundle, F=None):
    """V = rho(u.grad)u - div(B x B) + grad(p + |B|^2/2) - rho F, expanded."""
    conv = rho * np.einsum("i...,ij...->j...", u, bundle.u)
    V = (
        conv
        - div_BB_pointwise(B, bundle)
        + grad_p_pointwise(thermo, bundle)
        + grad_magnetic_pressure_pointwise(B, bundle)
    )
    if F is not None:
        V = V - rho * F
    return V


def momentum_flux_residual_pointwise(rho, u, B, thermo: ThermoPoint, bundle: GradientBundle, F=None):
    """W = V + div(rho u) u, expanded form of the mass-flux correction."""
    V = convective_residual_pointwise(rho, u, B, thermo, bundle, F)
    div_rho_u = rho * bundle.div_u + np.einsum("i...,i...->...", u, bundle.rho)
    return V + div_rho_u * u
