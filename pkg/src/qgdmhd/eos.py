"""General equations of state p(rho, theta), eps(rho, theta).

Every EOS supplies pressure and specific internal energy together with all
four partial derivatives and a closed-form entropy.  Derived quantities
(squared sound speed, c_p) are assembled generically:

    cs2 = p_rho + theta * p_theta**2 / (rho**2 * eps_theta)
    c_p = eps_theta * cs2 / p_rho          (only where p_rho > 0)

Thermodynamic consistency is the Maxwell relation

    p = theta * p_theta + rho**2 * eps_rho

which every built-in EOS satisfies to round-off.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPhysicalStateError, ThermoDomainError

# Relative tolerance for temperature inversion.
INVERT_RTOL = 1e-12
_NEWTON_MAX_ITER = 50


@dataclass(frozen=True)
class ThermoPoint:
    """All thermodynamic quantities evaluated at one (rho, theta) sample.

    Fields are numpy arrays broadcast to the common shape of the inputs.
    ``c_p`` is NaN wherever ``p_rho`` is not strictly positive.
    """

    p: np.ndarray
    eps: np.ndarray
    p_rho: np.ndarray
    p_theta: np.ndarray
    eps_rho: np.ndarray
    eps_theta: np.ndarray
    s: np.ndarray
    cs2: np.ndarray
    c_p: np.ndarray


def _validate_positive(name, value):
    value = np.asarray(value, dtype=float)
    if value.size and np.min(value) <= 0.0:
        bad = float(np.min(value))
        raise ThermoDomainError(f"{name} must be positive, got min {name} = {bad}")
    return value


class EquationOfState:
    """Base class: analytic p, eps, their partials and entropy."""

    name = "base"

    # --- to be provided by concrete equations of state ------------------
    def pressure(self, rho, theta):
        raise NotImplementedError

    def pressure_rho(self, rho, theta):
        raise NotImplementedError

    def pressure_theta(self, rho, theta):
        raise NotImplementedError

    def energy(self, rho, theta):
        raise NotImplementedError

    def energy_rho(self, rho, theta):
        raise NotImplementedError

    def energy_theta(self, rho, theta):
        raise NotImplementedError

    def entropy(self, rho, theta):
        raise NotImplementedError

    def describe(self) -> dict:
        """Name + parameters, for snapshot metadata."""
        raise NotImplementedError

    # --- derived quantities ---------------------------------------------
    def evaluate(self, rho, theta) -> ThermoPoint:
        rho = _validate_positive("rho", rho)
        theta = _validate_positive("theta", theta)
        p = np.asarray(self.pressure(rho, theta), dtype=float)
        eps = np.asarray(self.energy(rho, theta), dtype=float)
        p_rho = np.broadcast_to(np.asarray(self.pressure_rho(rho, theta), dtype=float), p.shape).copy()
        p_theta = np.broadcast_to(np.asarray(self.pressure_theta(rho, theta), dtype=float), p.shape).copy()
        eps_rho = np.broadcast_to(np.asarray(self.energy_rho(rho, theta), dtype=float), p.shape).copy()
        eps_theta = np.broadcast_to(np.asarray(self.energy_theta(rho, theta), dtype=float), p.shape).copy()
        s = np.broadcast_to(np.asarray(self.entropy(rho, theta), dtype=float), p.shape).copy()
        cs2 = p_rho + theta * p_theta**2 / (rho**2 * eps_theta)
        with np.errstate(divide="ignore", invalid="ignore"):
            c_p = np.where(p_rho > 0.0, eps_theta * cs2 / np.where(p_rho > 0.0, p_rho, 1.0), np.nan)
        return ThermoPoint(p, eps, p_rho, p_theta, eps_rho, eps_theta, s, cs2, c_p)

    def maxwell_residual(self, rho, theta):
        """p - theta*p_theta - rho**2*eps_rho; zero for a consistent EOS."""
        rho = _validate_positive("rho", rho)
        theta = _validate_positive("theta", theta)
        return (
            self.pressure(rho, theta)
            - theta * self.pressure_theta(rho, theta)
            - rho**2 * self.energy_rho(rho, theta)
        )

    def invert_temperature(self, rho, eps, theta_guess=None):
        """Solve energy(rho, theta) = eps for theta.

        Safeguarded Newton with a bisection fallback; eps_theta > 0 makes
        the problem monotone.  Raises NonPhysicalStateError if eps lies
        below the EOS floor (theta would have to be <= 0).
        """
        rho = _validate_positive("rho", rho)
        eps = np.asarray(eps, dtype=float)
        rho, eps = np.broadcast_arrays(rho, eps)
        rho = rho.astype(float, copy=True)
        eps = eps.astype(float, copy=True)
        scalar = eps.ndim == 0
        rho = np.atleast_1d(rho)
        eps = np.atleast_1d(eps)

        # Bracket from below: eps must exceed the energy at a tiny theta.
        lo = np.full_like(eps, 1e-12)
        for _ in range(40):
            too_high = self.energy(rho, lo) >= eps
            if not np.any(too_high):
                break
            lo = np.where(too_high, lo * 1e-4, lo)
            if np.min(lo) < 1e-280:
                break
        if np.any(self.energy(rho, lo) >= eps):
            bad = float(np.min(eps))
            raise NonPhysicalStateError(
                f"internal energy below EOS floor (theta would be <= 0): min eps = {bad}"
            )

        # Bracket from above.
        if theta_guess is not None:
            hi = np.broadcast_to(np.asarray(theta_guess, dtype=float), eps.shape).copy()
            hi = np.maximum(hi, lo * 2.0)
        else:
            hi = np.maximum(np.ones_like(eps), lo * 2.0)
        for _ in range(600):
            too_low = self.energy(rho, hi) < eps
            if not np.any(too_low):
                break
            hi = np.where(too_low, hi * 2.0, hi)
        else:
            raise NonPhysicalStateError("temperature bracket expansion failed")

        theta = 0.5 * (lo + hi)
        if theta_guess is not None:
            guess = np.broadcast_to(np.asarray(theta_guess, dtype=float), eps.shape)
            theta = np.where((guess > lo) & (guess < hi), guess, theta)

        tol = INVERT_RTOL * np.maximum(1.0, np.abs(eps))
        for _ in range(_NEWTON_MAX_ITER):
            f = self.energy(rho, theta) - eps
            done = np.abs(f) <= tol
            if np.all(done):
                break
            lo = np.where(f < 0.0, theta, lo)
            hi = np.where(f > 0.0, theta, hi)
            step = f / self.energy_theta(rho, theta)
            candidate = theta - step
            inside = (candidate > lo) & (candidate < hi)
            theta = np.where(done, theta, np.where(inside, candidate, 0.5 * (lo + hi)))
        else:
            f = self.energy(rho, theta) - eps
            if np.any(np.abs(f) > tol):
                raise NonPhysicalStateError(
                    "temperature inversion did not converge in "
                    f"{_NEWTON_MAX_ITER} iterations (max residual {float(np.max(np.abs(f)))})"
                )
        return float(theta[0]) if scalar else theta


@dataclass(frozen=True)
class IdealGas(EquationOfState):
    """Ideal polytropic gas: p = rho*R*theta, eps = c_v*theta.

    Entropy in closed form: s = c_v*ln(theta) - R*ln(rho) + s0.
    """

    R: float = 1.0
    c_v: float = 1.5
    s0: float = 0.0

    def __post_init__(self):
        if self.R <= 0.0:
            raise ThermoDomainError(f"gas constant R must be positive, got {self.R}")
        if self.c_v <= 0.0:
            raise ThermoDomainError(f"specific heat c_v must be positive, got {self.c_v}")

    name = "ideal"

    @property
    def gamma(self):
        return 1.0 + self.R / self.c_v

    def pressure(self, rho, theta):
        return rho * self.R * theta

    def pressure_rho(self, rho, theta):
        return self.R * theta * np.ones_like(np.asarray(rho, dtype=float))

    def pressure_theta(self, rho, theta):
        return rho * self.R * np.ones_like(np.asarray(theta, dtype=float))

    def energy(self, rho, theta):
        return self.c_v * theta * np.ones_like(np.asarray(rho, dtype=float))

    def energy_rho(self, rho, theta):
        return np.zeros(np.broadcast_shapes(np.shape(rho), np.shape(theta)))

    def energy_theta(self, rho, theta):
        return self.c_v * np.ones(np.broadcast_shapes(np.shape(rho), np.shape(theta)))

    def entropy(self, rho, theta):
        return self.c_v * np.log(theta) - self.R * np.log(rho) + self.s0

    def describe(self):
        return {"type": "ideal", "R": self.R, "c_v": self.c_v, "s0": self.s0}


_EOS_REGISTRY = {"ideal": IdealGas}


def make_eos(kind: str, **params) -> EquationOfState:
    """Build an EOS by name; used by run configurations."""
    try:
        cls = _EOS_REGISTRY[kind]
    except KeyError:
        raise ThermoDomainError(
            f"unknown EOS '{kind}', available: {sorted(_EOS_REGISTRY)}"
        ) from None
    return cls(**params)


def entropy_gradients(rho, theta, thermo: ThermoPoint):
    """Partial derivatives of s(rho, theta).

    From the Gibbs relations combined with the Maxwell relation:
    ds/drho|_theta = -p_theta/rho^2 and ds/dtheta|_rho = eps_theta/theta.
    """
    return -thermo.p_theta / rho**2, thermo.eps_theta / theta
