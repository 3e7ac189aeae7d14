"""Trigonometric manufactured fields with exact derivatives.

These are the oracles for the identity suite, the entropy-form
equivalence checks and the residual convergence studies: every field is
a trigonometric polynomial whose first (and second) derivatives are
known in closed form, so finite-difference results can be compared
against exact values at any resolution.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .grid import Grid, PERIODIC
from .regularization import GradientBundle
from .system import FieldState

TWO_PI = 2.0 * np.pi


class TrigScalar:
    """offset + sum_m a_m sin(k_m . x + phi_m)."""

    def __init__(self, offset=0.0, terms=()):
        self.offset = float(offset)
        self.terms = [
            (float(a), np.asarray(k, dtype=float).reshape(3), float(phi))
            for a, k, phi in terms
        ]

    @classmethod
    def from_modes(cls, extent, modes=(), offset=0.0):
        """Build with integer mode numbers: k_axis = 2 pi m_axis / L_axis.

        `modes` is a list of (amplitude, (m1, m2, m3), phase); mode numbers
        on axes beyond the grid dimension are ignored (k = 0 there).
        """
        extent = tuple(extent)
        terms = []
        for a, m, phi in modes:
            k = np.zeros(3)
            for axis, L in enumerate(extent):
                k[axis] = TWO_PI * m[axis] / L
            terms.append((a, k, phi))
        return cls(offset=offset, terms=terms)

    def _phases(self, x):
        # x has shape (3, ...); returns list of phase arrays
        return [np.einsum("i,i...->...", k, x) + phi for _, k, phi in self.terms]

    def value(self, x):
        out = np.full(np.shape(x)[1:], self.offset)
        for (a, _, _), ph in zip(self.terms, self._phases(x)):
            out = out + a * np.sin(ph)
        return out

    def grad(self, x):
        out = np.zeros((3,) + np.shape(x)[1:])
        for (a, k, _), ph in zip(self.terms, self._phases(x)):
            c = a * np.cos(ph)
            for i in range(3):
                if k[i] != 0.0:
                    out[i] += k[i] * c
        return out

    def hess(self, x):
        out = np.zeros((3, 3) + np.shape(x)[1:])
        for (a, k, _), ph in zip(self.terms, self._phases(x)):
            s = a * np.sin(ph)
            for i in range(3):
                for j in range(3):
                    if k[i] != 0.0 and k[j] != 0.0:
                        out[i, j] -= k[i] * k[j] * s
        return out

    def check_commensurate(self, grid: Grid):
        """Wavevectors on periodic axes must fit the extent exactly."""
        for _, k, _ in self.terms:
            for axis in range(grid.ndim):
                if grid.boundary[axis] != PERIODIC:
                    continue
                cycles = k[axis] * grid.extent[axis] / TWO_PI
                if abs(cycles - round(cycles)) > 1e-9:
                    raise ConfigurationError(
                        f"wavevector component {k[axis]} is incommensurate with "
                        f"periodic extent {grid.extent[axis]} on axis {axis}"
                    )


class PotentialDeriv:
    """A signed partial derivative of a potential, itself a scalar expression.

    Used to build analytically divergence-free 2D fields:
    B = (dA/dy, -dA/dx, *) from a scalar potential A.
    """

    def __init__(self, base: TrigScalar, axis: int, sign: float = 1.0):
        self.base = base
        self.axis = axis
        self.sign = float(sign)

    def value(self, x):
        return self.sign * self.base.grad(x)[self.axis]

    def grad(self, x):
        return self.sign * self.base.hess(x)[self.axis]

    def check_commensurate(self, grid: Grid):
        self.base.check_commensurate(grid)


def constant(value):
    return TrigScalar(offset=value)


def divergence_free_B(extent, ndim, b1=0.0, potential: TrigScalar = None,
                      b2: TrigScalar = None, b3: TrigScalar = None):
    """Analytically divergence-free magnetic field components.

    1D: B1 must be constant, B2/B3 free functions of x.
    2D: (B1, B2) = (dA/dy, -dA/dx) from a potential A, B3 free.
    """
    if b3 is None:
        b3 = constant(0.0)
    if ndim == 1:
        if b2 is None:
            b2 = constant(0.0)
        return (constant(b1), b2, b3)
    if potential is None:
        potential = constant(0.0)
    B1 = PotentialDeriv(potential, axis=1, sign=1.0)
    B2 = PotentialDeriv(potential, axis=0, sign=-1.0)
    if b1 != 0.0:
        raise ConfigurationError("in 2D the in-plane field comes from the potential only")
    if b2 is not None:
        raise ConfigurationError("in 2D the in-plane field comes from the potential only")
    return (B1, B2, b3)


@dataclass
class ManufacturedState:
    """A smooth analytic state: rho, theta, u and (divergence-free) B."""

    rho: object
    theta: object
    u: tuple
    B: tuple

    def _exprs(self):
        return [self.rho, self.theta, *self.u, *self.B]

    def check_commensurate(self, grid: Grid):
        for e in self._exprs():
            e.check_commensurate(grid)

    def sample(self, grid: Grid, t: float = 0.0) -> FieldState:
        self.check_commensurate(grid)
        x = grid.coords()
        u = np.stack([np.broadcast_to(c.value(x), grid.shape) for c in self.u])
        B = np.stack([np.broadcast_to(c.value(x), grid.shape) for c in self.B])
        return FieldState(
            grid=grid,
            rho=np.broadcast_to(self.rho.value(x), grid.shape).copy(),
            u=u,
            theta=np.broadcast_to(self.theta.value(x), grid.shape).copy(),
            B=B,
            t=t,
        ).validate()

    def gradients(self, grid: Grid) -> GradientBundle:
        """Exact gradient bundle sampled at the cell centers."""
        x = grid.coords()
        return self.gradients_at(x)

    def gradients_at(self, x) -> GradientBundle:
        shape = np.shape(x)[1:]
        grad_u = np.zeros((3, 3) + shape)
        grad_B = np.zeros((3, 3) + shape)
        for j in range(3):
            grad_u[:, j] = self.u[j].grad(x)
            grad_B[:, j] = self.B[j].grad(x)
        return GradientBundle(
            rho=self.rho.grad(x), theta=self.theta.grad(x), u=grad_u, B=grad_B
        )

    def values_at(self, x):
        """(rho, u, theta, B) arrays at arbitrary coordinates."""
        shape = np.shape(x)[1:]
        u = np.stack([np.broadcast_to(c.value(x), shape) for c in self.u])
        B = np.stack([np.broadcast_to(c.value(x), shape) for c in self.B])
        rho = np.broadcast_to(self.rho.value(x), shape).copy()
        theta = np.broadcast_to(self.theta.value(x), shape).copy()
        return rho, u, theta, B


def _random_trig(rng, extent, ndim, offset, amplitude, n_terms=2, max_mode=2):
    terms = []
    for _ in range(n_terms):
        m = np.zeros(3, dtype=int)
        while not np.any(m[:ndim]):
            m[:ndim] = rng.integers(-max_mode, max_mode + 1, size=ndim)
        amp = amplitude * rng.uniform(0.3, 1.0) / n_terms
        terms.append((amp, m, rng.uniform(0.0, TWO_PI)))
    pad_extent = tuple(extent) + (1.0,) * (3 - len(extent))
    return TrigScalar.from_modes(pad_extent, terms, offset=offset)


def random_manufactured_state(rng, extent, ndim, rho0=None, theta0=None,
                              u_amp=1.0, b_amp=1.0, rel_amp=0.2) -> ManufacturedState:
    """Seeded random smooth state within the sampler bounds.

    rho and theta stay within [0.1, 10] with smooth trig perturbations;
    velocity and magnetic amplitudes are bounded; B is built
    divergence-free (constant B1 in 1D, from a potential in 2D).
    """
    if rho0 is None:
        rho0 = rng.uniform(0.5, 4.0)
    if theta0 is None:
        theta0 = rng.uniform(0.5, 4.0)
    rho = _random_trig(rng, extent, ndim, rho0, rel_amp * rho0)
    theta = _random_trig(rng, extent, ndim, theta0, rel_amp * theta0)
    u = tuple(_random_trig(rng, extent, ndim, 0.0, u_amp) for _ in range(3))
    if ndim == 1:
        B = divergence_free_B(
            extent, 1,
            b1=rng.uniform(-b_amp, b_amp),
            b2=_random_trig(rng, extent, 1, 0.0, b_amp),
            b3=_random_trig(rng, extent, 1, 0.0, b_amp),
        )
    else:
        B = divergence_free_B(
            extent, 2,
            potential=_random_trig(rng, extent, 2, 0.0, b_amp),
            b3=_random_trig(rng, extent, 2, 0.0, b_amp),
        )
    return ManufacturedState(rho=rho, theta=theta, u=u, B=B)
