"""Uniform Cartesian grids (1D/2D) and central-difference operators.

Vector fields always carry 3 components regardless of the grid dimension
(the usual 1.5D/2.5D convention), stored with the component axes leading:
scalars have shape ``grid.shape``, vectors ``(3, *grid.shape)``, tensors
``(3, 3, *grid.shape)``.  Derivatives along absent axes are identically
zero.  The divergence of a tensor is taken with respect to its first index.

Boundary handling: 'periodic' wraps indices, 'transmissive' extends edge
values (zero-gradient ghost cells of width = stencil radius).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ShapeError

PERIODIC = "periodic"
TRANSMISSIVE = "transmissive"

# 2nd and 4th order central first-derivative stencils (offset -> weight/h).
_STENCILS = {
    2: {-1: -0.5, 1: 0.5},
    4: {-2: 1.0 / 12.0, -1: -8.0 / 12.0, 1: 8.0 / 12.0, 2: -1.0 / 12.0},
}


@dataclass(frozen=True)
class Grid:
    """Cell-centered uniform grid on [0, extent) per axis, d in {1, 2}."""

    shape: tuple
    extent: tuple
    boundary: tuple = ()
    stencil_order: int = 2

    def __post_init__(self):
        shape = tuple(int(n) for n in np.atleast_1d(self.shape))
        extent = tuple(float(L) for L in np.atleast_1d(self.extent))
        boundary = tuple(self.boundary) if self.boundary else (PERIODIC,) * len(shape)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "extent", extent)
        object.__setattr__(self, "boundary", boundary)
        if len(shape) not in (1, 2):
            raise ConfigurationError(f"grid dimension must be 1 or 2, got {len(shape)}")
        if len(extent) != len(shape) or len(boundary) != len(shape):
            raise ConfigurationError("shape, extent and boundary must have equal length")
        if self.stencil_order not in _STENCILS:
            raise ConfigurationError(f"stencil_order must be 2 or 4, got {self.stencil_order}")
        for n in shape:
            if n < 2 * self.stencil_order:
                raise ConfigurationError(
                    f"need at least {2 * self.stencil_order} cells per axis, got {n}"
                )
        for L in extent:
            if L <= 0.0:
                raise ConfigurationError(f"extent must be positive, got {L}")
        for b in boundary:
            if b not in (PERIODIC, TRANSMISSIVE):
                raise ConfigurationError(f"unknown boundary '{b}'")

    @property
    def ndim(self):
        return len(self.shape)

    @property
    def spacing(self):
        return tuple(L / n for L, n in zip(self.extent, self.shape))

    @property
    def h_min(self):
        return min(self.spacing)

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    @property
    def n_cells(self):
        return int(np.prod(self.shape))

    def axis_coords(self, axis):
        """Cell-center coordinates along one axis."""
        h = self.spacing[axis]
        return (np.arange(self.shape[axis]) + 0.5) * h

    def coords(self):
        """Coordinate arrays, shape (3, *grid.shape); absent axes are zero."""
        mesh = np.meshgrid(*(self.axis_coords(a) for a in range(self.ndim)), indexing="ij")
        out = np.zeros((3,) + self.shape)
        for a in range(self.ndim):
            out[a] = mesh[a]
        return out

    def check_scalar(self, f):
        f = np.asarray(f, dtype=float)
        if f.shape != self.shape:
            raise ShapeError(f"scalar field shape {f.shape} != grid shape {self.shape}")
        return f

    def check_vector(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (3,) + self.shape:
            raise ShapeError(f"vector field shape {v.shape} != (3, {self.shape})")
        return v

    def check_tensor(self, t):
        t = np.asarray(t, dtype=float)
        if t.shape != (3, 3) + self.shape:
            raise ShapeError(f"tensor field shape {t.shape} != (3, 3, {self.shape})")
        return t

    def deriv(self, f, axis):
        """Central difference of a scalar field along spatial axis 0..2."""
        f = self.check_scalar(f)
        if axis >= self.ndim:
            return np.zeros_like(f)
        radius = self.stencil_order // 2
        mode = "wrap" if self.boundary[axis] == PERIODIC else "edge"
        pad = [(0, 0)] * self.ndim
        pad[axis] = (radius, radius)
        fp = np.pad(f, pad, mode=mode)
        n = f.shape[axis]
        out = np.zeros_like(f)
        for offset, weight in _STENCILS[self.stencil_order].items():
            sl = [slice(None)] * self.ndim
            sl[axis] = slice(radius + offset, radius + offset + n)
            out += weight * fp[tuple(sl)]
        return out / self.spacing[axis]


def grad(grid: Grid, f) -> np.ndarray:
    """Gradient of a scalar, (3, *shape)."""
    return np.stack([grid.deriv(f, a) for a in range(3)])


def div(grid: Grid, v) -> np.ndarray:
    """Divergence of a 3-component vector field."""
    v = grid.check_vector(v)
    out = np.zeros(grid.shape)
    for a in range(grid.ndim):
        out += grid.deriv(v[a], a)
    return out


def grad_vec(grid: Grid, v) -> np.ndarray:
    """Tensor of partials {d_i v_j}, shape (3, 3, *shape)."""
    v = grid.check_vector(v)
    out = np.zeros((3, 3) + grid.shape)
    for i in range(grid.ndim):
        for j in range(3):
            out[i, j] = grid.deriv(v[j], i)
    return out


def div_tensor(grid: Grid, t) -> np.ndarray:
    """Divergence with respect to the first index: (div T)_j = sum_i d_i T_ij."""
    t = grid.check_tensor(t)
    out = np.zeros((3,) + grid.shape)
    for j in range(3):
        for i in range(grid.ndim):
            out[j] += grid.deriv(t[i, j], i)
    return out


def outer(a, b):
    """Tensor product of two vector fields: (a x b)_ij = a_i b_j."""
    return np.einsum("i...,j...->ij...", a, b)


def dot(a, b):
    """Pointwise inner product of two vector fields."""
    return np.einsum("i...,i...->...", a, b)


def tensor_dot_vec(t, v):
    """(T v)_i = T_ij v_j."""
    return np.einsum("ij...,j...->i...", t, v)


def tensor_inner(a, b):
    """Full contraction A:B = A_ij B_ij."""
    return np.einsum("ij...,ij...->...", a, b)
