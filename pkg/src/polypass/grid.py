"""Sine-basis discretization of the polyharmonic operator on boxes.

The domain is the box (0, pi)^d with the boundary conditions
u = lap u = ... = lap^(m-1) u = 0, which the product sine basis
phi_k(x) = prod_i sin(k_i x_i) satisfies identically.  In this basis
(-lap)^m is diagonal with eigenvalues (|k|^2)^m, so the inverse operator
is a coefficient division and the order-m inner product is a weighted dot
product.  Integrals use the rectangle rule on the uniform interior nodes
x_j = j pi/(Q+1), which is exact for products of basis functions below the
aliasing threshold.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
import scipy.fft

from . import backend

__all__ = [
    "Grid",
    "SpectralField",
    "polyharmonic_eigenvalue",
    "first_eigenpair",
    "mode_field",
    "zero_field",
    "to_grid",
    "from_grid",
    "inner_product_m",
    "norm_m",
    "lp_norm",
    "apply_inverse_operator",
]


@dataclass(frozen=True)
class Grid:
    """Tensor sine-basis grid on (0, pi)^d.

    ``modes_per_dim`` is the spectral cutoff M; ``quad_points_per_dim``
    the number Q of interior quadrature nodes per dimension (default 4M,
    the dealiasing margin for the pseudo-spectral nonlinear terms).
    """

    d: int
    modes_per_dim: int
    quad_points_per_dim: int | None = None

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"d must be 1 or 2, got {self.d}")
        if self.modes_per_dim < 1:
            raise ValueError("modes_per_dim must be positive")
        if self.quad_points_per_dim is None:
            object.__setattr__(self, "quad_points_per_dim", 4 * self.modes_per_dim)
        if self.quad_points_per_dim < 4 * self.modes_per_dim:
            raise ValueError(
                "quad_points_per_dim must be >= 4*modes_per_dim "
                f"(got Q={self.quad_points_per_dim}, M={self.modes_per_dim})"
            )

    @property
    def mode_shape(self):
        return (self.modes_per_dim,) * self.d

    @property
    def node_shape(self):
        return (self.quad_points_per_dim,) * self.d

    @property
    def spacing(self):
        return np.pi / (self.quad_points_per_dim + 1)

    @property
    def cell_weight(self):
        """Rectangle-rule weight of one node, spacing^d."""
        return self.spacing**self.d

    @property
    def mode_mass(self):
        """L2 norm squared of each basis function, (pi/2)^d."""
        return (np.pi / 2.0) ** self.d

    @functools.cached_property
    def nodes_1d(self):
        x = self.spacing * np.arange(1, self.quad_points_per_dim + 1)
        x.setflags(write=False)
        return x

    def mesh(self):
        """Coordinate arrays of the quadrature nodes (tuple of d arrays)."""
        if self.d == 1:
            return (self.nodes_1d,)
        return tuple(np.meshgrid(self.nodes_1d, self.nodes_1d, indexing="ij"))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Function on the box stored by its sine coefficients.

    Coefficients are indexed by k in {1..M}^d; the represented function is
    sum_k c_k prod_i sin(k_i x_i), which vanishes on the boundary by
    construction.  Instances are immutable.
    """

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=float, copy=True)
        if arr.shape != self.grid.mode_shape:
            raise ValueError(
                f"coefficient shape {arr.shape} does not match grid modes "
                f"{self.grid.mode_shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def __add__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs)

    def __neg__(self):
        return SpectralField(self.grid, -self.coeffs)

    def __mul__(self, scalar):
        return SpectralField(self.grid, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def _check(self, other):
        if not isinstance(other, SpectralField) or other.grid != self.grid:
            raise ValueError("grid mismatch between fields")


def polyharmonic_eigenvalue(k, m):
    """Eigenvalue of (-lap)^m at multi-index k: (sum_i k_i^2)^m."""
    k = tuple(int(ki) for ki in k)
    if any(ki < 1 for ki in k):
        raise ValueError("multi-index components must be >= 1")
    if int(m) < 1:
        raise ValueError("polyharmonic order m must be >= 1")
    return float(sum(ki * ki for ki in k)) ** int(m)


@functools.lru_cache(maxsize=None)
def _eigenvalues(grid: Grid, m: int):
    """Array of (|k|^2)^m over the retained modes, shaped like coefficients."""
    k2 = np.arange(1, grid.modes_per_dim + 1, dtype=float) ** 2
    if grid.d == 1:
        lam = k2**m
    else:
        lam = (k2[:, None] + k2[None, :]) ** m
    lam.setflags(write=False)
    return lam


@functools.lru_cache(maxsize=None)
def _sine_matrix(grid: Grid):
    """(M, Q) matrix sin(k x_q), the one-dimensional synthesis operator."""
    k = np.arange(1, grid.modes_per_dim + 1)
    mat = np.sin(np.outer(k, grid.nodes_1d))
    mat.setflags(write=False)
    return mat


def mode_field(grid, k, amplitude=1.0):
    """The single basis function amplitude * prod_i sin(k_i x_i)."""
    k = tuple(int(ki) for ki in k)
    if len(k) != grid.d:
        raise ValueError(f"multi-index length {len(k)} does not match d={grid.d}")
    if any(not 1 <= ki <= grid.modes_per_dim for ki in k):
        raise ValueError("multi-index outside retained modes")
    c = np.zeros(grid.mode_shape)
    c[tuple(ki - 1 for ki in k)] = amplitude
    return SpectralField(grid, c)


def zero_field(grid):
    return SpectralField(grid, np.zeros(grid.mode_shape))


def first_eigenpair(grid, m):
    """Smallest eigenvalue d^m and its L2-normalized eigenfunction.

    The eigenfunction is prod_i sin(x_i) scaled so its L2 norm is one.
    """
    lam1 = float(grid.d) ** int(m)
    amp = (2.0 / np.pi) ** (grid.d / 2.0)
    return lam1, mode_field(grid, (1,) * grid.d, amplitude=amp)


def _to_grid_array(grid, coeffs):
    pad = np.zeros(grid.node_shape)
    pad[tuple(slice(0, grid.modes_per_dim) for _ in range(grid.d))] = coeffs
    return scipy.fft.dstn(pad, type=1) / 2.0**grid.d


def _from_grid_array(grid, values):
    full = scipy.fft.idstn(np.asarray(values, dtype=float), type=1) * 2.0**grid.d
    sl = tuple(slice(0, grid.modes_per_dim) for _ in range(grid.d))
    return full[sl].copy()


def _to_grid_batch(grid, coeff_stack):
    """Batched synthesis: (B, M, ...) coefficients to (B, Q, ...) values."""
    B = coeff_stack.shape[0]
    pad = np.zeros((B,) + grid.node_shape)
    sl = (slice(None),) + tuple(slice(0, grid.modes_per_dim) for _ in range(grid.d))
    pad[sl] = coeff_stack
    axes = tuple(range(1, grid.d + 1))
    return scipy.fft.dstn(pad, type=1, axes=axes) / 2.0**grid.d


def to_grid(u: SpectralField):
    """Values of u at the quadrature nodes (shape Q^d)."""
    return _to_grid_array(u.grid, u.coeffs)


def from_grid(grid, values):
    """Project node values onto the retained modes (inverse of to_grid)."""
    values = np.asarray(values, dtype=float)
    if values.shape != grid.node_shape:
        raise ValueError(
            f"value array shape {values.shape} does not match grid nodes "
            f"{grid.node_shape}"
        )
    return SpectralField(grid, _from_grid_array(grid, values))


def inner_product_m(u: SpectralField, v: SpectralField, m):
    """Order-m inner product: sum_k (|k|^2)^m c_k(u) c_k(v) ||phi_k||^2."""
    u._check(v)
    lam = _eigenvalues(u.grid, int(m))
    return u.grid.mode_mass * backend.weighted_dot(
        u.coeffs.ravel(), lam.ravel(), v.coeffs.ravel()
    )


def norm_m(u: SpectralField, m):
    return float(np.sqrt(inner_product_m(u, u, m)))


def lp_norm(u: SpectralField, p):
    """Rectangle-rule L^p norm on the interior nodes; p = inf gives max |u|."""
    vals = to_grid(u)
    if p == np.inf:
        return float(np.max(np.abs(vals)))
    p = float(p)
    if p < 1.0:
        raise ValueError("p must be >= 1")
    return float((u.grid.cell_weight * np.sum(np.abs(vals) ** p)) ** (1.0 / p))


def apply_inverse_operator(h: SpectralField, m):
    """Solve (u, phi)_m = int h phi for all retained phi: c_k(h)/(|k|^2)^m."""
    lam = _eigenvalues(h.grid, int(m))
    return SpectralField(h.grid, h.coeffs / lam)
