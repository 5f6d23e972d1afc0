import math

import attr
import numpy as np
from scipy import interpolate, sparse

from ..exceptions import GeometryError, ResolutionError


def _odd(value):
    value = int(value)
    return value if value % 2 else value + 1


def gradient_operator(nodes):
    """Sparse matrix of ``np.gradient(·, nodes, edge_order=2)`` on a uniform grid."""
    count = len(nodes)
    step = (nodes[-1] - nodes[0]) / (count - 1)
    rows, cols, data = [], [], []
    for i in range(1, count - 1):
        rows += [i, i]
        cols += [i - 1, i + 1]
        data += [-0.5 / step, 0.5 / step]
    rows += [0, 0, 0, count - 1, count - 1, count - 1]
    cols += [0, 1, 2, count - 3, count - 2, count - 1]
    data += [-1.5 / step, 2.0 / step, -0.5 / step, 0.5 / step, -2.0 / step, 1.5 / step]
    return sparse.csr_matrix((data, (rows, cols)), shape=(count, count))


def spectral_derivative(values, axis=1, order=1):
    """Derivative in θ of samples on an odd uniform periodic grid."""
    count = values.shape[axis]
    modes = np.fft.rfft(values, axis=axis)
    shape = [1] * values.ndim
    shape[axis] = -1
    wave = (1j * np.arange(modes.shape[axis])) ** order
    return np.fft.irfft(modes * wave.reshape(shape), n=count, axis=axis)


def trig_interpolate(samples, theta):
    """Trigonometric interpolant of periodic samples at angles ``theta``."""
    count = len(samples)
    modes = np.fft.rfft(samples) / count
    k = np.arange(len(modes))
    phases = np.exp(1j * np.multiply.outer(np.asarray(theta, dtype=float), k))
    weights = np.where(k == 0, 1.0, 2.0)
    return np.real(phases @ (weights * modes))


@attr.s(frozen=True, eq=False)
class AnnulusGrid(object):
    """Tubular grid {z0 <= z <= z1} around a disk.

    θ is the body-frame angle on an odd uniform periodic grid; z is the
    uniform normal offset from the boundary, positive outside the solid.
    """

    placement = attr.ib()
    shape = attr.ib()
    z0 = attr.ib(converter=float)
    z1 = attr.ib(converter=float)
    n_s = attr.ib(default=65, converter=_odd)
    n_z = attr.ib(default=65, converter=int)

    @z1.validator
    def _check_band(self, attribute, value):
        # pylint: disable=unused-argument
        if self.placement.dimension != 2:
            raise GeometryError("annulus grids are planar")
        if not self.z0 < value:
            raise GeometryError("empty band [%g, %g]" % (self.z0, value))
        if self.shape.radius + self.z0 <= 0:
            raise GeometryError("band reaches the solid center")

    @n_z.validator
    def _check_sizes(self, attribute, value):
        # pylint: disable=unused-argument
        if value < 5 or self.n_s < 5:
            raise ResolutionError("annulus grid needs at least 5 nodes per direction")

    @property
    def theta(self):
        return 2.0 * math.pi * np.arange(self.n_s) / self.n_s

    @property
    def z(self):
        return np.linspace(self.z0, self.z1, self.n_z)

    @property
    def spacing(self):
        return (self.z1 - self.z0) / (self.n_z - 1)

    @property
    def rho(self):
        return self.shape.radius + self.z

    @property
    def e_rho(self):
        """World-frame radial unit vectors, shape (n_s, 2)."""
        angle = self.theta + self.placement.orientation
        return np.stack([np.cos(angle), np.sin(angle)], axis=-1)

    @property
    def e_theta(self):
        radial = self.e_rho
        return np.stack([-radial[:, 1], radial[:, 0]], axis=-1)

    @property
    def points(self):
        """World coordinates of the nodes, shape (n_z, n_s, 2)."""
        return self.placement.center_array + self.rho[:, None, None] * self.e_rho[None, :, :]

    @property
    def weights(self):
        """Trapezoid-in-z, periodic-in-θ area weights, shape (n_z, n_s)."""
        w_z = np.full(self.n_z, self.spacing)
        w_z[[0, -1]] *= 0.5
        return (w_z * self.rho)[:, None] * np.full(self.n_s, 2.0 * math.pi / self.n_s)

    def gradient_operator(self):
        return gradient_operator(self.z)

    def locate(self, points):
        """Normal offset z and body-frame angle θ of world points."""
        offsets = self.placement.to_body(np.atleast_2d(np.asarray(points, dtype=float)))
        rho = np.linalg.norm(offsets, axis=-1)
        theta = np.mod(np.arctan2(offsets[:, 1], offsets[:, 0]), 2.0 * math.pi)
        return rho - self.shape.radius, theta

    def frame(self, theta):
        angle = np.asarray(theta) + self.placement.orientation
        radial = np.stack([np.cos(angle), np.sin(angle)], axis=-1)
        return radial, np.stack([-radial[..., 1], radial[..., 0]], axis=-1)

    def contains(self, z):
        slack = 1e-12 * max(1.0, self.shape.radius)
        return (z >= self.z0 - slack) & (z <= self.z1 + slack)

    def integrate(self, values):
        return np.tensordot(self.weights, values, axes=([0, 1], [0, 1]))

    def l2_norm(self, values):
        squared = np.asarray(values) ** 2
        if squared.ndim == 3:
            squared = squared.sum(axis=-1)
        return math.sqrt(max(float(self.integrate(squared)), 0.0))

    def d_z(self, values):
        return np.gradient(values, self.z, axis=0, edge_order=2)

    def d_theta(self, values):
        return spectral_derivative(values, axis=1)


def require_resolution(grid, layer_scale, factor=8.0):
    """Reject grids with fewer than ``factor`` nodes per unit of layer width."""
    needed = factor * layer_scale * (grid.z1 - grid.z0) * (1.0 - 1e-12)
    if grid.n_z - 1 < needed:
        raise ResolutionError(
            "band grid has %d normal nodes, at least %d needed to resolve the layer"
            % (grid.n_z, int(math.ceil(needed)) + 1)
        )


@attr.s(frozen=True, eq=False)
class AnnulusField(object):
    """World-frame vector samples on an AnnulusGrid, shape (n_z, n_s, 2)."""

    grid = attr.ib()
    values = attr.ib(converter=lambda v: np.asarray(v, dtype=float))

    @values.validator
    def _check_values(self, attribute, value):
        # pylint: disable=unused-argument
        expected = (self.grid.n_z, self.grid.n_s, 2)
        if value.shape != expected:
            raise ValueError("field shape %s does not match grid %s" % (value.shape, expected))
        if not np.all(np.isfinite(value)):
            raise ValueError("field has non-finite samples")

    @classmethod
    def sample(cls, grid, sampler):
        nodes = grid.points.reshape(-1, 2)
        return cls(grid, np.asarray(sampler(nodes), dtype=float).reshape(grid.n_z, grid.n_s, 2))

    @classmethod
    def from_polar(cls, grid, radial, tangential):
        values = (
            np.asarray(radial)[..., None] * grid.e_rho[None, :, :]
            + np.asarray(tangential)[..., None] * grid.e_theta[None, :, :]
        )
        return cls(grid, values)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros((grid.n_z, grid.n_s, 2)))

    @property
    def radial(self):
        return np.einsum("zsk,sk->zs", self.values, self.grid.e_rho)

    @property
    def tangential(self):
        return np.einsum("zsk,sk->zs", self.values, self.grid.e_theta)

    def divergence(self):
        """Discrete divergence (1/ρ)∂_z(ρ u_ρ) + (1/ρ)∂_θ u_θ."""
        rho = self.grid.rho[:, None]
        return (self.grid.d_z(rho * self.radial) + self.grid.d_theta(self.tangential)) / rho

    def trace(self, side):
        """Samples on the inner (``side=0``) or outer (``side=-1``) circle."""
        return self.values[side]

    def l2_norm(self):
        return self.grid.l2_norm(self.values)

    def interpolate(self, points):
        """Bilinear interpolation in (z, θ); NaN outside the band."""
        z, theta = self.grid.locate(points)
        table = np.concatenate([self.values, self.values[:, :1]], axis=1)
        nodes = (self.grid.z, np.append(self.grid.theta, 2.0 * math.pi))
        query = np.stack([np.clip(z, self.grid.z0, self.grid.z1), theta], axis=-1)
        result = np.empty((len(z), 2))
        for component in range(2):
            interpolator = interpolate.RegularGridInterpolator(
                nodes, table[..., component], bounds_error=False, fill_value=np.nan
            )
            result[:, component] = interpolator(query)
        result[~self.grid.contains(z)] = np.nan
        return result

    def __add__(self, other):
        return AnnulusField(self.grid, self.values + other.values)

    def __sub__(self, other):
        return AnnulusField(self.grid, self.values - other.values)

    def __neg__(self):
        return AnnulusField(self.grid, -self.values)

    def scaled(self, factor):
        """Multiply by a scalar or by per-node weights of shape (n_z, n_s)."""
        return AnnulusField(self.grid, _scale(factor, self.values))


def _scale(factor, values):
    factor = np.asarray(factor, dtype=float)
    if factor.ndim == 0:
        return factor * values
    return factor[..., None] * values
