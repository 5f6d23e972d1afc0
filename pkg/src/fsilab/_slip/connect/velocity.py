import logging
import math

import attr
import numpy as np

from ..exceptions import GeometryError
from ..geometry import boundary_quadrature
from .blend import blend_tangential, blend_tangential_at
from .divergence import solve_divergence_correction
from .grid import AnnulusField, AnnulusGrid, trig_interpolate
from .profile import cutoff, cutoff_derivative

LOG = logging.getLogger("fsilab.slip")


@attr.s(frozen=True, eq=False)
class NormalFluxCorrector(object):
    """Solenoidal W = W₁ + W₂ carrying the normal mismatch off the boundary.

    ``mismatch`` holds (U − U_S)·e_z on the inner circle nodes. W₁ is the
    explicit radial profile χ(2z/δ)·mismatch·e_z, W₂ its zero-trace
    divergence correction on the grid.
    """

    grid = attr.ib()
    mismatch = attr.ib()
    w1 = attr.ib()
    w2 = attr.ib()

    @property
    def field(self):
        return self.w1 + self.w2

    @property
    def band(self):
        return self.grid.z1 - self.grid.z0

    def w1_at(self, points):
        z, theta = self.grid.locate(points)
        radial, _ = self.grid.frame(theta)
        profile = cutoff(2.0 * z / self.band) * trig_interpolate(self.mismatch, theta)
        values = profile[:, None] * radial
        values[~self.grid.contains(z)] = 0.0
        return values

    def __call__(self, points):
        z, _ = self.grid.locate(points)
        correction = self.w2.interpolate(points)
        correction[~self.grid.contains(z)] = 0.0
        return self.w1_at(points) + correction


def normal_flux_corrector(U, U_S, band=None):
    """Build W for the sampled field ``U`` on a grid spanning [0, δ]."""
    grid = U.grid
    if grid.z0 != 0.0 or (band is not None and not math.isclose(grid.z1, band)):
        raise GeometryError("flux corrector grid must span [0, δ] outside the solid")
    delta = grid.z1
    rigid = U_S(grid.points[0])
    mismatch = np.sum((U.trace(0) - rigid) * grid.e_rho, axis=-1)
    profile = cutoff(2.0 * grid.z / delta)[:, None] * mismatch[None, :]
    w1 = AnnulusField.from_polar(grid, profile, np.zeros_like(profile))
    w2 = solve_divergence_correction(grid, -w1.divergence())
    return NormalFluxCorrector(grid=grid, mismatch=mismatch, w1=w1, w2=w2)


@attr.s(frozen=True, eq=False)
class ConnectedVelocity(object):
    """Global sampler equal to U_S on the solid and to U outside the band.

    In the band it is ``U + χ(n z)·tan(U_S − U) + (V₂ − W₂) − W₁`` with the
    blend and W₁ evaluated pointwise and the grid corrections interpolated.
    """

    exterior = attr.ib()
    rigid = attr.ib()
    params = attr.ib()
    grid = attr.ib()
    correction = attr.ib()
    flux = attr.ib()
    blended = attr.ib()

    def band_field(self):
        """Node values V₁ + V₂ − W on the band grid."""
        return self.blended + self.correction - self.flux.w1

    def __call__(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        z, _ = self.grid.locate(points)
        result = np.asarray(self.exterior(points), dtype=float).copy()
        solid = z < 0.0
        band = self.grid.contains(z) & ~solid
        if np.any(solid):
            result[solid] = self.rigid(points[solid])
        if np.any(band):
            inside = points[band]
            weights = cutoff(self.params.sharpness * z[band])
            blended = blend_tangential_at(
                inside, result[band], self.rigid(inside), weights, self.grid.placement.center
            )
            result[band] = (
                blended + self.correction.interpolate(inside) - self.flux.w1_at(inside)
            )
        return result


def connect_velocity(U, U_S, params, placement, shape, n_s=65, n_z=None):
    """Connect the solenoidal sampler ``U`` to the rigid field ``U_S`` across the band."""
    delta = params.band
    if n_z is None:
        n_z = max(65, int(math.ceil(8.0 * params.sharpness * delta)) + 1)
    grid = AnnulusGrid(placement, shape, 0.0, delta, n_s=n_s, n_z=n_z)
    sampled = AnnulusField.sample(grid, U)
    blended = blend_tangential(sampled, U_S, params)
    v2 = solve_divergence_correction(grid, -(blended - sampled).divergence())
    flux = normal_flux_corrector(sampled, U_S, delta)
    LOG.debug(
        "Connected velocity on %dx%d band grid (δ=%g, n=%g)",
        grid.n_z,
        grid.n_s,
        delta,
        params.sharpness,
    )
    return ConnectedVelocity(
        exterior=U,
        rigid=U_S,
        params=params,
        grid=grid,
        correction=v2 - flux.w2,
        flux=flux,
        blended=blended,
    )


def rigid_stream(U_S, points):
    """Stream function of a planar rigid field, u = (∂_y ψ, −∂_x ψ)."""
    offsets = np.asarray(points, dtype=float) - np.asarray(U_S.center)
    vx, vy = U_S.translation
    return (
        vx * offsets[..., 1]
        - vy * offsets[..., 0]
        - 0.5 * U_S.angular * np.sum(offsets ** 2, axis=-1)
    )


@attr.s(frozen=True, eq=False)
class StreamConnection(object):
    """Planar connection by blending stream functions with η = χ(z/δ).

    ``offset`` is the constant added to the rigid stream function, chosen
    as the boundary mean of ψ_U − ψ_S.
    """

    exterior = attr.ib()
    stream = attr.ib()
    rigid = attr.ib()
    band = attr.ib(converter=float)
    placement = attr.ib()
    shape = attr.ib()
    offset = attr.ib(converter=float)

    def _eta(self, points):
        offsets = np.asarray(points, dtype=float) - self.placement.center_array
        rho = np.linalg.norm(offsets, axis=-1)
        z = rho - self.shape.radius
        outside = z > 0.0
        eta = np.where(outside, cutoff(np.maximum(z, 0.0) / self.band), 1.0)
        slope = np.where(outside, cutoff_derivative(np.maximum(z, 0.0) / self.band), 0.0)
        return eta, slope / self.band, offsets / rho[..., None]

    def stream_function(self, points):
        eta, _, _ = self._eta(points)
        psi_rigid = rigid_stream(self.rigid, points) + self.offset
        return (1.0 - eta) * self.stream(points) + eta * psi_rigid

    def __call__(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        eta, slope, normals = self._eta(points)
        jump = rigid_stream(self.rigid, points) + self.offset - self.stream(points)
        curl = slope[:, None] * np.stack([normals[:, 1], -normals[:, 0]], axis=-1)
        return (
            (1.0 - eta)[:, None] * self.exterior(points)
            + eta[:, None] * self.rigid(points)
            + jump[:, None] * curl
        )


def stream_connection(U, psi_U, U_S, band, placement, shape, order=16):
    """Connect through stream functions; ``psi_U`` is the stream function of ``U``."""
    if placement.dimension != 2:
        raise GeometryError("stream-function connection is planar")
    rule = boundary_quadrature(placement, shape, order)
    jump = psi_U(rule.nodes) - rigid_stream(U_S, rule.nodes)
    offset = rule.integrate(jump) / rule.total
    return StreamConnection(
        exterior=U,
        stream=psi_U,
        rigid=U_S,
        band=band,
        placement=placement,
        shape=shape,
        offset=offset,
    )
