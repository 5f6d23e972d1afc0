import logging
import math

import attr
import numpy as np

from ..exceptions import GeometryError
from ..rigid_motion import inertial_data, project_rigid
from .blend import blend_tangential_at, tangential
from .divergence import solve_divergence_correction
from .grid import AnnulusField, AnnulusGrid, require_resolution
from .harmonic import harmonic_neumann
from .profile import cutoff

LOG = logging.getLogger("fsilab.slip")


@attr.s(frozen=True, eq=False)
class RigidifiedVelocity(object):
    """Sampler v_h: rigid on (S)_h, equal to u outside (S)_δ.

    On the band h <= z <= δ it is
    ``u + χ((z − h)/h)·tan(P_S u − u) + V₂ + ∇Y`` where V₂ removes the
    divergence of the blend and ∇Y carries the normal mismatch on the
    circle z = h.
    """

    exterior = attr.ib()
    rigid = attr.ib()
    width = attr.ib(converter=float)
    grid = attr.ib()
    correction = attr.ib()
    potential = attr.ib()

    def _weights(self, z):
        return cutoff((z - self.width) / self.width)

    def band_field(self):
        sampled = AnnulusField.sample(self.grid, self.exterior)
        mismatch = tangential(self.rigid(self.grid.points) - sampled.values, self.grid.e_rho)
        blend = self._weights(self.grid.z)[:, None, None] * mismatch
        blended = sampled + AnnulusField(self.grid, blend)
        return blended + self.correction + self.potential.as_field()

    def __call__(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        z, _ = self.grid.locate(points)
        result = np.asarray(self.exterior(points), dtype=float).copy()
        core = z <= self.width
        if np.any(core):
            result[core] = self.rigid(points[core])
        band = ~core & self.grid.contains(z)
        if np.any(band):
            where = points[band]
            blended = blend_tangential_at(
                where,
                result[band],
                self.rigid(where),
                self._weights(z[band]),
                self.grid.placement.center,
            )
            result[band] = (
                blended + self.correction.interpolate(where) + self.potential.gradient(where)
            )
        return result


def rigidify(u, placement, shape, h, band, order=16, n_s=65, n_z=None):
    """Replace ``u`` by its rigid projection on the h-neighborhood of the solid."""
    if not 0.0 < h < 0.5 * band:
        raise GeometryError(
            "rigidification width must satisfy 0 < h < δ/2, got h=%g, δ=%g" % (h, band)
        )
    data = inertial_data(shape, placement, order)
    rigid = project_rigid(u, data, placement, shape, order)
    if n_z is None:
        n_z = max(65, int(math.ceil(8.0 * (band - h) / h)) + 1)
    grid = AnnulusGrid(placement, shape, h, band, n_s=n_s, n_z=n_z)
    require_resolution(grid, 1.0 / h)

    sampled = AnnulusField.sample(grid, u)
    weights = cutoff((grid.z - h) / h)[:, None, None]
    blend = AnnulusField(
        grid, weights * tangential(rigid(grid.points) - sampled.values, grid.e_rho[None, :, :])
    )
    correction = solve_divergence_correction(grid, -blend.divergence())
    inflow = np.sum((rigid(grid.points[0]) - sampled.trace(0)) * grid.e_rho, axis=-1)
    potential = harmonic_neumann(grid, inflow)
    LOG.debug("Rigidified velocity with h=%g on %dx%d band grid", h, grid.n_z, grid.n_s)
    return RigidifiedVelocity(
        exterior=u,
        rigid=rigid,
        width=h,
        grid=grid,
        correction=correction,
        potential=potential,
    )
