import functools
import logging
import math

import attr
import numpy as np

from ..exceptions import IncompatibleDataError
from ..geometry import boundary_quadrature
from ..rigid_motion import RigidField
from .blend import blend_tangential_at, tangential
from .divergence import solve_divergence_correction
from .grid import AnnulusField, AnnulusGrid
from .profile import cutoff

LOG = logging.getLogger("fsilab.slip")

TRACE_TOLERANCE = 1e-8

# Snapshots kept per test function, least recently used dropped first.
SNAPSHOT_CACHE_SIZE = 128


def _rigid_schedule(value):
    if isinstance(value, RigidField):
        return lambda t: value
    return value


@attr.s(frozen=True, eq=False)
class TestFunctionSnapshot(object):
    """Band data of the approximate test function at one instant."""

    # Not a pytest test class.
    __test__ = False

    time = attr.ib()
    grid = attr.ib()
    rigid = attr.ib()
    layer = attr.ib()
    correction = attr.ib()

    @property
    def departure(self):
        """Node values of Φ − φ_S in the band."""
        return self.layer + self.correction

    def interior_l2(self):
        return self.departure.l2_norm()

    def h1_norm(self):
        """H¹ norm of Φ − φ_S over the solid, from grid derivatives."""
        values = self.departure.values
        grid = self.grid
        d_rho = grid.d_z(values)
        d_theta = grid.d_theta(values) / grid.rho[:, None, None]
        squared = np.sum(values ** 2 + d_rho ** 2 + d_theta ** 2, axis=-1)
        return math.sqrt(max(float(grid.integrate(squared)), 0.0))


@attr.s(eq=False)
class ApproximateTestFunction(object):
    """Time-dependent sampler Φ equal to φ_F outside S(t) and to φ_S deep inside.

    In the layer of width ~n^{-α} under the boundary it is
    ``φ_S + χ(n^α |z|)·tan(φ_F − φ_S) + Φ₂`` with Φ₂ the zero-trace
    divergence correction.
    """

    fluid = attr.ib()
    rigid = attr.ib(converter=_rigid_schedule)
    propagator = attr.ib()
    shape = attr.ib()
    params = attr.ib()
    n_s = attr.ib(default=65)
    n_z = attr.ib(default=65)
    order = attr.ib(default=16)
    cache_size = attr.ib(default=SNAPSHOT_CACHE_SIZE)
    _cached = attr.ib(default=None, init=False, repr=False)

    def __attrs_post_init__(self):
        self._cached = functools.lru_cache(maxsize=self.cache_size)(self._build_snapshot)

    @property
    def depth(self):
        return min(0.5 * self.shape.radius, 4.0 / self.params.layer_scale)

    def check_trace(self, t):
        """Raise IncompatibleDataError unless φ_F·ν = φ_S·ν on ∂S(t)."""
        placement = self.propagator.placement_at(t)
        rule = boundary_quadrature(placement, self.shape, self.order)
        fluid = np.asarray(self.fluid(rule.nodes, t))
        rigid = self.rigid(t)(rule.nodes)
        jump = np.sum((fluid - rigid) * rule.normals, axis=-1)
        scale = rule.integrate(np.sum(fluid ** 2, axis=-1) + np.sum(rigid ** 2, axis=-1))
        defect = math.sqrt(rule.integrate(jump ** 2) / max(scale, 1e-300))
        if defect > TRACE_TOLERANCE:
            raise IncompatibleDataError(
                "fluid and rigid test functions have different normal traces at t=%g" % t,
                defect,
            )

    def snapshot(self, t):
        return self._cached(float(t))

    def snapshot_cache_info(self):
        return self._cached.cache_info()

    def _build_snapshot(self, t):
        self.check_trace(t)
        placement = self.propagator.placement_at(t)
        depth = self.depth
        layer_scale = self.params.layer_scale
        n_z = max(self.n_z, int(math.ceil(8.0 * layer_scale * depth)) + 1)
        grid = AnnulusGrid(placement, self.shape, -depth, 0.0, n_s=self.n_s, n_z=n_z)
        rigid = self.rigid(t)
        fluid = AnnulusField.sample(grid, lambda points: self.fluid(points, t))
        weights = cutoff(layer_scale * grid.z)[:, None, None]
        mismatch = tangential(fluid.values - rigid(grid.points), grid.e_rho[None, :, :])
        layer = AnnulusField(grid, weights * mismatch)
        correction = solve_divergence_correction(grid, -layer.divergence())
        snapshot = TestFunctionSnapshot(
            time=t, grid=grid, rigid=rigid, layer=layer, correction=correction
        )
        LOG.debug(
            "Test function layer at t=%g: depth %.3e, %dx%d grid", t, depth, n_z, grid.n_s
        )
        return snapshot

    def __call__(self, points, t):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        snapshot = self.snapshot(t)
        grid = snapshot.grid
        z, _ = grid.locate(points)
        result = np.asarray(self.fluid(points, t), dtype=float).copy()
        inside = z < 0.0
        if np.any(inside):
            result[inside] = snapshot.rigid(points[inside])
        band = inside & grid.contains(z)
        if np.any(band):
            where = points[band]
            weights = cutoff(self.params.layer_scale * z[band])
            fluid = np.asarray(self.fluid(where, t), dtype=float)
            blended = blend_tangential_at(
                where, result[band], fluid, weights, grid.placement.center
            )
            result[band] = blended + snapshot.correction.interpolate(where)
        return result


def approximate_test_function(
    phi_F, phi_S, propagator, shape, params, n_s=65, n_z=65, cache_size=SNAPSHOT_CACHE_SIZE
):
    """Build Φⁿ_S for the fluid test function ``phi_F(points, t)``.

    ``phi_S`` is a RigidField or a callable returning one for each time;
    ``params`` carries n and α. Band snapshots of the last ``cache_size``
    distinct times are reused.
    """
    return ApproximateTestFunction(
        fluid=phi_F,
        rigid=phi_S,
        propagator=propagator,
        shape=shape,
        params=params,
        n_s=n_s,
        n_z=n_z,
        cache_size=cache_size,
    )
