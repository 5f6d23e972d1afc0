import logging
import math

import attr
import numpy as np

from .exceptions import GeometryError


LOG = logging.getLogger("fsilab.slip")

# Angular panels of the composite Gauss rules on circles and spheres.
ANGULAR_PANELS = 8


def _float_tuple(values):
    return tuple(float(v) for v in values)


def _positive(instance, attribute, value):
    # pylint: disable=unused-argument
    if not value > 0:
        raise ValueError("%s must be strictly positive, got %r" % (attribute.name, value))


def _orientation(value):
    if np.ndim(value) == 0:
        return float(value)
    return tuple(tuple(float(x) for x in row) for row in np.asarray(value))


def rotation_2d(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


@attr.s(frozen=True)
class Cavity(object):
    """Axis-aligned cavity [0, L_1] x ... x [0, L_d] in two or three dimensions."""

    extents = attr.ib(converter=_float_tuple)

    @extents.validator
    def _check_extents(self, attribute, value):
        # pylint: disable=unused-argument
        if len(value) not in (2, 3):
            raise ValueError("cavity dimension must be 2 or 3, got %d" % len(value))
        if min(value) <= 0:
            raise ValueError("cavity extents must be strictly positive, got %r" % (value,))

    @property
    def dimension(self):
        return len(self.extents)

    @property
    def volume(self):
        return float(np.prod(self.extents))

    def wall_distance(self, points):
        """Distance of each point to the closest wall (negative outside)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        upper = np.asarray(self.extents)
        return np.min(np.minimum(points, upper - points), axis=-1)


@attr.s(frozen=True)
class SolidShape(object):
    """A disk (2D) or ball (3D) of given radius and density."""

    radius = attr.ib(converter=float, validator=_positive)
    density = attr.ib(converter=float, validator=_positive)

    def volume(self, dimension):
        if dimension == 2:
            return math.pi * self.radius ** 2
        return 4.0 * math.pi * self.radius ** 3 / 3.0


@attr.s(frozen=True)
class Placement(object):
    """Center and orientation of the solid.

    In 2D the orientation is an angle; in 3D it is a rotation matrix stored
    as nested tuples. Body-frame offsets map to the world by
    ``x = center + Q @ offset``.
    """

    center = attr.ib(converter=_float_tuple)
    orientation = attr.ib(default=0.0, converter=_orientation)

    @orientation.validator
    def _check_orientation(self, attribute, value):
        # pylint: disable=unused-argument
        if len(self.center) not in (2, 3):
            raise ValueError("placement center must have 2 or 3 coordinates")
        if len(self.center) == 2 and not isinstance(value, float):
            raise ValueError("2D orientation must be an angle")
        if len(self.center) == 3:
            if isinstance(value, float):
                raise ValueError("3D orientation must be a rotation matrix")
            defect = _orthogonality_defect(np.asarray(value))
            if defect > 1e-12:
                raise ValueError("orientation is not orthogonal (defect %.3e)" % defect)

    @property
    def dimension(self):
        return len(self.center)

    @property
    def center_array(self):
        return np.asarray(self.center)

    @property
    def rotation(self):
        if self.dimension == 2:
            return rotation_2d(self.orientation)
        return np.asarray(self.orientation)

    @property
    def orthogonality_defect(self):
        return _orthogonality_defect(self.rotation)

    def to_body(self, points):
        return (np.asarray(points, dtype=float) - self.center_array) @ self.rotation

    def from_body(self, offsets):
        return self.center_array + np.asarray(offsets, dtype=float) @ self.rotation.T

    def moved(self, center, orientation):
        return attr.evolve(self, center=center, orientation=orientation)


def _orthogonality_defect(matrix):
    return float(np.max(np.abs(matrix.T @ matrix - np.eye(matrix.shape[0]))))


@attr.s(frozen=True, eq=False)
class TubularCoord(object):
    """Surface coordinate(s) s, normal offset z and scale factors.

    For a disk ``s`` is the arc length r*theta in the body frame and the
    scale factors are ``(h_s, h_z)``; for a ball ``s`` holds the two arc
    lengths (polar, azimuthal) and the scale factors are ``(h_1, h_2, h_z)``.
    """

    s = attr.ib()
    z = attr.ib()
    scale = attr.ib()


@attr.s(frozen=True, eq=False)
class QuadratureRule(object):
    """Nodes and positive weights, with unit normals for surface rules."""

    nodes = attr.ib()
    weights = attr.ib()
    normals = attr.ib(default=None)

    def __len__(self):
        return len(self.weights)

    def __iter__(self):
        if self.normals is None:
            return iter(zip(self.nodes, self.weights))
        return iter(zip(self.nodes, self.weights, self.normals))

    @property
    def total(self):
        return float(np.sum(self.weights))

    def integrate(self, values):
        """Weighted sum over the leading axis of ``values``."""
        return np.tensordot(self.weights, np.asarray(values), axes=(0, 0))


def gap_distance(placement, shape, cavity):
    """Distance between the solid and the cavity walls.

    Raises GeometryError if the closed solid sticks out of the closed cavity.
    """
    wall = float(cavity.wall_distance(placement.center_array)[0])
    gap = wall - shape.radius
    if gap < -1e-12 * max(1.0, shape.radius):
        raise GeometryError(
            "solid of radius %g centered at %s is not contained in the cavity "
            "(gap %.6g)" % (shape.radius, placement.center, gap)
        )
    return max(gap, 0.0)


def tubular_coordinates(x, placement, shape):
    """Tubular coordinates of one point or an array of points."""
    points = np.asarray(x, dtype=float)
    single = points.ndim == 1
    offsets = placement.to_body(np.atleast_2d(points))
    rho = np.linalg.norm(offsets, axis=-1)
    r = shape.radius
    if np.any(rho <= 0.5 * r):
        raise GeometryError(
            "point(s) within r/2 of the solid center are outside the coordinate reach"
        )
    z = rho - r
    if placement.dimension == 2:
        theta = np.mod(np.arctan2(offsets[:, 1], offsets[:, 0]), 2.0 * math.pi)
        s = r * theta
        scale = ((r + z) / r, np.ones_like(z))
    else:
        polar = np.arccos(np.clip(offsets[:, 2] / rho, -1.0, 1.0))
        azimuth = np.mod(np.arctan2(offsets[:, 1], offsets[:, 0]), 2.0 * math.pi)
        s = np.stack([r * polar, r * azimuth], axis=-1)
        scale = ((r + z) / r, (r + z) * np.sin(polar) / r, np.ones_like(z))
    if single:
        return TubularCoord(
            s=s[0] if s.ndim == 1 else tuple(s[0]),
            z=float(z[0]),
            scale=tuple(float(h[0]) for h in scale),
        )
    return TubularCoord(s=s, z=z, scale=scale)


def tubular_to_point(coord, placement, shape):
    """Inverse of tubular_coordinates."""
    r = shape.radius
    z = np.asarray(coord.z, dtype=float)
    s = np.asarray(coord.s, dtype=float)
    rho = r + z
    if placement.dimension == 2:
        theta = s / r
        offsets = np.stack([rho * np.cos(theta), rho * np.sin(theta)], axis=-1)
    else:
        polar, azimuth = s[..., 0] / r, s[..., 1] / r
        offsets = np.stack(
            [
                rho * np.sin(polar) * np.cos(azimuth),
                rho * np.sin(polar) * np.sin(azimuth),
                rho * np.cos(polar),
            ],
            axis=-1,
        )
    return placement.from_body(offsets)


def gauss_interval(lower, upper, order):
    """Gauss-Legendre nodes and weights on [lower, upper]."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (upper - lower)
    return lower + half * (nodes + 1.0), half * weights


def composite_gauss(lower, upper, panels, order):
    edges = np.linspace(lower, upper, panels + 1)
    parts = [gauss_interval(a, b, order) for a, b in zip(edges[:-1], edges[1:])]
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def _check_order(order):
    if order < 1:
        raise GeometryError("quadrature order must be at least 1, got %r" % order)


def _unit_sphere_rule(order):
    # Gauss in cos(polar) times composite Gauss in azimuth.
    cosines, w_cos = gauss_interval(-1.0, 1.0, order)
    azimuth, w_az = composite_gauss(0.0, 2.0 * math.pi, ANGULAR_PANELS, order)
    c, a = np.meshgrid(cosines, azimuth, indexing="ij")
    sines = np.sqrt(1.0 - c ** 2)
    directions = np.stack([sines * np.cos(a), sines * np.sin(a), c], axis=-1)
    weights = np.outer(w_cos, w_az)
    return directions.reshape(-1, 3), weights.reshape(-1)


def _unit_circle_rule(order, angle):
    theta, w_theta = composite_gauss(0.0, 2.0 * math.pi, ANGULAR_PANELS, order)
    theta = theta + angle
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1), w_theta


def _directions(placement, order):
    if placement.dimension == 2:
        return _unit_circle_rule(order, placement.orientation)
    directions, weights = _unit_sphere_rule(order)
    return directions @ placement.rotation.T, weights


def boundary_quadrature(placement, shape, order=16):
    """Quadrature on the solid boundary with outward unit normals.

    Nodes are attached to the body so the rule moves isometrically with the
    solid; the tangential jacobian of the motion is 1.
    """
    _check_order(order)
    directions, weights = _directions(placement, order)
    r = shape.radius
    nodes = placement.center_array + r * directions
    return QuadratureRule(
        nodes=nodes,
        weights=weights * r ** (placement.dimension - 1),
        normals=directions,
    )


def annulus_quadrature(placement, inner, outer, order=16, breaks=()):
    """Quadrature on {inner <= |x - x_S| <= outer} with radial panels.

    ``breaks`` are extra panel edges, used to align panels with kinks of the
    integrand (cutoff supports, thin layers).
    """
    _check_order(order)
    if not 0.0 <= inner < outer:
        raise GeometryError("invalid annulus radii [%g, %g]" % (inner, outer))
    edges = sorted(set([inner, outer] + [b for b in breaks if inner < b < outer]))
    radial = [gauss_interval(a, b, order) for a, b in zip(edges[:-1], edges[1:])]
    radii = np.concatenate([p[0] for p in radial])
    w_radii = np.concatenate([p[1] for p in radial])
    dimension = placement.dimension
    w_radii = w_radii * radii ** (dimension - 1)
    directions, w_dir = _directions(placement, order)
    nodes = placement.center_array + radii[:, None, None] * directions[None, :, :]
    weights = np.outer(w_radii, w_dir)
    return QuadratureRule(nodes=nodes.reshape(-1, dimension), weights=weights.reshape(-1))


def solid_quadrature(placement, shape, order=16):
    """Quadrature on the solid, polar (2D) or spherical (3D) Gauss rule."""
    return annulus_quadrature(placement, 0.0, shape.radius, order)


def graded_breaks(inner, outer, levels=12, ratio=0.5):
    """Panel edges accumulating geometrically at the inner radius."""
    width = outer - inner
    return [inner + width * ratio ** k for k in range(1, levels + 1)]


def cavity_quadrature(cavity, panels, order=8):
    """Tensor composite Gauss rule on the cavity with ``panels`` per axis."""
    _check_order(order)
    if np.ndim(panels) == 0:
        panels = [int(panels)] * cavity.dimension
    axes = [composite_gauss(0.0, length, p, order) for length, p in zip(cavity.extents, panels)]
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    weights = np.ones_like(grids[0])
    for axis, (_, w) in enumerate(axes):
        shape = [1] * cavity.dimension
        shape[axis] = -1
        weights = weights * w.reshape(shape)
    nodes = np.stack([g.reshape(-1) for g in grids], axis=-1)
    return QuadratureRule(nodes=nodes, weights=weights.reshape(-1))


def cavity_boundary_quadrature(cavity, panels, order=8):
    """Composite Gauss rule on the cavity walls with outward normals."""
    _check_order(order)
    dimension = cavity.dimension
    if np.ndim(panels) == 0:
        panels = [int(panels)] * dimension
    nodes, weights, normals = [], [], []
    for axis in range(dimension):
        others = [a for a in range(dimension) if a != axis]
        rules = [composite_gauss(0.0, cavity.extents[a], panels[a], order) for a in others]
        grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
        w = np.ones_like(grids[0])
        for i, (_, wr) in enumerate(rules):
            shape = [1] * len(others)
            shape[i] = -1
            w = w * wr.reshape(shape)
        for side, position in ((-1.0, 0.0), (1.0, cavity.extents[axis])):
            wall = np.zeros((w.size, dimension))
            wall[:, axis] = position
            for i, a in enumerate(others):
                wall[:, a] = grids[i].reshape(-1)
            normal = np.zeros((w.size, dimension))
            normal[:, axis] = side
            nodes.append(wall)
            weights.append(w.reshape(-1))
            normals.append(normal)
    return QuadratureRule(
        nodes=np.concatenate(nodes),
        weights=np.concatenate(weights),
        normals=np.concatenate(normals),
    )


def inclusion_test(placement_a, placement_b, h, shape_a=None, shape_b=None):
    """True iff solid A lies in the h-neighborhood of solid B.

    Without shapes the solids are taken congruent, and the test reduces to
    comparing the center distance with h.
    """
    if not h > 0:
        raise GeometryError("neighborhood width must be positive, got %r" % h)
    distance = float(np.linalg.norm(placement_a.center_array - placement_b.center_array))
    radius_a = shape_a.radius if shape_a is not None else 0.0
    radius_b = shape_b.radius if shape_b is not None else radius_a
    return distance + radius_a <= radius_b + h + 1e-12
