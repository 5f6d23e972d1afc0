import bisect
import logging

import attr
import numpy as np
from scipy import integrate, linalg

from .exceptions import PropagationError, RigidMotionError
from .geometry import solid_quadrature


LOG = logging.getLogger("fsilab.slip")


def _float_tuple(values):
    return tuple(float(v) for v in values)


def _angular(value):
    if np.ndim(value) == 0:
        return float(value)
    return _float_tuple(value)


def _cross_2d(offsets, values):
    return offsets[..., 0] * values[..., 1] - offsets[..., 1] * values[..., 0]


def _skew(omega):
    wx, wy, wz = omega
    return np.array([[0.0, -wz, wy], [wz, 0.0, -wx], [-wy, wx, 0.0]])


@attr.s(frozen=True)
class RigidField(object):
    """A rigid velocity field V + ω × (x − x_S).

    In 2D the angular velocity is a scalar and ω × r stands for
    ω·(−r_y, r_x).
    """

    translation = attr.ib(converter=_float_tuple)
    angular = attr.ib(converter=_angular)
    center = attr.ib(converter=_float_tuple)

    @center.validator
    def _check_center(self, attribute, value):
        # pylint: disable=unused-argument
        dimension = len(value)
        if dimension not in (2, 3) or len(self.translation) != dimension:
            raise ValueError("translation and center must share dimension 2 or 3")
        if (dimension == 2) != isinstance(self.angular, float):
            raise ValueError("angular velocity must be a scalar in 2D, a vector in 3D")

    @classmethod
    def zero(cls, center):
        dimension = len(center)
        return cls((0.0,) * dimension, 0.0 if dimension == 2 else (0.0,) * 3, center)

    @classmethod
    def from_vector(cls, vector, center):
        """Inverse of to_vector: (V, ω) packed as one flat array."""
        dimension = len(center)
        vector = np.asarray(vector, dtype=float)
        if dimension == 2:
            return cls(vector[:2], vector[2], center)
        return cls(vector[:3], vector[3:6], center)

    @property
    def dimension(self):
        return len(self.center)

    def to_vector(self):
        return np.concatenate([self.translation, np.atleast_1d(self.angular)])

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        offsets = points - np.asarray(self.center)
        if self.dimension == 2:
            spin = self.angular * np.stack([-offsets[..., 1], offsets[..., 0]], axis=-1)
        else:
            spin = np.cross(np.asarray(self.angular), offsets)
        return np.asarray(self.translation) + spin

    def about(self, center):
        """The same field expressed about another reference point."""
        translation = self(np.asarray(center, dtype=float))
        return RigidField(translation, self.angular, center)

    def __add__(self, other):
        other = other.about(self.center)
        return RigidField.from_vector(self.to_vector() + other.to_vector(), self.center)

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def scaled(self, factor):
        return RigidField.from_vector(factor * self.to_vector(), self.center)


@attr.s(frozen=True)
class InertialData(object):
    mass = attr.ib(converter=float)
    center = attr.ib(converter=_float_tuple)
    inertia = attr.ib(converter=_angular)

    @property
    def inertia_matrix(self):
        if len(self.center) == 2:
            return np.array([[self.inertia]])
        return np.asarray(self.inertia).reshape(3, 3)

    @property
    def generalized_inertia(self):
        """Block-diagonal diag(M·I, J) acting on packed (V, ω) vectors."""
        dimension = len(self.center)
        return linalg.block_diag(self.mass * np.eye(dimension), self.inertia_matrix)


def rigid_basis(center):
    """A basis of the rigid fields about ``center``."""
    size = 3 if len(center) == 2 else 6
    return [RigidField.from_vector(np.eye(size)[i], center) for i in range(size)]


def inertial_data(shape, placement, order=16):
    """Mass, center of mass and inertia of the solid by quadrature."""
    rule = solid_quadrature(placement, shape, order)
    rho = shape.density
    mass = rho * rule.total
    center = rho * rule.integrate(rule.nodes) / mass
    offsets = rule.nodes - center
    squared = np.sum(offsets ** 2, axis=-1)
    if placement.dimension == 2:
        inertia = rho * rule.integrate(squared)
    else:
        tensors = squared[:, None, None] * np.eye(3) - offsets[:, :, None] * offsets[:, None, :]
        inertia = rho * rule.integrate(tensors)
        inertia = 0.5 * (inertia + inertia.T)
        inertia = tuple(inertia.reshape(-1))
    return InertialData(mass=mass, center=center, inertia=inertia)


def rigid_moments(values, rule, density, center):
    """The pair (∫ρ u, ∫ρ (x − x_S) × u) over a quadrature rule."""
    offsets = rule.nodes - np.asarray(center)
    momentum = density * rule.integrate(values)
    if offsets.shape[-1] == 2:
        angular = density * rule.integrate(_cross_2d(offsets, values))
    else:
        angular = density * rule.integrate(np.cross(offsets, values))
    return momentum, angular


def project_rigid(u, data, placement, shape, order=16):
    """Weighted L² projection of the sampler ``u`` onto the rigid fields of the solid."""
    rule = solid_quadrature(placement, shape, order)
    values = np.asarray(u(rule.nodes), dtype=float)
    momentum, angular = rigid_moments(values, rule, shape.density, data.center)
    translation = momentum / data.mass
    inertia = data.inertia_matrix
    if placement.dimension == 2:
        scale = data.mass * shape.radius ** 2
        if not data.inertia > 1e-12 * scale:
            raise RigidMotionError("degenerate inertia %.3e" % data.inertia)
        omega = float(angular) / data.inertia
    else:
        condition = np.linalg.cond(inertia)
        if not condition < 1e12:
            raise RigidMotionError(
                "inertia tensor is numerically singular (cond %.3e)" % condition
            )
        omega = linalg.solve(inertia, angular, assume_a="pos")
    return RigidField(translation, omega, data.center)


@attr.s(frozen=True, eq=False)
class Propagator(object):
    """Discrete isometric propagator built from a rigid velocity history.

    ``times`` are the history knots, ``placements`` the snapshots there.
    Between knots the velocities are linear in time; ``_between`` evaluates
    the placement inside a knot interval.
    """

    times = attr.ib(converter=_float_tuple)
    placements = attr.ib(converter=tuple)
    rigid = attr.ib(converter=tuple)
    _between = attr.ib(repr=False)

    @property
    def span(self):
        return self.times[0], self.times[-1]

    @property
    def initial(self):
        return self.placements[0]

    def _interval(self, t):
        start, end = self.span
        slack = 1e-12 * max(1.0, abs(end))
        if t < start - slack or t > end + slack:
            raise PropagationError(
                "time %.6g outside propagator span [%.6g, %.6g]" % (t, start, end)
            )
        t = min(max(t, start), end)
        index = min(max(bisect.bisect_right(self.times, t) - 1, 0), len(self.times) - 2)
        return index, t

    def placement_at(self, t):
        if len(self.times) == 1:
            self._interval(t)
            return self.placements[0]
        index, t = self._interval(t)
        if t == self.times[index]:
            return self.placements[index]
        return self._between(index, t)

    def rigid_at(self, t):
        if len(self.times) == 1:
            return self.rigid[0]
        index, t = self._interval(t)
        t0, t1 = self.times[index], self.times[index + 1]
        weight = (t - t0) / (t1 - t0)
        blended = (1.0 - weight) * self.rigid[index].to_vector() + weight * self.rigid[
            index + 1
        ].about(self.rigid[index].center).to_vector()
        field = RigidField.from_vector(blended, self.rigid[index].center)
        return field.about(self.placement_at(t).center)

    def relative_rotation(self, t, s):
        return self.placement_at(t).rotation @ self.placement_at(s).rotation.T

    def relative(self, t, s, points):
        """φ_{t,s}: maps positions at time s to positions at time t."""
        target, source = self.placement_at(t), self.placement_at(s)
        rotation = target.rotation @ source.rotation.T
        offsets = np.asarray(points, dtype=float) - source.center_array
        return target.center_array + offsets @ rotation.T

    def to_world(self, points, t):
        return self.relative(t, self.span[0], points)

    def to_reference(self, points, t):
        return self.relative(self.span[0], t, points)


def _history(history):
    knots = sorted(((float(t), field) for t, field in history), key=lambda item: item[0])
    if not knots:
        raise PropagationError("empty rigid velocity history")
    times = [t for t, _ in knots]
    if any(b <= a for a, b in zip(times[:-1], times[1:])):
        raise PropagationError("rigid velocity history has repeated times")
    return times, [field for _, field in knots]


def propagate(history, placement, t_span=None, tolerance=1e-10):
    """Integrate the placement along a piecewise-linear rigid velocity history.

    ``history`` is a sequence of (time, RigidField) pairs; the translation of
    each field is the velocity of the center. In 2D the motion is integrated
    in closed form; in 3D the rotation ODE Q' = [ω]×Q is integrated with
    ``solve_ivp`` and re-orthonormalized by a polar decomposition.
    """
    times, fields = _history(history)
    if t_span is not None:
        start, end = t_span
        if start < times[0] - 1e-12 or end > times[-1] + 1e-12:
            raise PropagationError("requested span outside the velocity history")
        keep = [i for i, t in enumerate(times) if start - 1e-12 <= t <= end + 1e-12]
        times = [times[i] for i in keep]
        fields = [fields[i] for i in keep]
    velocities = [np.asarray(f.translation) for f in fields]
    spins = [np.atleast_1d(f.angular) for f in fields]

    if placement.dimension == 2:
        between = _propagate_planar(times, velocities, spins)
    else:
        between = _propagate_spatial(times, velocities, spins, tolerance)

    placements = [placement]
    for index in range(len(times) - 1):
        placements.append(between(placements[index], index, times[index + 1]))
    LOG.debug(
        "Propagated %d knots over [%.6g, %.6g], final center %s",
        len(times),
        times[0],
        times[-1],
        placements[-1].center,
    )
    rigid = [f.about(p.center) for f, p in zip(fields, placements)]

    def evaluate(index, t):
        return between(placements[index], index, t)

    return Propagator(times=times, placements=placements, rigid=rigid, between=evaluate)


def _propagate_planar(times, velocities, spins):
    def between(start, index, t):
        tau = t - times[index]
        width = times[index + 1] - times[index]
        dv = velocities[index + 1] - velocities[index]
        dw = float(spins[index + 1][0] - spins[index][0])
        center = start.center_array + velocities[index] * tau + 0.5 * dv * tau ** 2 / width
        angle = start.orientation + float(spins[index][0]) * tau + 0.5 * dw * tau ** 2 / width
        return start.moved(center, angle)

    return between


def _propagate_spatial(times, velocities, spins, tolerance):
    def between(start, index, t):
        t0, t1 = times[index], times[index + 1]
        width = t1 - t0
        if t == t0:
            return start

        def rhs(s, state):
            weight = (s - t0) / width
            omega = (1.0 - weight) * spins[index] + weight * spins[index + 1]
            return (_skew(omega) @ state.reshape(3, 3)).reshape(-1)

        solution = integrate.solve_ivp(
            rhs,
            (t0, t),
            start.rotation.reshape(-1),
            method="DOP853",
            rtol=tolerance,
            atol=tolerance * 1e-2,
        )
        if solution.status != 0:
            raise PropagationError(
                "rotation integration failed on [%.6g, %.6g]: %s" % (t0, t, solution.message)
            )
        rotation, _ = linalg.polar(solution.y[:, -1].reshape(3, 3))
        tau = t - t0
        dv = velocities[index + 1] - velocities[index]
        center = start.center_array + velocities[index] * tau + 0.5 * dv * tau ** 2 / width
        return start.moved(center, rotation)

    return between


def transport_indicator(propagator, x, t, shape):
    """1 where x lies in the transported solid S(t), 0 elsewhere."""
    reference = propagator.to_reference(np.atleast_2d(np.asarray(x, dtype=float)), t)
    inside = np.linalg.norm(reference - propagator.initial.center_array, axis=-1) <= shape.radius
    inside = inside.astype(int)
    if np.ndim(x) == 1:
        return int(inside[0])
    return inside


def pullback_field(w, propagator, t):
    """The sampler W(y) = Q_rel(t)ᵀ w(φ_{t,0}(y)) on reference positions."""
    rotation = propagator.relative_rotation(t, propagator.span[0])

    def pulled(points):
        return np.asarray(w(propagator.to_world(points, t)), dtype=float) @ rotation

    return pulled


def fixed_placement_propagator(placement, time=0.0):
    """A propagator at rest, used by constructions at a single instant."""
    still = RigidField.zero(placement.center)
    return propagate([(time, still)], placement)

