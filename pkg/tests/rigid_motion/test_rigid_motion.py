import math

import numpy as np
import pytest

from fsilab._slip.exceptions import PropagationError
from fsilab._slip.geometry import Placement, SolidShape, solid_quadrature
from fsilab._slip.rigid_motion import (
    RigidField,
    fixed_placement_propagator,
    inertial_data,
    project_rigid,
    propagate,
    pullback_field,
    rigid_basis,
    transport_indicator,
)


def test_planar_field_values():
    field = RigidField((1.0, 0.0), 2.0, (0.0, 0.0))
    assert np.allclose(field([0.0, 1.0]), [-1.0, 0.0])
    assert np.allclose(field([[0.0, 0.0], [1.0, 0.0]]), [[1.0, 0.0], [1.0, 2.0]])


def test_spatial_field_values():
    field = RigidField((0.0, 0.0, 1.0), (0.0, 0.0, 1.0), (1.0, 0.0, 0.0))
    assert np.allclose(field([2.0, 0.0, 0.0]), [0.0, 1.0, 1.0])


@pytest.mark.parametrize(
    "translation, angular, center",
    [
        ((1.0, 0.0), (0.0, 0.0, 1.0), (0.0, 0.0)),
        ((1.0, 0.0, 0.0), 1.0, (0.0, 0.0, 0.0)),
        ((1.0, 0.0), 1.0, (0.0, 0.0, 0.0)),
    ],
)
def test_field_dimension_checks(translation, angular, center):
    with pytest.raises(ValueError):
        RigidField(translation, angular, center)


@pytest.mark.parametrize("dimension", [2, 3])
def test_field_arithmetic(dimension):
    rng = np.random.default_rng(dimension)
    size = 3 if dimension == 2 else 6
    a = RigidField.from_vector(rng.normal(size=size), rng.normal(size=dimension))
    b = RigidField.from_vector(rng.normal(size=size), rng.normal(size=dimension))
    points = rng.normal(size=(7, dimension))

    assert np.allclose((a + b)(points), a(points) + b(points))
    assert np.allclose((a - b)(points), a(points) - b(points))
    assert np.allclose(a.scaled(3.0)(points), 3.0 * a(points))
    assert np.allclose(a.about(b.center)(points), a(points))
    assert np.allclose(RigidField.from_vector(a.to_vector(), a.center)(points), a(points))
    assert np.allclose(RigidField.zero(a.center)(points), 0.0)


def test_inertial_data_disk():
    shape = SolidShape(0.5, 2.0)
    data = inertial_data(shape, Placement((1.0, 3.0)))
    mass = 2.0 * math.pi * 0.25
    assert data.mass == pytest.approx(mass)
    assert data.center == pytest.approx((1.0, 3.0))
    assert data.inertia == pytest.approx(0.5 * mass * 0.25)
    assert np.allclose(data.generalized_inertia, np.diag([mass, mass, 0.5 * mass * 0.25]))


def test_inertial_data_ball():
    shape = SolidShape(1.0, 3.0)
    data = inertial_data(shape, Placement((0.0, 0.0, 0.0), np.eye(3)), order=10)
    mass = 4.0 * math.pi
    assert data.mass == pytest.approx(mass)
    assert np.allclose(data.inertia_matrix, 0.4 * mass * np.eye(3))


def test_project_rigid_reproduces_rigid_fields():
    placement = Placement((0.5, 0.5), 0.2)
    shape = SolidShape(0.4, 1.5)
    data = inertial_data(shape, placement)
    field = RigidField((0.3, -0.1), 0.7, placement.center)
    projected = project_rigid(field, data, placement, shape)
    assert np.allclose(projected.to_vector(), field.to_vector())


def test_project_rigid_is_orthogonal():
    """u − P_S u is orthogonal to every rigid field in the density-weighted L²."""
    placement = Placement((0.0, 0.0))
    shape = SolidShape(1.0, 2.0)
    data = inertial_data(shape, placement)

    def u(points):
        x, y = points[..., 0], points[..., 1]
        return np.stack([x * y + 1.0, np.sin(x) + y ** 2], axis=-1)

    projected = project_rigid(u, data, placement, shape)
    rule = solid_quadrature(placement, shape)
    residual = u(rule.nodes) - projected(rule.nodes)
    for xi in rigid_basis(placement.center):
        inner = shape.density * rule.integrate(np.sum(residual * xi(rule.nodes), axis=-1))
        assert inner == pytest.approx(0.0, abs=1e-12)


def test_propagate_planar_linear_velocities():
    start = Placement((0.0, 0.0), 0.0)
    history = [
        (0.0, RigidField((1.0, 0.0), 0.0, start.center)),
        (2.0, RigidField((3.0, 2.0), 1.0, start.center)),
    ]
    propagator = propagate(history, start)
    end = propagator.placement_at(2.0)
    # ∫ v = v0 T + ½ (v1 − v0) T
    assert end.center == pytest.approx((4.0, 2.0))
    assert end.orientation == pytest.approx(1.0)
    middle = propagator.placement_at(1.0)
    assert middle.center == pytest.approx((1.5, 0.5))
    assert propagator.rigid_at(1.0).angular == pytest.approx(0.5)


def test_propagate_spatial_spin():
    start = Placement((0.0, 0.0, 0.0), np.eye(3))
    spin = RigidField((0.0, 0.0, 1.0), (0.0, 0.0, 0.5), start.center)
    propagator = propagate([(0.0, spin), (2.0, spin)], start)
    end = propagator.placement_at(2.0)
    c, s = math.cos(1.0), math.sin(1.0)
    assert np.allclose(end.rotation, [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]], atol=1e-8)
    assert end.center == pytest.approx((0.0, 0.0, 2.0))
    assert end.orthogonality_defect < 1e-12


def test_relative_maps_compose():
    start = Placement((0.2, 0.1), 0.3)
    history = [
        (0.0, RigidField((0.1, 0.2), 0.4, start.center)),
        (0.5, RigidField((-0.2, 0.1), -0.3, start.center)),
        (1.0, RigidField((0.0, 0.3), 0.8, start.center)),
    ]
    propagator = propagate(history, start)
    points = np.random.default_rng(5).normal(size=(6, 2))
    direct = propagator.relative(0.9, 0.1, points)
    composed = propagator.relative(0.9, 0.6, propagator.relative(0.6, 0.1, points))
    assert np.allclose(direct, composed)
    back = propagator.to_reference(propagator.to_world(points, 0.7), 0.7)
    assert np.allclose(back, points)


def test_propagate_history_errors():
    start = Placement((0.0, 0.0))
    still = RigidField.zero(start.center)
    with pytest.raises(PropagationError):
        propagate([], start)
    with pytest.raises(PropagationError):
        propagate([(0.0, still), (0.0, still)], start)
    propagator = propagate([(0.0, still), (1.0, still)], start)
    with pytest.raises(PropagationError):
        propagator.placement_at(1.5)
    with pytest.raises(PropagationError):
        propagate([(0.0, still), (1.0, still)], start, t_span=(0.0, 2.0))


def test_transport_indicator_follows_translation():
    start = Placement((0.0, 0.0))
    moving = RigidField((1.0, 0.0), 0.0, start.center)
    propagator = propagate([(0.0, moving), (1.0, moving)], start)
    shape = SolidShape(0.25, 1.0)
    assert transport_indicator(propagator, [1.0, 0.0], 1.0, shape) == 1
    assert transport_indicator(propagator, [0.0, 0.0], 1.0, shape) == 0
    inside = transport_indicator(propagator, [[0.9, 0.1], [0.5, 0.0]], 1.0, shape)
    assert list(inside) == [1, 0]


def test_pullback_under_translation():
    start = Placement((0.0, 0.0))
    moving = RigidField((0.5, 0.0), 0.0, start.center)
    propagator = propagate([(0.0, moving), (2.0, moving)], start)

    def w(points):
        return np.stack([points[..., 0] ** 2, points[..., 1]], axis=-1)

    pulled = pullback_field(w, propagator, 2.0)
    points = np.array([[0.0, 1.0], [1.0, -1.0]])
    assert np.allclose(pulled(points), w(points + [1.0, 0.0]))


def test_fixed_placement_propagator():
    placement = Placement((1.0, 2.0), 0.5)
    propagator = fixed_placement_propagator(placement)
    assert propagator.placement_at(0.0) == placement
    assert np.allclose(propagator.to_world([[1.0, 1.0]], 0.0), [[1.0, 1.0]])
