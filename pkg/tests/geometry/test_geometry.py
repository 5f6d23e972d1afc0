import math

import numpy as np
import pytest

from fsilab._slip.exceptions import GeometryError
from fsilab._slip.geometry import (
    Cavity,
    Placement,
    SolidShape,
    annulus_quadrature,
    boundary_quadrature,
    cavity_boundary_quadrature,
    cavity_quadrature,
    gap_distance,
    graded_breaks,
    inclusion_test,
    solid_quadrature,
    tubular_coordinates,
    tubular_to_point,
)


def rotation_3d(angle):
    c, s = math.cos(angle), math.sin(angle)
    return [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]


@pytest.mark.parametrize(
    "extents",
    [(1.0,), (1.0, 2.0, 3.0, 4.0), (1.0, 0.0), (-1.0, 2.0)],
)
def test_cavity_rejects_bad_extents(extents):
    with pytest.raises(ValueError):
        Cavity(extents)


def test_cavity_wall_distance():
    cavity = Cavity((2.0, 3.0))
    assert cavity.volume == 6.0
    assert cavity.dimension == 2
    distances = cavity.wall_distance([[1.0, 1.5], [0.25, 2.0], [1.0, 2.9], [3.0, 1.0]])
    assert np.allclose(distances, [1.0, 0.25, 0.1, -1.0])


@pytest.mark.parametrize("radius, density", [(0.0, 1.0), (1.0, 0.0), (-1.0, 2.0)])
def test_shape_requires_positive_values(radius, density):
    with pytest.raises(ValueError):
        SolidShape(radius, density)


def test_shape_volume():
    shape = SolidShape(0.5, 2.0)
    assert shape.volume(2) == pytest.approx(math.pi / 4.0)
    assert shape.volume(3) == pytest.approx(math.pi / 6.0)


def test_gap_distance():
    cavity = Cavity((2.0, 3.0))
    shape = SolidShape(0.5, 1.0)
    assert gap_distance(Placement((1.0, 1.0)), shape, cavity) == pytest.approx(0.5)
    assert gap_distance(Placement((0.5, 1.0)), shape, cavity) == 0.0
    with pytest.raises(GeometryError):
        gap_distance(Placement((0.25, 1.0)), shape, cavity)


def test_placement_orientation_checks():
    with pytest.raises(ValueError):
        Placement((0.0, 0.0), [[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        Placement((0.0, 0.0, 0.0), 0.3)
    with pytest.raises(ValueError):
        Placement((0.0, 0.0, 0.0), [[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    placement = Placement((0.0, 0.0, 0.0), rotation_3d(0.4))
    assert placement.orthogonality_defect < 1e-12


@pytest.mark.parametrize(
    "placement",
    [Placement((1.0, 2.0), 0.7), Placement((1.0, 2.0, -1.0), rotation_3d(1.1))],
)
def test_body_frame_round_trip(placement):
    points = np.random.default_rng(3).uniform(-2.0, 2.0, size=(10, placement.dimension))
    back = placement.from_body(placement.to_body(points))
    assert np.allclose(back, points, atol=1e-13)
    # distances are preserved
    offsets = placement.to_body(points)
    assert np.allclose(
        np.linalg.norm(offsets, axis=-1),
        np.linalg.norm(points - placement.center_array, axis=-1),
    )


def test_tubular_coordinates_disk():
    placement = Placement((1.0, 1.0), math.pi / 2)
    shape = SolidShape(0.5, 1.0)
    # world point straight above the center lies at body angle 0
    coord = tubular_coordinates([1.0, 1.75], placement, shape)
    assert coord.z == pytest.approx(0.25)
    assert coord.s == pytest.approx(0.0, abs=1e-12)
    assert coord.scale == pytest.approx((1.5, 1.0))
    assert np.allclose(tubular_to_point(coord, placement, shape), [1.0, 1.75])


@pytest.mark.parametrize(
    "placement",
    [Placement((0.3, -0.2), 0.4), Placement((0.3, -0.2, 0.5), rotation_3d(0.8))],
)
def test_tubular_round_trip(placement):
    shape = SolidShape(1.0, 1.0)
    rng = np.random.default_rng(11)
    directions = rng.normal(size=(20, placement.dimension))
    directions /= np.linalg.norm(directions, axis=-1)[:, None]
    radii = rng.uniform(0.6, 2.0, size=20)
    points = placement.center_array + radii[:, None] * directions
    coord = tubular_coordinates(points, placement, shape)
    assert np.allclose(coord.z, radii - 1.0)
    assert np.allclose(tubular_to_point(coord, placement, shape), points, atol=1e-12)


def test_tubular_coordinates_reach():
    with pytest.raises(GeometryError):
        tubular_coordinates([0.1, 0.0], Placement((0.0, 0.0)), SolidShape(1.0, 1.0))


def test_boundary_quadrature_disk():
    placement = Placement((1.0, -1.0), 0.3)
    rule = boundary_quadrature(placement, SolidShape(0.5, 1.0))
    assert rule.total == pytest.approx(math.pi)
    # ∮ n·(x − c) ds = r·|∂S|
    flux = rule.integrate(np.sum(rule.normals * (rule.nodes - placement.center_array), axis=-1))
    assert flux == pytest.approx(0.5 * math.pi)
    assert np.allclose(np.linalg.norm(rule.nodes - placement.center_array, axis=-1), 0.5)


def test_boundary_quadrature_ball():
    placement = Placement((0.0, 0.0, 0.0), rotation_3d(0.2))
    rule = boundary_quadrature(placement, SolidShape(2.0, 1.0), order=12)
    assert rule.total == pytest.approx(16.0 * math.pi)
    assert rule.integrate(rule.nodes[:, 2] ** 2) == pytest.approx(4.0 * math.pi * 16.0 / 3.0)


def test_annulus_and_solid_quadrature():
    placement = Placement((0.5, 0.5))
    annulus = annulus_quadrature(placement, 1.0, 2.0, breaks=[1.1, 1.5, 5.0])
    assert annulus.total == pytest.approx(3.0 * math.pi)
    disk = solid_quadrature(placement, SolidShape(1.0, 1.0))
    second_moment = disk.integrate(np.sum((disk.nodes - 0.5) ** 2, axis=-1))
    assert second_moment == pytest.approx(math.pi / 2.0)
    ball = solid_quadrature(Placement((0.0, 0.0, 0.0), np.eye(3)), SolidShape(1.0, 1.0), 10)
    assert ball.total == pytest.approx(4.0 * math.pi / 3.0)


def test_annulus_rejects_bad_radii():
    with pytest.raises(GeometryError):
        annulus_quadrature(Placement((0.0, 0.0)), 2.0, 1.0)
    with pytest.raises(GeometryError):
        annulus_quadrature(Placement((0.0, 0.0)), 0.0, 1.0, order=0)


def test_graded_breaks_accumulate():
    breaks = graded_breaks(1.0, 2.0, levels=4)
    assert breaks == pytest.approx([1.5, 1.25, 1.125, 1.0625])


def test_cavity_quadrature():
    cavity = Cavity((2.0, 3.0))
    rule = cavity_quadrature(cavity, 3)
    assert rule.total == pytest.approx(6.0)
    assert rule.integrate(rule.nodes[:, 0] ** 2) == pytest.approx(8.0)
    box = cavity_quadrature(Cavity((1.0, 2.0, 3.0)), [1, 2, 3], order=4)
    assert box.total == pytest.approx(6.0)


def test_cavity_boundary_quadrature_divergence_theorem():
    cavity = Cavity((2.0, 3.0))
    rule = cavity_boundary_quadrature(cavity, 2)
    assert rule.total == pytest.approx(10.0)
    # ∮ x·n ds = d·|Ω|
    assert rule.integrate(np.sum(rule.nodes * rule.normals, axis=-1)) == pytest.approx(12.0)
    box = cavity_boundary_quadrature(Cavity((1.0, 1.0, 1.0)), 1, order=2)
    assert box.total == pytest.approx(6.0)


def test_inclusion_test():
    shape = SolidShape(1.0, 1.0)
    a = Placement((0.0, 0.0))
    b = Placement((0.05, 0.0))
    assert inclusion_test(a, b, 0.1, shape, shape)
    assert not inclusion_test(a, b, 0.01, shape, shape)
    # a smaller disk fits in a larger one
    assert inclusion_test(b, a, 0.01, SolidShape(0.5, 1.0), shape)
    with pytest.raises(GeometryError):
        inclusion_test(a, b, 0.0)
