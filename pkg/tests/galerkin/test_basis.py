import numpy as np
import pytest

from fsilab._slip.exceptions import GapViolationError, SchemeError
from fsilab._slip.galerkin import (
    SimParams,
    assemble_system,
    build_basis,
    build_system,
    cavity_panels,
    kinetic_energy,
    penalization_form,
    quadratic_form,
)
from fsilab._slip.geometry import (
    Cavity,
    Placement,
    SolidShape,
    cavity_boundary_quadrature,
    cavity_quadrature,
    solid_quadrature,
)
from fsilab._slip.rigid_motion import RigidField

CAVITY = Cavity((2.0, 1.5))


def params(**kwargs):
    values = dict(
        rho_fluid=1.0,
        mu_fluid=0.1,
        slip_solid=1.0,
        slip_wall=1.0,
        gravity=(0.0, -1.0),
        band=0.05,
        basis_size=6,
        quadrature_order=8,
    )
    values.update(kwargs)
    return SimParams(**values)


def test_modes_ordered_by_frequency():
    basis = build_basis(Cavity((1.0, 1.0)), 4)
    assert basis.modes == ((1, 1), (1, 2), (2, 1), (2, 2))


def test_basis_orthonormal_and_solenoidal():
    basis = build_basis(CAVITY, 8)
    rule = cavity_quadrature(CAVITY, cavity_panels(basis), 8)

    values = basis.values(rule.nodes)
    gram = np.einsum("imk,jmk,m->ij", values, values, rule.weights)
    assert np.allclose(gram, np.eye(8), atol=1e-10)

    gradients = basis.gradients(rule.nodes)
    divergence = gradients[..., 0, 0] + gradients[..., 1, 1]
    assert np.max(np.abs(divergence)) < 1e-10


def test_basis_tangent_to_walls():
    basis = build_basis(CAVITY, 8)
    walls = cavity_boundary_quadrature(CAVITY, 4, 8)
    flux = np.einsum("imk,mk->im", basis.values(walls.nodes), walls.normals)
    assert np.max(np.abs(flux)) < 1e-10


def test_basis_fields_follow_stream_function():
    basis = build_basis(CAVITY, 5)
    alpha = np.linspace(1.0, -1.0, 5)
    psi = basis.stream_function(alpha)
    point = np.array([[0.7, 0.4]])
    step = 1e-6
    d_x = psi(point + [step, 0.0]) - psi(point - [step, 0.0])
    d_y = psi(point + [0.0, step]) - psi(point - [0.0, step])
    expected = np.stack([d_y, -d_x], axis=-1) / (2 * step)
    assert np.allclose(basis.field(alpha)(point), expected, atol=1e-7)


def test_build_basis_errors():
    with pytest.raises(SchemeError):
        build_basis(CAVITY, 0)
    with pytest.raises(SchemeError):
        build_basis(Cavity((1.0, 1.0, 1.0)), 4)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"penalization": 0.5},
        {"relaxation": 0.0},
        {"relaxation": 1.5},
        {"basis_size": 0},
        {"picard_max_iter": 0},
        {"mu_fluid": 0.0},
        {"band": -1.0},
    ],
)
def test_sim_params_reject(kwargs):
    with pytest.raises(ValueError):
        params(**kwargs)


def test_solid_viscosity():
    assert params(penalization=10.0).solid_viscosity == pytest.approx(0.01)


@pytest.fixture(scope="module")
def system():
    return build_system(CAVITY, SolidShape(0.25, 2.0), params())


def test_assembled_blocks(system):
    placement = Placement((1.0, 0.75))
    alpha = np.array([0.3, -0.2, 0.1, 0.05, -0.1, 0.2])

    matrices = assemble_system(system, placement, alpha)

    assert np.allclose(matrices.convection, -matrices.convection.T)
    for block in (matrices.mass, matrices.dissipation):
        assert np.allclose(block, block.T)
    assert np.min(np.linalg.eigvalsh(matrices.mass)) > 0.0
    assert np.min(np.linalg.eigvalsh(matrices.dissipation)) > -1e-12
    assert kinetic_energy(matrices, alpha) > 0.0
    assert matrices.forcing.shape == (6,)


def test_rigid_projection_matches_sampler(system):
    placement = Placement((1.0, 0.75))
    alpha = np.array([0.3, -0.2, 0.1, 0.05, -0.1, 0.2])
    matrices = assemble_system(system, placement, alpha)

    rigid = matrices.rigid_of(alpha)

    # Adding a rigid field leaves the departure unchanged.
    u = system.basis.field(alpha)
    form = penalization_form(u, placement, system.shape, 1.0, order=8)
    shifted = penalization_form(
        lambda p: u(p) + RigidField((0.1, 0.0), 0.2, placement.center)(p),
        placement,
        system.shape,
        1.0,
        order=8,
    )
    assert form == pytest.approx(shifted, rel=1e-8)
    assert form == pytest.approx(quadratic_form(matrices.penalization, alpha) / 100.0, rel=1e-8)
    rule = solid_quadrature(placement, system.shape, 8)
    mean = rule.integrate(u(rule.nodes)) / rule.total
    assert np.allclose(rigid.translation, mean)


def test_neutral_solid_has_no_forcing():
    system = build_system(CAVITY, SolidShape(0.25, 1.0), params())
    matrices = assemble_system(system, Placement((1.0, 0.75)), np.zeros(6))
    assert np.allclose(matrices.forcing, 0.0)
    assert np.allclose(matrices.mass, np.eye(6))


def test_assembly_rejects_small_gap(system):
    with pytest.raises(GapViolationError):
        assemble_system(system, Placement((1.0, 0.34)), np.zeros(6))
