import logging

import attr
import numpy as np

from ..connect import stream_connection
from ..exceptions import GapViolationError
from ..geometry import (
    annulus_quadrature,
    boundary_quadrature,
    cavity_boundary_quadrature,
    cavity_quadrature,
    gap_distance,
    solid_quadrature,
)
from ..rigid_motion import RigidField, inertial_data, project_rigid
from .basis import build_basis

LOG = logging.getLogger("fsilab.slip")

# Gauss points per panel of the cavity rules.
CAVITY_ORDER = 8


def _positive(instance, attribute, value):
    # pylint: disable=unused-argument
    if not value > 0:
        raise ValueError("%s must be strictly positive, got %r" % (attribute.name, value))


def _vector(values):
    return tuple(float(v) for v in values)


@attr.s(frozen=True)
class SimParams(object):
    """Physical constants of the fluid and knobs of the penalized scheme.

    ``gravity`` is the gravitational acceleration vector; the body force
    density is ρ·gravity. The solid density lives on the SolidShape.
    """

    rho_fluid = attr.ib(converter=float, validator=_positive)
    mu_fluid = attr.ib(converter=float, validator=_positive)
    slip_solid = attr.ib(converter=float, validator=_positive)
    slip_wall = attr.ib(converter=float, validator=_positive)
    gravity = attr.ib(converter=_vector)
    band = attr.ib(converter=float, validator=_positive)
    penalization = attr.ib(default=100.0, converter=float)
    basis_size = attr.ib(default=32, converter=int)
    time_step = attr.ib(default=1e-3, converter=float, validator=_positive)
    picard_tol = attr.ib(default=1e-10, converter=float, validator=_positive)
    picard_max_iter = attr.ib(default=50, converter=int)
    relaxation = attr.ib(default=0.7, converter=float)
    quadrature_order = attr.ib(default=16, converter=int)

    @penalization.validator
    def _check_penalization(self, attribute, value):
        # pylint: disable=unused-argument
        if value < 1.0:
            raise ValueError("penalization must be at least 1, got %r" % value)

    @basis_size.validator
    def _check_basis(self, attribute, value):
        # pylint: disable=unused-argument
        if value < 1:
            raise ValueError("basis_size must be at least 1, got %r" % value)

    @picard_max_iter.validator
    def _check_iterations(self, attribute, value):
        # pylint: disable=unused-argument
        if value < 1:
            raise ValueError("picard_max_iter must be at least 1, got %r" % value)

    @relaxation.validator
    def _check_relaxation(self, attribute, value):
        # pylint: disable=unused-argument
        if not 0.0 < value <= 1.0:
            raise ValueError("relaxation must lie in (0, 1], got %r" % value)

    @quadrature_order.validator
    def _check_order(self, attribute, value):
        # pylint: disable=unused-argument
        if value < 1:
            raise ValueError("quadrature_order must be at least 1, got %r" % value)

    @property
    def solid_viscosity(self):
        return 1.0 / self.penalization ** 2


def strain_products(gradients, weights):
    """Σ_m w 2 D(e_i):D(e_j) for gradients of shape (N, m, 2, 2)."""
    strain = 0.5 * (gradients + np.swapaxes(gradients, -1, -2))
    return 2.0 * np.einsum("imab,jmab,m->ij", strain, strain, weights)


def _tangential(values, normals):
    tangents = np.stack([-normals[:, 1], normals[:, 0]], axis=-1)
    return np.einsum("imk,mk->im", values, tangents)


@attr.s(frozen=True, eq=False)
class GalerkinSystem(object):
    """Static data of a scheme: basis plus placement-independent integrals.

    ``viscous_cavity`` is ∫_Ω 2D(e_i):D(e_j), ``wall_slip`` the wall slip
    form and ``transport[i, j, k]`` is ∫_Ω ((e_k·∇)e_j)·e_i.
    """

    cavity = attr.ib()
    shape = attr.ib()
    params = attr.ib()
    basis = attr.ib()
    viscous_cavity = attr.ib()
    wall_slip = attr.ib()
    transport = attr.ib()

    @property
    def size(self):
        return len(self.basis)


def cavity_panels(basis):
    """Panels per axis of the cavity rules, enough for products of modes."""
    return 3 * max(max(mode) for mode in basis.modes) + 2


def build_system(cavity, shape, params):
    """Build the basis and the static integrals on the cavity."""
    basis = build_basis(cavity, params.basis_size)
    panels = cavity_panels(basis)
    rule = cavity_quadrature(cavity, panels, CAVITY_ORDER)
    values = basis.values(rule.nodes)
    gradients = basis.gradients(rule.nodes)
    viscous = strain_products(gradients, rule.weights)

    walls = cavity_boundary_quadrature(cavity, panels, CAVITY_ORDER)
    traces = _tangential(basis.values(walls.nodes), walls.normals)
    wall_slip = np.einsum("im,jm,m->ij", traces, traces, walls.weights)
    wall_slip = wall_slip / (2.0 * params.slip_wall)

    size = len(basis)
    transport = np.empty((size, size, size))
    weighted = values * rule.weights[None, :, None]
    for k in range(size):
        advected = np.einsum("mb,jmab->jma", values[k], gradients)
        transport[:, :, k] = np.einsum("ima,jma->ij", weighted, advected)
    LOG.debug(
        "Built %d-mode basis on %s cavity with %d quadrature nodes",
        size,
        "x".join("%g" % e for e in cavity.extents),
        len(rule),
    )
    return GalerkinSystem(
        cavity=cavity,
        shape=shape,
        params=params,
        basis=basis,
        viscous_cavity=viscous,
        wall_slip=wall_slip,
        transport=transport,
    )


@attr.s(frozen=True, eq=False)
class SystemMatrices(object):
    """Matrices of A dα/dt + B α = f at one placement.

    ``convection`` is the skew part of the convection matrix; the other
    blocks of B are symmetric positive semidefinite. ``projection`` maps
    coefficients to the packed (V, ω) of the rigid projection.
    """

    mass = attr.ib()
    viscous = attr.ib()
    wall_slip = attr.ib()
    interface_slip = attr.ib()
    penalization = attr.ib()
    convection = attr.ib()
    forcing = attr.ib()
    projection = attr.ib()
    inertia = attr.ib()

    @property
    def dissipation(self):
        return self.viscous + self.wall_slip + self.interface_slip + self.penalization

    @property
    def operator(self):
        return self.convection + self.dissipation

    def rigid_of(self, coefficients):
        vector = self.projection @ np.asarray(coefficients, dtype=float)
        return RigidField.from_vector(vector, self.inertia.center)


def _projection_matrix(values, rule, shape, data):
    offsets = rule.nodes - np.asarray(data.center)
    momentum = shape.density * np.einsum("imk,m->ik", values, rule.weights)
    spin = offsets[:, 0][None, :] * values[..., 1] - offsets[:, 1][None, :] * values[..., 0]
    angular = shape.density * (spin @ rule.weights)
    return np.column_stack([momentum / data.mass, angular / data.inertia]).T


def _rigid_values(projection, nodes, center):
    offsets = nodes - np.asarray(center)
    translation = projection[:2].T[:, None, :]
    spin = projection[2][:, None, None] * np.stack([-offsets[:, 1], offsets[:, 0]], axis=-1)
    return translation + spin


def assemble_system(system, placement, coefficients):
    """Assemble A, the blocks of B and f with the solid at ``placement``.

    The convection block uses the stream-function connection of the
    velocity with coefficients ``coefficients`` to its rigid projection.

    Raises GapViolationError when the solid is within 2δ of the walls.
    """
    params, shape, basis = system.params, system.shape, system.basis
    gap = gap_distance(placement, shape, system.cavity)
    if gap < 2.0 * params.band:
        raise GapViolationError(
            "gap %.6g is below twice the band width %.6g" % (gap, params.band)
        )
    order = params.quadrature_order
    alpha = np.asarray(coefficients, dtype=float)
    size = len(basis)
    rho_fluid, rho_solid = params.rho_fluid, shape.density

    data = inertial_data(shape, placement, order)
    solid = solid_quadrature(placement, shape, order)
    values = basis.values(solid.nodes)
    gradients = basis.gradients(solid.nodes)
    gram = np.einsum("imk,jmk,m->ij", values, values, solid.weights)
    mass = rho_fluid * np.eye(size) + (rho_solid - rho_fluid) * gram

    viscous_solid = strain_products(gradients, solid.weights)
    viscous = params.mu_fluid * system.viscous_cavity
    viscous = viscous - (params.mu_fluid - params.solid_viscosity) * viscous_solid

    projection = _projection_matrix(values, solid, shape, data)
    departure = values - _rigid_values(projection, solid.nodes, data.center)
    penalization = params.penalization * np.einsum(
        "imk,jmk,m->ij", departure, departure, solid.weights
    )

    boundary = boundary_quadrature(placement, shape, order)
    slip = basis.values(boundary.nodes) - _rigid_values(projection, boundary.nodes, data.center)
    traces = _tangential(slip, boundary.normals)
    interface = np.einsum("im,jm,m->ij", traces, traces, boundary.weights)
    interface = interface / (2.0 * params.slip_solid)

    gravity = np.asarray(params.gravity)
    forcing = (rho_solid - rho_fluid) * np.einsum("imk,k,m->i", values, gravity, solid.weights)

    rigid = RigidField.from_vector(projection @ alpha, data.center)
    convection = rho_fluid * np.tensordot(system.transport, alpha, axes=(2, 0))
    if np.any(alpha):
        convection += rho_fluid * _connection_correction(system, placement, alpha, rigid)
        carried = rigid(solid.nodes)
        convection += (rho_solid - rho_fluid) * np.einsum(
            "mb,jmab,ima,m->ij", carried, gradients, values, solid.weights
        )
    skew = 0.5 * (convection - convection.T)

    return SystemMatrices(
        mass=0.5 * (mass + mass.T),
        viscous=0.5 * (viscous + viscous.T),
        wall_slip=system.wall_slip,
        interface_slip=0.5 * (interface + interface.T),
        penalization=0.5 * (penalization + penalization.T),
        convection=skew,
        forcing=forcing,
        projection=projection,
        inertia=data,
    )


def _connection_correction(system, placement, alpha, rigid):
    # ∫ ((v − u)·∇e_j)·e_i over the solid and its band, v the connected field.
    basis, shape, params = system.basis, system.shape, system.params
    radius, band = shape.radius, params.band
    rule = annulus_quadrature(
        placement,
        0.0,
        radius + band,
        params.quadrature_order,
        breaks=[radius, radius + 0.25 * band],
    )
    connected = connecting_field(system, placement, alpha, rigid)
    difference = connected(rule.nodes) - basis.field(alpha)(rule.nodes)
    return np.einsum(
        "mb,jmab,ima,m->ij",
        difference,
        basis.gradients(rule.nodes),
        basis.values(rule.nodes),
        rule.weights,
    )


def connecting_field(system, placement, coefficients, rigid):
    """The connected velocity used by the convection block."""
    basis = system.basis
    return stream_connection(
        basis.field(coefficients),
        basis.stream_function(coefficients),
        rigid,
        system.params.band,
        placement,
        system.shape,
        system.params.quadrature_order,
    )


def penalization_form(u, placement, shape, penalization, order=16):
    """n ∫_S |u − P_S u|² for a velocity sampler."""
    data = inertial_data(shape, placement, order)
    rigid = project_rigid(u, data, placement, shape, order)
    rule = solid_quadrature(placement, shape, order)
    departure = np.asarray(u(rule.nodes)) - rigid(rule.nodes)
    return penalization * float(rule.integrate(np.sum(departure ** 2, axis=-1)))


def quadratic_form(matrix, coefficients):
    alpha = np.asarray(coefficients, dtype=float)
    return float(alpha @ matrix @ alpha)


def kinetic_energy(matrices, coefficients):
    return 0.5 * quadratic_form(matrices.mass, coefficients)
