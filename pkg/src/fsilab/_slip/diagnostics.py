import logging
import math

import attr
import numpy as np
from scipy import integrate

from .connect import StreamConnection
from .exceptions import IncompatibleDataError, RateStudyError
from .galerkin import cavity_panels, penalization_form
from .galerkin.assembly import CAVITY_ORDER
from .geometry import (
    Placement,
    SolidShape,
    boundary_quadrature,
    cavity_boundary_quadrature,
    cavity_quadrature,
    inclusion_test,
    solid_quadrature,
)
from .rigid_motion import RigidField, inertial_data, project_rigid

LOG = logging.getLogger("fsilab.slip")

# Relative defect of (φ − P_S φ)·ν on the solid boundary tolerated in a test function.
TRACE_TOLERANCE = 1e-6

# Fewest sweep points accepted by a slope fit.
MIN_SWEEP = 4


@attr.s(frozen=True, eq=False)
class SmoothTestFunction(object):
    """A test function φ(points, t) with its derivatives.

    Missing ``gradient`` and ``rate`` (∂_t) are taken by centered
    differences with spacing ``step``. Values are vectors (..., d) for
    momentum tests and scalars for mass tests.
    """

    value = attr.ib()
    gradient = attr.ib(default=None)
    rate = attr.ib(default=None)
    step = attr.ib(default=1e-6)

    def __call__(self, points, t):
        return np.asarray(self.value(points, t), dtype=float)

    def grad(self, points, t):
        """∂_j φ_i indexed [..., i, j] (or [..., j] for scalars)."""
        if self.gradient is not None:
            return np.asarray(self.gradient(points, t), dtype=float)
        points = np.asarray(points, dtype=float)
        columns = []
        for axis in range(points.shape[-1]):
            shift = np.zeros(points.shape[-1])
            shift[axis] = self.step
            upper = self(points + shift, t)
            lower = self(points - shift, t)
            columns.append((upper - lower) / (2.0 * self.step))
        return np.stack(columns, axis=-1)

    def dt(self, points, t):
        if self.rate is not None:
            return np.asarray(self.rate(points, t), dtype=float)
        return (self(points, t + self.step) - self(points, t - self.step)) / (2.0 * self.step)

    def __add__(self, other):
        return SmoothTestFunction(
            value=lambda points, t: self(points, t) + other(points, t),
            gradient=lambda points, t: self.grad(points, t) + other.grad(points, t),
            rate=lambda points, t: self.dt(points, t) + other.dt(points, t),
        )


def time_factor(horizon):
    """τ(t) = (1 − t/T)², vanishing with its derivative at t = T."""

    def factor(t):
        return (1.0 - t / horizon) ** 2

    return factor


def bubble_test_function(center, radius, horizon, amplitude=1.0):
    """Fluid-only test function τ(t)·curl ψ with ψ = A(1 − |x − c|²/R²)⁴ on a disk.

    It vanishes outside the disk of radius ``radius``; the caller keeps that
    disk away from the walls and the solid.
    """
    center = np.asarray(center, dtype=float)
    factor = time_factor(horizon)

    def value(points, t):
        offsets = np.asarray(points, dtype=float) - center
        s = np.sum(offsets ** 2, axis=-1) / radius ** 2
        profile = np.where(s < 1.0, (1.0 - np.minimum(s, 1.0)) ** 3, 0.0)
        scale = 8.0 * amplitude * profile / radius ** 2
        rotated = np.stack([-offsets[..., 1], offsets[..., 0]], axis=-1)
        return factor(t) * scale[..., None] * rotated

    return SmoothTestFunction(value=value)


def density_test_function(center, width, horizon):
    """Scalar Ψ = τ(t)·exp(−|x − c|²/w²) for the mass transport identity."""
    center = np.asarray(center, dtype=float)
    factor = time_factor(horizon)

    def value(points, t):
        offsets = np.asarray(points, dtype=float) - center
        return factor(t) * np.exp(-np.sum(offsets ** 2, axis=-1) / width ** 2)

    def gradient(points, t):
        offsets = np.asarray(points, dtype=float) - center
        return (-2.0 / width ** 2) * value(points, t)[..., None] * offsets

    return SmoothTestFunction(value=value, gradient=gradient)


def trajectory_placement(records, t):
    """Placement at ``t`` by linear interpolation of the recorded placements."""
    times = [r.time for r in records]
    centers = np.asarray([r.center for r in records], dtype=float)
    center = [np.interp(t, times, centers[:, axis]) for axis in range(centers.shape[1])]
    orientation = np.interp(t, times, [r.orientation for r in records])
    return Placement(center, float(orientation))


def rigid_test_function(records, shape, band, rigid, horizon):
    """Test function rigid on the solid, equal to ``rigid`` (a packed (V, ω)) there.

    Outside the solid it is cut off by blending stream functions over the
    band of width ``band``, so it vanishes beyond that band.
    """
    factor = time_factor(horizon)
    vector = np.asarray(rigid, dtype=float)

    def zero_field(points):
        return np.zeros(np.shape(points))

    def zero_stream(points):
        return np.zeros(np.shape(points)[:-1])

    def value(points, t):
        placement = trajectory_placement(records, t)
        field = StreamConnection(
            exterior=zero_field,
            stream=zero_stream,
            rigid=RigidField.from_vector(vector, placement.center),
            band=band,
            placement=placement,
            shape=shape,
            offset=0.0,
        )
        points = np.asarray(points, dtype=float)
        flat = field(points.reshape(-1, points.shape[-1]))
        return factor(t) * flat.reshape(points.shape)

    return SmoothTestFunction(value=value)


@attr.s(frozen=True)
class ResidualReport(object):
    """Signed defect of a weak identity with its term breakdown."""

    value = attr.ib()
    terms = attr.ib()
    tolerance = attr.ib()
    time_step = attr.ib()
    steps = attr.ib()
    nodes = attr.ib()

    @property
    def within_tolerance(self):
        return abs(self.value) <= self.tolerance


@attr.s(frozen=True)
class EnergyReport(object):
    """Both sides of the energy inequality at every accepted step.

    ``lhs`` is the kinetic energy plus the accumulated dissipation, ``rhs``
    the initial energy plus the accumulated work of gravity.
    """

    times = attr.ib(converter=tuple)
    lhs = attr.ib(converter=tuple)
    rhs = attr.ib(converter=tuple)
    tolerance = attr.ib()
    ledger = attr.ib(converter=tuple)

    @property
    def slack(self):
        return tuple(r - l for l, r in zip(self.lhs, self.rhs))

    @property
    def holds(self):
        return all(l <= r + self.tolerance for l, r in zip(self.lhs, self.rhs))


def energy_report(result, constant=1e-6):
    """Check E(t) + ∫ dissipation <= E(0) + ∫ work at every step, up to c·Δt."""
    step = result.time_step
    lhs, rhs, times = [], [], []
    dissipated = work = 0.0
    for row in result.ledger:
        dissipated += step * row.dissipation
        work += step * row.gravity_work
        times.append(row.time)
        lhs.append(row.kinetic + dissipated)
        rhs.append(result.initial_energy + work)
    report = EnergyReport(
        times=times, lhs=lhs, rhs=rhs, tolerance=constant * step, ledger=result.ledger
    )
    if not report.holds:
        LOG.warning(
            "Energy inequality violated: largest excess %.3e over tolerance %.3e",
            max(l - r for l, r in zip(lhs, rhs)),
            report.tolerance,
        )
    return report


def _strain_contraction(grad_u, grad_phi):
    sym_u = 0.5 * (grad_u + np.swapaxes(grad_u, -1, -2))
    sym_phi = 0.5 * (grad_phi + np.swapaxes(grad_phi, -1, -2))
    return 2.0 * np.sum(sym_u * sym_phi, axis=(-1, -2))


def _tangential_2d(values, normals):
    tangents = np.stack([-normals[:, 1], normals[:, 0]], axis=-1)
    return np.sum(values * tangents, axis=-1)


def _check_trace(test, rigid, t, placement, shape, order):
    rule = boundary_quadrature(placement, shape, order)
    values = test(rule.nodes, t)
    jump = np.sum((values - rigid(rule.nodes)) * rule.normals, axis=-1)
    scale = max(rule.integrate(np.sum(values ** 2, axis=-1)), 1.0)
    defect = math.sqrt(rule.integrate(jump ** 2) / scale)
    if defect > TRACE_TOLERANCE:
        raise IncompatibleDataError(
            "test function is not rigid-compatible on the solid boundary at t=%g" % t,
            defect,
        )


class _Integrals(object):
    # ρ-weighted integrals split into the cavity and the solid correction.
    def __init__(self, rho_fluid, rho_solid):
        self.rho_fluid = rho_fluid
        self.excess = rho_solid - rho_fluid

    def weighted(self, cavity_rule, cavity_values, solid_rule, solid_values):
        return self.rho_fluid * cavity_rule.integrate(cavity_values) + (
            self.excess * solid_rule.integrate(solid_values)
        )


def weak_residual(result, test, constant=1.0, panels=None):
    """Signed defect of the weak momentum identity on a simulated trajectory.

    The terms are the fluid and solid time-derivative integrals,
    −∫∫ρ u⊗u : ∇φ, the viscous term on the fluid, both slip terms,
    gravity, and the fluid and solid initial-data terms. The rigid part of
    φ on the solid is its rigid projection; φ must agree with it in the
    normal direction on the boundary.
    """
    system = result.system
    params, shape, basis = system.params, system.shape, system.basis
    order = params.quadrature_order
    panels = panels or cavity_panels(basis)
    cavity_rule = cavity_quadrature(system.cavity, panels, CAVITY_ORDER)
    walls = cavity_boundary_quadrature(system.cavity, panels, CAVITY_ORDER)
    rho = _Integrals(params.rho_fluid, shape.density)
    gravity = np.asarray(params.gravity)

    names = ("time_fluid", "time_solid", "convection", "viscous")
    names += ("wall_slip", "interface_slip", "gravity")
    series = dict((name, []) for name in names)
    times = []
    for record in result.records:
        t = record.time
        times.append(t)
        alpha = np.asarray(record.coefficients)
        placement = record.placement
        solid = solid_quadrature(placement, shape, order)
        boundary = boundary_quadrature(placement, shape, order)
        data = inertial_data(shape, placement, order)
        test_rigid = project_rigid(lambda p, t=t: test(p, t), data, placement, shape, order)
        _check_trace(test, test_rigid, t, placement, shape, order)

        u_c = basis.field(alpha)(cavity_rule.nodes)
        u_s = basis.field(alpha)(solid.nodes)
        grad_u_c = basis.gradient_field(alpha)(cavity_rule.nodes)
        grad_u_s = basis.gradient_field(alpha)(solid.nodes)
        phi_c, phi_s = test(cavity_rule.nodes, t), test(solid.nodes, t)
        grad_c, grad_s = test.grad(cavity_rule.nodes, t), test.grad(solid.nodes, t)
        rate_c, rate_s = test.dt(cavity_rule.nodes, t), test.dt(solid.nodes, t)

        solid_rate = solid.integrate(np.sum(u_s * rate_s, axis=-1))
        cavity_rate = cavity_rule.integrate(np.sum(u_c * rate_c, axis=-1))
        series["time_fluid"].append(-params.rho_fluid * (cavity_rate - solid_rate))
        series["time_solid"].append(-shape.density * solid_rate)
        series["convection"].append(
            -rho.weighted(
                cavity_rule,
                np.einsum("mi,mj,mij->m", u_c, u_c, grad_c),
                solid,
                np.einsum("mi,mj,mij->m", u_s, u_s, grad_s),
            )
        )
        series["viscous"].append(
            params.mu_fluid
            * (
                cavity_rule.integrate(_strain_contraction(grad_u_c, grad_c))
                - solid.integrate(_strain_contraction(grad_u_s, grad_s))
            )
        )
        wall_u = _tangential_2d(basis.field(alpha)(walls.nodes), walls.normals)
        wall_phi = _tangential_2d(test(walls.nodes, t), walls.normals)
        series["wall_slip"].append(
            walls.integrate(wall_u * wall_phi) / (2.0 * params.slip_wall)
        )
        slip_u = basis.field(alpha)(boundary.nodes) - record.rigid_field(boundary.nodes)
        slip_phi = test(boundary.nodes, t) - test_rigid(boundary.nodes)
        series["interface_slip"].append(
            boundary.integrate(
                _tangential_2d(slip_u, boundary.normals)
                * _tangential_2d(slip_phi, boundary.normals)
            )
            / (2.0 * params.slip_solid)
        )
        series["gravity"].append(
            -rho.weighted(cavity_rule, phi_c @ gravity, solid, phi_s @ gravity)
        )

    terms = dict(
        (name, float(integrate.trapezoid(values, times)) if len(times) > 1 else 0.0)
        for name, values in series.items()
    )
    first = result.records[0]
    placement = first.placement
    solid = solid_quadrature(placement, shape, order)
    u0 = basis.field(first.coefficients)
    initial_solid = solid.integrate(
        np.sum(u0(solid.nodes) * test(solid.nodes, first.time), axis=-1)
    )
    initial_cavity = cavity_rule.integrate(
        np.sum(u0(cavity_rule.nodes) * test(cavity_rule.nodes, first.time), axis=-1)
    )
    terms["initial_fluid"] = -params.rho_fluid * float(initial_cavity - initial_solid)
    terms["initial_solid"] = -shape.density * float(initial_solid)

    value = float(sum(terms.values()))
    LOG.debug("Weak momentum residual %.3e over %d samples", value, len(times))
    return ResidualReport(
        value=value,
        terms=terms,
        tolerance=constant * result.time_step,
        time_step=result.time_step,
        steps=len(times) - 1,
        nodes=len(cavity_rule),
    )


def mass_residual(records, shape, psi, time_step=None, constant=1.0, order=16):
    """−∫∫_S ∂_tΨ − ∫∫_S u_S·∇Ψ − ∫_{S₀} Ψ(0) along recorded placements."""
    times, rates, transport = [], [], []
    for record in records:
        rule = solid_quadrature(record.placement, shape, order)
        rigid = record.rigid_field
        times.append(record.time)
        rates.append(rule.integrate(psi.dt(rule.nodes, record.time)))
        carried = np.sum(rigid(rule.nodes) * psi.grad(rule.nodes, record.time), axis=-1)
        transport.append(rule.integrate(carried))
    first = records[0]
    rule = solid_quadrature(first.placement, shape, order)
    terms = {
        "time": -float(integrate.trapezoid(rates, times)),
        "transport": -float(integrate.trapezoid(transport, times)),
        "initial": -float(rule.integrate(psi(rule.nodes, first.time))),
    }
    if time_step is None:
        time_step = (times[-1] - times[0]) / max(len(times) - 1, 1)
    return ResidualReport(
        value=float(sum(terms.values())),
        terms=terms,
        tolerance=constant * time_step,
        time_step=time_step,
        steps=len(times) - 1,
        nodes=len(rule),
    )


def fit_slope(parameters, values):
    """Least-squares slope of log(values) against log(parameters)."""
    parameters = np.asarray(parameters, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(parameters) != len(values):
        raise RateStudyError(
            "sweep has %d parameters but %d values" % (len(parameters), len(values))
        )
    if len(parameters) < MIN_SWEEP:
        raise RateStudyError(
            "a slope fit needs at least %d sweep points, got %d" % (MIN_SWEEP, len(parameters))
        )
    if np.any(parameters <= 0.0) or np.any(values <= 0.0):
        raise RateStudyError("slope fits need strictly positive parameters and values")
    slope, _ = np.polyfit(np.log(parameters), np.log(values), 1)
    return float(slope)


def penalization_norm(result):
    """‖√χ_S (u − P_S u)‖ in L² over time and cavity."""
    system = result.system
    order = system.params.quadrature_order
    times, values = [], []
    for record in result.records:
        u = system.basis.field(record.coefficients)
        times.append(record.time)
        values.append(penalization_form(u, record.placement, system.shape, 1.0, order))
    if len(times) < 2:
        return math.sqrt(max(values[0], 0.0))
    return math.sqrt(max(float(integrate.trapezoid(values, times)), 0.0))


def normal_flux_norm(u, rigid, placement, shape, order=16):
    """‖(u − rigid)·ν‖ in L² on the solid boundary."""
    rule = boundary_quadrature(placement, shape, order)
    flux = np.sum((np.asarray(u(rule.nodes)) - rigid(rule.nodes)) * rule.normals, axis=-1)
    return math.sqrt(max(float(rule.integrate(flux ** 2)), 0.0))


def slip_flux_norm(result):
    """‖(u − P_S u)·ν‖_{L²(∂S)} at every recorded step."""
    system = result.system
    order = system.params.quadrature_order
    return np.array(
        [
            normal_flux_norm(
                system.basis.field(record.coefficients),
                record.rigid_field,
                record.placement,
                system.shape,
                order,
            )
            for record in result.records
        ]
    )


def slip_flux_integral(result):
    """∫ ‖(u − P_S u)·ν‖² dt over the run."""
    norms = slip_flux_norm(result)
    times = [record.time for record in result.records]
    if len(times) < 2:
        return 0.0
    return float(integrate.trapezoid(norms ** 2, times))


def tangential_slip(result, index=-1):
    """L² norms of the tangential slip on the walls and on the solid boundary."""
    system = result.system
    record = result.records[index]
    u = system.basis.field(record.coefficients)
    walls = cavity_boundary_quadrature(system.cavity, cavity_panels(system.basis), CAVITY_ORDER)
    wall = _tangential_2d(u(walls.nodes), walls.normals)
    boundary = boundary_quadrature(record.placement, system.shape, system.params.quadrature_order)
    slip = u(boundary.nodes) - record.rigid_field(boundary.nodes)
    interface = _tangential_2d(slip, boundary.normals)
    return (
        math.sqrt(max(float(walls.integrate(wall ** 2)), 0.0)),
        math.sqrt(max(float(boundary.integrate(interface ** 2)), 0.0)),
    )


@attr.s(frozen=True)
class InclusionReport(object):
    """Pointwise verdicts of S^a ⊂ (S^b)_{h/4} ⊂ (S^a)_{h/2}."""

    times = attr.ib(converter=tuple)
    inner = attr.ib(converter=tuple)
    outer = attr.ib(converter=tuple)

    @property
    def holds(self):
        return all(self.inner) and all(self.outer)


def inclusion_chain(records_a, records_b, shape, h):
    """Compare two trajectories on the time grid of ``records_a``.

    ``records_b`` is interpolated linearly in time when its grid differs.
    """
    widened = SolidShape(shape.radius + 0.25 * h, shape.density)
    times, inner, outer = [], [], []
    for record in records_a:
        other = trajectory_placement(records_b, record.time)
        times.append(record.time)
        inner.append(inclusion_test(record.placement, other, 0.25 * h, shape, shape))
        outer.append(inclusion_test(other, record.placement, 0.5 * h, widened, shape))
    return InclusionReport(times=times, inner=inner, outer=outer)
