import logging
import math

import attr
import numpy as np
from scipy import linalg

from ..exceptions import (
    CollisionApproach,
    GapViolationError,
    PicardDivergence,
    PicardFailure,
    PicardNonConvergence,
)
from ..geometry import Placement, gap_distance
from ..rigid_motion import RigidField, inertial_data, propagate
from .assembly import assemble_system, kinetic_energy, quadratic_form

LOG = logging.getLogger("fsilab.slip")

# Consecutive residual increases, and growth over the first residual, that
# count as a diverging fixed-point iteration.
DIVERGENCE_STREAK = 3
DIVERGENCE_GROWTH = 1e3


@attr.s(frozen=True, eq=False)
class GalerkinState(object):
    """Coefficients, placement and rigid velocity at one time level.

    ``matrices`` are the system matrices assembled at this placement;
    the next step reuses its mass matrix.
    """

    time = attr.ib(converter=float)
    coefficients = attr.ib(converter=lambda a: np.asarray(a, dtype=float))
    placement = attr.ib()
    rigid = attr.ib()
    matrices = attr.ib(repr=False)

    @property
    def kinetic_energy(self):
        return kinetic_energy(self.matrices, self.coefficients)


@attr.s(frozen=True)
class LedgerRow(object):
    """Energy terms of one accepted step; dissipation rates at the new level."""

    time = attr.ib()
    kinetic = attr.ib()
    viscous = attr.ib()
    wall_slip = attr.ib()
    interface_slip = attr.ib()
    penalization = attr.ib()
    gravity_work = attr.ib()
    numerical_dissipation = attr.ib()

    @property
    def dissipation(self):
        return self.viscous + self.wall_slip + self.interface_slip + self.penalization


@attr.s(frozen=True)
class TrajectoryRecord(object):
    time = attr.ib()
    coefficients = attr.ib(converter=tuple)
    center = attr.ib(converter=tuple)
    orientation = attr.ib()
    rigid = attr.ib(converter=tuple)
    gap = attr.ib()

    @property
    def placement(self):
        return Placement(self.center, self.orientation)

    @property
    def rigid_field(self):
        return RigidField.from_vector(self.rigid, self.center)


@attr.s(frozen=True, eq=False)
class SimulationResult(object):
    """Output of run_simulation.

    ``termination`` is one of ``completed``, ``collision-approach`` and
    ``picard-failure``; ``error`` holds the terminal exception otherwise.
    """

    system = attr.ib()
    records = attr.ib(converter=tuple)
    ledger = attr.ib(converter=tuple)
    initial_energy = attr.ib()
    termination = attr.ib()
    error = attr.ib(default=None)

    @property
    def time_step(self):
        return self.system.params.time_step

    @property
    def final_time(self):
        return self.records[-1].time


def _record(state, system):
    return TrajectoryRecord(
        time=state.time,
        coefficients=state.coefficients,
        center=state.placement.center,
        orientation=state.placement.orientation,
        rigid=state.rigid.to_vector(),
        gap=gap_distance(state.placement, system.shape, system.cavity),
    )


def initial_state(system, placement, coefficients=None, time=0.0):
    """State at ``time`` with the solid at ``placement`` and fluid coefficients."""
    size = system.size
    alpha = np.zeros(size)
    if coefficients is not None:
        given = np.asarray(coefficients, dtype=float)
        alpha[: len(given)] = given[:size]
    matrices = assemble_system(system, placement, alpha)
    return GalerkinState(
        time=time,
        coefficients=alpha,
        placement=placement,
        rigid=matrices.rigid_of(alpha),
        matrices=matrices,
    )


def _advance_placement(state, rigid, step):
    history = [(state.time, state.rigid), (state.time + step, rigid)]
    return propagate(history, state.placement).placement_at(state.time + step)


def picard_step(state, system):
    """Advance one time step by damped Picard iteration.

    Each sweep moves the solid with the trapezoid of the old and current
    rigid velocities, reassembles at the new placement and solves
    ``(½(A' + A) + Δt(K + B)) α* = A α + Δt f``.

    Returns (new state, ledger row). Raises CollisionApproach when a trial
    placement comes within 2δ of the walls, PicardNonConvergence or
    PicardDivergence when the iteration fails.
    """
    params = system.params
    step = params.time_step
    target = state.time + step
    old_mass = state.matrices.mass
    rhs_base = old_mass @ state.coefficients

    alpha = state.coefficients.copy()
    rigid = state.rigid
    history = []
    increases = 0
    for iteration in range(1, params.picard_max_iter + 1):
        placement = _advance_placement(state, rigid, step)
        try:
            matrices = assemble_system(system, placement, alpha)
        except GapViolationError:
            gap = gap_distance(placement, system.shape, system.cavity)
            raise CollisionApproach(target, gap, state)
        lhs = 0.5 * (matrices.mass + old_mass) + step * matrices.operator
        trial = linalg.solve(lhs, rhs_base + step * matrices.forcing)
        residual = float(np.linalg.norm(trial - alpha) / max(1.0, np.linalg.norm(trial)))
        history.append(residual)
        if not np.all(np.isfinite(trial)) or not math.isfinite(residual):
            raise PicardDivergence("non-finite Picard iterate at t=%g" % target, history, target)
        if residual <= params.picard_tol:
            LOG.debug(
                "Step to t=%.6g converged in %d Picard sweep(s), residual %.3e",
                target,
                iteration,
                residual,
            )
            return _accept(state, system, trial, placement, matrices)
        if len(history) > 1 and residual > history[-2]:
            increases += 1
        else:
            increases = 0
        if increases >= DIVERGENCE_STREAK and residual > DIVERGENCE_GROWTH * history[0]:
            raise PicardDivergence(
                "Picard residuals grow at t=%g (%.3e after %d sweeps)"
                % (target, residual, iteration),
                history,
                target,
            )
        alpha = alpha + params.relaxation * (trial - alpha)
        rigid = matrices.rigid_of(alpha)
    raise PicardNonConvergence(
        "Picard iteration did not converge in %d sweeps at t=%g (last residual %.3e)"
        % (params.picard_max_iter, target, history[-1]),
        history,
        target,
    )


def _accept(state, system, alpha, placement, matrices):
    step = system.params.time_step
    increment = alpha - state.coefficients
    new_state = GalerkinState(
        time=state.time + step,
        coefficients=alpha,
        placement=placement,
        rigid=matrices.rigid_of(alpha),
        matrices=matrices,
    )
    row = LedgerRow(
        time=new_state.time,
        kinetic=new_state.kinetic_energy,
        viscous=quadratic_form(matrices.viscous, alpha),
        wall_slip=quadratic_form(matrices.wall_slip, alpha),
        interface_slip=quadratic_form(matrices.interface_slip, alpha),
        penalization=quadratic_form(matrices.penalization, alpha),
        gravity_work=float(matrices.forcing @ alpha),
        numerical_dissipation=0.5 * quadratic_form(state.matrices.mass, increment),
    )
    return new_state, row


def existence_horizon(state, system, bound):
    """Guaranteed no-contact time for velocities with ‖u‖_{L²} <= ``bound``.

    T = (gap − 2δ) / (C₀ √ρ_S R) with
    C₀ = √2·max(1, r) / min(1, λ₀)^{1/2}, λ₀ the smallest eigenvalue of the
    generalized inertia diag(M, J).
    """
    shape, params = system.shape, system.params
    margin = gap_distance(state.placement, shape, system.cavity) - 2.0 * params.band
    if margin <= 0.0:
        return 0.0
    if bound <= 0.0:
        return math.inf
    data = inertial_data(shape, state.placement, params.quadrature_order)
    smallest = float(np.min(np.linalg.eigvalsh(data.generalized_inertia)))
    constant = math.sqrt(2.0) * max(1.0, shape.radius) / math.sqrt(min(1.0, smallest))
    return margin / (constant * math.sqrt(shape.density) * bound)


def default_radius(state, system, t_end):
    """Velocity bound 2(‖√ρ₀ u₀‖ + T|g|(∫ρ)^{1/2}) / min(ρ)^{1/2} over [0, T]."""
    params, shape = system.params, system.shape
    momentum = math.sqrt(2.0 * state.kinetic_energy)
    total_mass = params.rho_fluid * system.cavity.volume + (
        shape.density - params.rho_fluid
    ) * shape.volume(system.cavity.dimension)
    gravity = float(np.linalg.norm(params.gravity))
    lightest = min(params.rho_fluid, shape.density)
    return 2.0 * (momentum + t_end * gravity * math.sqrt(total_mass)) / math.sqrt(lightest)


def run_simulation(system, state, t_end, on_step=None):
    """Step from ``state`` until ``t_end`` or a terminal event.

    ``on_step`` is called with (state, ledger row) after every accepted step.
    """
    params = system.params
    steps = int(round((t_end - state.time) / params.time_step))
    radius = default_radius(state, system, t_end)
    LOG.debug(
        "Velocity bound %.6g gives a no-contact horizon of %.6g",
        radius,
        existence_horizon(state, system, radius),
    )
    records = [_record(state, system)]
    initial_energy = state.kinetic_energy
    ledger = []
    termination, error = "completed", None
    for _ in range(steps):
        try:
            state, row = picard_step(state, system)
        except CollisionApproach as exc:
            termination, error = "collision-approach", exc
            LOG.info(
                "Collision approach at t=%.6g: gap %.6g below %.6g",
                exc.time,
                exc.gap,
                2.0 * params.band,
                extra={"event": {"type": "collision-approach"}},
            )
            break
        except PicardFailure as exc:
            termination, error = "picard-failure", exc
            LOG.info(
                "Picard failure at t=%.6g after %d sweeps",
                exc.time,
                len(exc.history),
                extra={"event": {"type": "picard-failure"}},
            )
            break
        records.append(_record(state, system))
        ledger.append(row)
        if on_step:
            on_step(state, row)
    else:
        LOG.info(
            "Simulation completed at t=%.6g after %d steps",
            state.time,
            steps,
            extra={"event": {"type": "simulation-completed"}},
        )
    return SimulationResult(
        system=system,
        records=records,
        ledger=ledger,
        initial_energy=initial_energy,
        termination=termination,
        error=error,
    )
