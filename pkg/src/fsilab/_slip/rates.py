"""Measured convergence rates of the constructions and of the scheme.

Each study evaluates one quantity over a parameter sweep, one worker task
per parameter value, and fits log-log slopes. Results keep the sweep order
whatever the completion order of the workers.
"""
import logging
import math

import attr
import numpy as np
from more_executors import Executors
from more_executors.futures import f_sequence

from .connect import (
    AnnulusField,
    ConnectParams,
    approximate_test_function,
    connect_velocity,
    rigidify,
)
from .diagnostics import (
    fit_slope,
    penalization_norm,
    slip_flux_integral,
    tangential_slip,
)
from .exceptions import RateStudyError
from .galerkin import build_system, initial_state, run_simulation
from .geometry import Placement, SolidShape, annulus_quadrature
from .rigid_motion import RigidField, fixed_placement_propagator

LOG = logging.getLogger("fsilab.slip")

STUDIES = (
    "connect",
    "testfn",
    "penalization",
    "rigidify",
    "slip-flux",
    "slip-limit",
    "self-convergence",
)


@attr.s(frozen=True)
class Expectation(object):
    """Acceptance rule for a fitted slope or a series.

    ``kind`` is ``near`` (|value − target| <= tolerance), ``at_least``,
    ``at_most`` or ``decreasing`` (series strictly decreasing).
    """

    kind = attr.ib()
    target = attr.ib(default=0.0)
    tolerance = attr.ib(default=0.0)

    def satisfied(self, value):
        if self.kind == "near":
            return abs(value - self.target) <= self.tolerance
        if self.kind == "at_least":
            return value >= self.target
        if self.kind == "at_most":
            return value <= self.target
        values = np.asarray(value, dtype=float)
        return bool(np.all(np.diff(values) < 0.0))


@attr.s(frozen=True)
class RateResult(object):
    study = attr.ib()
    parameter = attr.ib()
    values = attr.ib(converter=tuple)
    series = attr.ib()
    slopes = attr.ib()
    expectations = attr.ib()

    def passed(self):
        verdicts = {}
        for name, expectation in sorted(self.expectations.items()):
            if expectation.kind == "decreasing":
                verdicts[name] = expectation.satisfied(self.series[name])
            else:
                verdicts[name] = expectation.satisfied(self.slopes[name])
        return verdicts

    def to_dict(self):
        return {
            "study": self.study,
            "parameter": self.parameter,
            "values": list(self.values),
            "series": dict((k, [float(x) for x in v]) for k, v in self.series.items()),
            "slopes": dict((k, float(v)) for k, v in self.slopes.items()),
            "expected": dict((k, attr.asdict(v)) for k, v in self.expectations.items()),
            "passed": self.passed(),
        }


@attr.s(frozen=True)
class SimulationSetup(object):
    """Everything needed to rerun a scenario's simulation with other knobs."""

    cavity = attr.ib()
    shape = attr.ib()
    placement = attr.ib()
    params = attr.ib()
    t_end = attr.ib()
    coefficients = attr.ib(default=None)


def _map(executor, fn, values):
    executor = executor or Executors.sync()
    futures = [executor.submit(fn, value) for value in values]
    return f_sequence(futures).result()


def _centered():
    return Placement((0.0, 0.0))


def connect_study(values=(8, 16, 32, 64, 128), band=0.5, radius=1.0, offset=1e-3, executor=None):
    """Band L² distance of the connected field to U for a tangential-only jump.

    U = (z + ε)^{-1/6} e_θ outside the unit disk, U_S = 0: the normal traces
    match, and the profile makes the blend critical in L⁶.
    """
    placement = _centered()
    shape = SolidShape(radius, 1.0)

    def exterior(points):
        points = np.asarray(points, dtype=float)
        rho = np.linalg.norm(points, axis=-1)
        profile = (np.maximum(rho - radius, 0.0) + offset) ** (-1.0 / 6.0) / rho
        return profile[..., None] * np.stack([-points[..., 1], points[..., 0]], axis=-1)

    rigid = RigidField.zero(placement.center)

    def measure(n):
        params = ConnectParams(band, sharpness=n)
        connected = connect_velocity(exterior, rigid, params, placement, shape)
        sampled = AnnulusField.sample(connected.grid, exterior)
        return (connected.band_field() - sampled).l2_norm()

    norms = _map(executor, measure, values)
    return RateResult(
        study="connect",
        parameter="n",
        values=values,
        series={"l2": norms},
        slopes={"l2": fit_slope(values, norms)},
        expectations={"l2": Expectation("near", -1.0 / 3.0, 0.15)},
    )


def testfn_study(values=(8, 16, 32, 64), alpha=1.5, radius=1.0, spin=1.0, executor=None):
    """Interior L² and H¹ norms of Φ − φ_S for a rigid rotation against φ_S = 0."""
    placement = _centered()
    shape = SolidShape(radius, 1.0)
    propagator = fixed_placement_propagator(placement)
    fluid_rigid = RigidField((0.0, 0.0), spin, placement.center)

    def fluid(points, t):
        # pylint: disable=unused-argument
        return fluid_rigid(points)

    def measure(n):
        params = ConnectParams(radius, sharpness=n, alpha=alpha)
        phi = approximate_test_function(
            fluid, RigidField.zero(placement.center), propagator, shape, params
        )
        snapshot = phi.snapshot(0.0)
        return snapshot.interior_l2(), snapshot.h1_norm()

    measured = _map(executor, measure, values)
    l2 = [m[0] for m in measured]
    h1 = [m[1] for m in measured]
    return RateResult(
        study="testfn",
        parameter="n",
        values=values,
        series={"interior_l2": l2, "h1": h1},
        slopes={"interior_l2": fit_slope(values, l2), "h1": fit_slope(values, h1)},
        expectations={
            "interior_l2": Expectation("near", -0.5 * alpha, 0.15),
            "h1": Expectation("near", 0.5 * alpha, 0.15),
        },
    )


def rigidify_study(values=(0.2, 0.1, 0.05, 0.025), band=0.5, radius=1.0, executor=None):
    """Exterior L² distance of v_h to u for a swirl with matching normal trace."""
    placement = _centered()
    shape = SolidShape(radius, 1.0)

    def swirl(points):
        points = np.asarray(points, dtype=float)
        rho2 = np.sum(points ** 2, axis=-1)
        return rho2[..., None] * np.stack([-points[..., 1], points[..., 0]], axis=-1)

    def measure(h):
        rigidified = rigidify(swirl, placement, shape, h, band)
        rule = annulus_quadrature(
            placement, radius, radius + band, breaks=[radius + h, radius + 2.0 * h]
        )
        difference = rigidified(rule.nodes) - swirl(rule.nodes)
        return math.sqrt(float(rule.integrate(np.sum(difference ** 2, axis=-1))))

    norms = _map(executor, measure, values)
    return RateResult(
        study="rigidify",
        parameter="h",
        values=values,
        series={"exterior_l2": norms},
        slopes={"exterior_l2": fit_slope(values, norms)},
        expectations={"exterior_l2": Expectation("at_least", 1.0 / 3.0 - 0.1)},
    )


def simulate(setup, **overrides):
    """Run the setup's simulation with SimParams fields replaced by ``overrides``."""
    params = attr.evolve(setup.params, **overrides)
    system = build_system(setup.cavity, setup.shape, params)
    state = initial_state(system, setup.placement, setup.coefficients)
    result = run_simulation(system, state, setup.t_end)
    if result.termination != "completed":
        LOG.warning(
            "Run with %s ended early (%s) at t=%.6g",
            ", ".join("%s=%g" % item for item in sorted(overrides.items())),
            result.termination,
            result.final_time,
        )
    return result


def _penalization_runs(setup, values, executor):
    return _map(executor, lambda n: simulate(setup, penalization=n), values)


def penalization_study(setup, values=(10, 100, 1000, 10000), executor=None):
    """‖√χ_S (u − P_S u)‖ over an n sweep."""
    runs = _penalization_runs(setup, values, executor)
    norms = [penalization_norm(run) for run in runs]
    return RateResult(
        study="penalization",
        parameter="n",
        values=values,
        series={"penalization_norm": norms},
        slopes={"penalization_norm": fit_slope(values, norms)},
        expectations={"penalization_norm": Expectation("near", -0.5, 0.15)},
    )


def slip_flux_study(setup, values=(10, 100, 1000, 10000), executor=None):
    """Time-integrated squared normal flux mismatch on the solid over an n sweep."""
    runs = _penalization_runs(setup, values, executor)
    integrals = [slip_flux_integral(run) for run in runs]
    return RateResult(
        study="slip-flux",
        parameter="n",
        values=values,
        series={"flux_squared": integrals},
        slopes={"flux_squared": fit_slope(values, integrals)},
        expectations={"flux_squared": Expectation("at_most", -0.4)},
    )


def slip_limit_study(setup, values=(1.0, 0.5, 0.25), executor=None):
    """Tangential slip at the final time as both slip lengths shrink by ``values``."""

    def measure(scale):
        params = setup.params
        run = simulate(
            setup,
            slip_solid=params.slip_solid * scale,
            slip_wall=params.slip_wall * scale,
        )
        return tangential_slip(run)

    measured = _map(executor, measure, values)
    wall = [m[0] for m in measured]
    interface = [m[1] for m in measured]
    return RateResult(
        study="slip-limit",
        parameter="slip_scale",
        values=values,
        series={"wall_slip": wall, "interface_slip": interface},
        slopes={},
        expectations={
            "wall_slip": Expectation("decreasing"),
            "interface_slip": Expectation("decreasing"),
        },
    )


def self_convergence_study(setup, levels=3, executor=None):
    """Observed order of the terminal coefficients under Δt halving."""
    if levels < 3:
        raise RateStudyError("self-convergence needs at least 3 levels, got %d" % levels)
    base = setup.params.time_step
    steps = [base / 2 ** k for k in range(levels)]
    runs = _map(executor, lambda dt: simulate(setup, time_step=dt), steps)
    for run in runs:
        if run.termination != "completed":
            raise RateStudyError(
                "self-convergence run with Δt=%g ended early (%s)"
                % (run.time_step, run.termination)
            )
    finals = [np.asarray(run.records[-1].coefficients) for run in runs]
    differences = [float(np.linalg.norm(a - b)) for a, b in zip(finals[:-1], finals[1:])]
    if min(differences) <= 0.0:
        raise RateStudyError("terminal states do not change under Δt halving")
    orders = [math.log2(a / b) for a, b in zip(differences[:-1], differences[1:])]
    return RateResult(
        study="self-convergence",
        parameter="time_step",
        values=steps,
        series={"difference": differences},
        slopes={"order": min(orders)},
        expectations={"order": Expectation("at_least", 0.9)},
    )
