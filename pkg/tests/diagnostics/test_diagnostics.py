import math

import numpy as np
import pytest
from mock import Mock

from fsilab._slip.diagnostics import (
    SmoothTestFunction,
    bubble_test_function,
    density_test_function,
    energy_report,
    fit_slope,
    inclusion_chain,
    mass_residual,
    normal_flux_norm,
    penalization_norm,
    rigid_test_function,
    slip_flux_integral,
    tangential_slip,
    time_factor,
    trajectory_placement,
    weak_residual,
)
from fsilab._slip.exceptions import IncompatibleDataError, RateStudyError
from fsilab._slip.galerkin import (
    LedgerRow,
    SimParams,
    TrajectoryRecord,
    build_system,
    initial_state,
    run_simulation,
)
from fsilab._slip.geometry import Cavity, Placement, SolidShape
from fsilab._slip.rigid_motion import RigidField

SHAPE = SolidShape(0.25, 1.0)


@pytest.fixture(scope="module")
def rest_result():
    params = SimParams(
        rho_fluid=1.0,
        mu_fluid=0.1,
        slip_solid=1.0,
        slip_wall=1.0,
        gravity=(0.0, -1.0),
        band=0.05,
        basis_size=6,
        time_step=0.01,
        quadrature_order=8,
    )
    system = build_system(Cavity((2.0, 2.0)), SHAPE, params)
    state = initial_state(system, Placement((1.0, 1.0)))
    return run_simulation(system, state, 0.04)


def moving_records(count=201, horizon=1.0, velocity=(0.2, -0.1)):
    records = []
    for t in np.linspace(0.0, horizon, count):
        center = (1.0 + velocity[0] * t, 1.0 + velocity[1] * t)
        records.append(
            TrajectoryRecord(
                time=t,
                coefficients=(),
                center=center,
                orientation=0.0,
                rigid=(velocity[0], velocity[1], 0.0),
                gap=0.5,
            )
        )
    return records


def row(time, kinetic, dissipation=0.0, work=0.0, numerical=0.0):
    return LedgerRow(
        time=time,
        kinetic=kinetic,
        viscous=dissipation,
        wall_slip=0.0,
        interface_slip=0.0,
        penalization=0.0,
        gravity_work=work,
        numerical_dissipation=numerical,
    )


def test_time_factor():
    factor = time_factor(2.0)
    assert factor(0.0) == 1.0
    assert factor(2.0) == 0.0
    assert factor(1.0) == pytest.approx(0.25)


def test_bubble_is_solenoidal_and_compact():
    bubble = bubble_test_function((1.0, 1.0), 0.3, 1.0)

    assert np.allclose(bubble([[1.5, 1.0], [1.0, 1.31]], 0.0), 0.0)
    assert np.allclose(bubble([[1.1, 1.0]], 1.0), 0.0)

    points = np.array([[1.1, 1.05], [0.9, 1.2], [1.0, 0.8]])
    gradient = bubble.grad(points, 0.3)
    assert np.allclose(gradient[:, 0, 0] + gradient[:, 1, 1], 0.0, atol=1e-6)


def test_density_gradient_matches_differences():
    psi = density_test_function((1.0, 1.0), 0.25, 1.0)
    numeric = SmoothTestFunction(value=psi.value)
    points = np.array([[1.1, 0.9], [1.3, 1.2]])

    assert np.allclose(psi.grad(points, 0.2), numeric.grad(points, 0.2), atol=1e-6)
    assert np.allclose(psi.dt(points, 0.2), numeric.dt(points, 0.2))


def test_smooth_test_function_sum():
    linear = SmoothTestFunction(value=lambda p, t: np.asarray(p) * t)
    doubled = linear + linear
    point = np.array([[0.5, 2.0]])
    assert np.allclose(doubled(point, 3.0), [[3.0, 12.0]])
    assert np.allclose(doubled.dt(point, 3.0), [[1.0, 4.0]])
    assert np.allclose(doubled.grad(point, 3.0), [[[6.0, 0.0], [0.0, 6.0]]])


def test_trajectory_placement_interpolates():
    records = moving_records(count=3, horizon=1.0)
    placement = trajectory_placement(records, 0.25)
    assert np.allclose(placement.center, (1.05, 0.975))


def test_rigid_test_function_is_rigid_on_solid():
    records = moving_records(count=3)
    test = rigid_test_function(records, SHAPE, 0.05, (1.0, 0.0, 2.0), 1.0)

    center = np.array(trajectory_placement(records, 0.5).center)
    inside = center + np.array([[0.1, 0.0], [0.0, -0.2]])
    expected = RigidField((1.0, 0.0), 2.0, center)(inside) * time_factor(1.0)(0.5)
    assert np.allclose(test(inside, 0.5), expected)
    assert np.allclose(test(center + [[0.4, 0.0]], 0.5), 0.0)


def test_energy_report_on_ledger():
    result = Mock(
        time_step=0.1,
        initial_energy=1.0,
        ledger=[row(0.1, 0.9, dissipation=0.5), row(0.2, 0.85, dissipation=0.4)],
    )

    report = energy_report(result)

    assert report.holds
    assert np.allclose(report.lhs, [0.95, 0.94])
    assert np.allclose(report.slack, [0.05, 0.06])


def test_energy_report_flags_growth(caplog):
    result = Mock(time_step=0.1, initial_energy=1.0, ledger=[row(0.1, 1.5)])

    report = energy_report(result)

    assert not report.holds
    assert "Energy inequality violated" in caplog.text


def test_mass_residual_for_translating_disk():
    records = moving_records()
    psi = density_test_function(records[0].center, 0.25, 1.0)

    report = mass_residual(records, SHAPE, psi, order=8)

    assert report.steps == 200
    assert report.time_step == pytest.approx(0.005)
    assert abs(report.value) < 1e-4
    assert report.within_tolerance
    assert report.terms["initial"] < 0.0


@pytest.mark.parametrize(
    "make_test",
    [
        lambda result: bubble_test_function((0.5, 0.5), 0.3, result.final_time),
        lambda result: rigid_test_function(
            result.records, SHAPE, 0.05, (1.0, -0.5, 0.3), result.final_time
        ),
    ],
    ids=["bubble", "rigid"],
)
def test_weak_residual_at_rest_vanishes(rest_result, make_test):
    report = weak_residual(rest_result, make_test(rest_result))

    assert report.within_tolerance
    assert report.terms["convection"] == 0.0
    assert report.steps == 4
    assert set(report.terms) == {
        "time_fluid",
        "time_solid",
        "convection",
        "viscous",
        "wall_slip",
        "interface_slip",
        "gravity",
        "initial_fluid",
        "initial_solid",
    }


def test_weak_residual_rejects_normal_jump(rest_result):
    center = rest_result.records[0].center
    test = bubble_test_function((center[0] + 0.25, center[1]), 0.3, 1.0)
    with pytest.raises(IncompatibleDataError):
        weak_residual(rest_result, test)


def test_rest_result_norms(rest_result):
    assert penalization_norm(rest_result) == 0.0
    assert slip_flux_integral(rest_result) == 0.0
    assert tangential_slip(rest_result) == (0.0, 0.0)


def test_normal_flux_norm():
    placement = Placement((1.0, 1.0))
    rigid = RigidField((0.3, 0.1), 1.0, placement.center)
    assert normal_flux_norm(rigid, rigid, placement, SHAPE) == pytest.approx(0.0, abs=1e-14)

    def uniform(points):
        return np.tile([1.0, 0.0], (len(points), 1))

    # ∮ cos²θ r dθ = π r.
    zero = RigidField.zero(placement.center)
    assert normal_flux_norm(uniform, zero, placement, SHAPE) == pytest.approx(
        math.sqrt(math.pi * 0.25)
    )


def test_fit_slope():
    values = [1.0, 2.0, 4.0, 8.0]
    assert fit_slope(values, [v ** -0.5 for v in values]) == pytest.approx(-0.5)


@pytest.mark.parametrize(
    "parameters, values",
    [
        ([1.0, 2.0, 4.0], [1.0, 2.0, 3.0]),
        ([1.0, 2.0, 4.0, 8.0], [1.0, 2.0, 3.0]),
        ([1.0, 2.0, 4.0, 8.0], [1.0, 0.0, 3.0, 4.0]),
    ],
)
def test_fit_slope_rejects(parameters, values):
    with pytest.raises(RateStudyError):
        fit_slope(parameters, values)


def test_inclusion_chain():
    records = moving_records(count=5)
    assert inclusion_chain(records, records, SHAPE, 0.1).holds

    shifted = moving_records(count=5, velocity=(0.5, -0.1))
    report = inclusion_chain(records, shifted, SHAPE, 0.1)
    assert not report.holds
    assert report.inner[0] and report.outer[0]
