import logging
import math

import numpy as np
import pytest

from fsilab._slip.collision import (
    DragLaw,
    GapState,
    buoyancy_acceleration,
    contact_envelope,
    integrate_gap_ode,
    log_contact_envelope,
)
from fsilab._slip.exceptions import GapIntegrationError


def test_drag_laws():
    assert DragLaw("log", 2.0)(0.1) == pytest.approx(-2.0 * math.log(10.0))
    assert DragLaw("inverse", 2.0)(0.5) == pytest.approx(-4.0)
    assert DragLaw("none")(0.5) == 0.0
    assert DragLaw("inverse", 1.0, floor=0.1)(1e-6) == pytest.approx(-10.0)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"kind": "quadratic"},
        {"kind": "log", "coefficient": 0.0},
        {"kind": "log", "floor": -1.0},
    ],
)
def test_drag_law_rejects(kwargs):
    with pytest.raises(ValueError):
        DragLaw(**kwargs)


def test_free_fall_conserves_flight_energy():
    initial = GapState(0.0, 1.0, 0.0)

    trajectory = integrate_gap_ode(initial, DragLaw("none"), -2.0, 0.5)

    assert trajectory.contact is None
    assert trajectory.final.time == pytest.approx(0.5)
    assert trajectory.final.height == pytest.approx(1.0 - 0.25, rel=1e-8)
    energy = trajectory.flight_energy()
    assert np.allclose(energy, energy[0], rtol=1e-8)


def test_free_fall_reaches_contact(caplog):
    caplog.set_level(logging.INFO)
    initial = GapState(0.0, 1.0, 0.0)

    trajectory = integrate_gap_ode(initial, DragLaw("none"), -2.0, 5.0)

    # h = 1 − t², so contact comes at t = √(1 − h_c).
    assert trajectory.contact.time == pytest.approx(1.0, rel=1e-6)
    assert trajectory.contact.rate == pytest.approx(-2.0, rel=1e-6)
    assert trajectory.final.time == pytest.approx(trajectory.contact.time)
    assert "Contact under none drag" in caplog.text


def test_only_regularized_inverse_law_reaches_contact():
    assert DragLaw("log").reaches_contact
    assert DragLaw("none").reaches_contact
    assert DragLaw("inverse", floor=1e-3).reaches_contact
    assert not DragLaw("inverse").reaches_contact


@pytest.mark.slow
@pytest.mark.parametrize("acceleration", [-1.0, -0.1, -1e-3, -1e-5])
def test_inverse_law_never_touches(acceleration):
    """The gap decays below any fixed height without a contact event"""
    initial = GapState(0.0, 1.0, 0.0)
    law = DragLaw("inverse", 1.0)

    trajectory = integrate_gap_ode(initial, law, acceleration, 1e6)

    assert trajectory.contact is None
    assert trajectory.final.time == pytest.approx(1e6)
    assert np.all(np.isfinite(trajectory.log_heights))
    assert np.all(np.diff(trajectory.times) >= 0.0)
    envelope = log_contact_envelope(trajectory.times, initial, law, acceleration)
    assert np.all(trajectory.log_heights >= envelope - 1e-6)
    # ln h follows a t/κ once the solid has settled towards the wall.
    assert trajectory.log_heights[-1] == pytest.approx(acceleration * 1e6, rel=1e-3)


def test_inverse_law_lifts_buoyant_solid():
    """A buoyant solid thrown below the contact height rises again"""
    initial = GapState(0.0, 1e-6, -10.0)

    trajectory = integrate_gap_ode(initial, DragLaw("inverse", 1.0), 1.0, 20.0)

    assert trajectory.contact is None
    assert trajectory.final.time == pytest.approx(20.0)
    assert np.min(trajectory.log_heights) < math.log(1e-9)
    # ln h − t is conserved once settled: ln h(20) ≈ ln 1e-6 − 10 + 20.
    assert trajectory.final.height > 1e-3
    assert trajectory.final.rate > 0.0


def log_law_contact(acceleration, rtol=1e-10, atol=1e-12):
    initial = GapState(0.0, 1.0, 0.0)
    trajectory = integrate_gap_ode(
        initial, DragLaw("log", 1.0), acceleration, 10.0, rtol=rtol, atol=atol
    )
    return trajectory.contact


def test_log_law_makes_contact():
    """Same data as the inverse law runs: the slip drag lets the solid touch"""
    contact = log_law_contact(-1.0)

    assert contact is not None
    # ḣ = 1 − t − (h − h ln h) brackets the contact between √2 and 1 + √3.
    assert math.sqrt(2.0) < contact.time < 1.0 + math.sqrt(3.0)
    assert contact.height == pytest.approx(1e-9, rel=1e-6)
    assert contact.rate < 0.0


def test_log_law_contact_stable_under_tighter_tolerances():
    contact = log_law_contact(-1.0)
    refined = log_law_contact(-1.0, rtol=5e-11, atol=5e-13)

    assert abs(refined.time - contact.time) <= 1e-6


def test_log_law_contact_earlier_for_heavier_solid():
    times = [log_law_contact(a).time for a in (-0.5, -1.0, -2.0)]

    assert times[0] > times[1] > times[2]


def test_contact_envelope_bounds():
    initial = GapState(0.0, 0.5, -0.2)
    law = DragLaw("inverse", 2.0)
    times = np.array([0.0, 1.0, 10.0])

    envelope = contact_envelope(times, initial, law, -0.1)

    expected = np.minimum(0.5, np.exp((-0.1 * times - 0.2 + 2.0 * math.log(0.5)) / 2.0))
    assert np.allclose(envelope, expected)
    assert envelope[0] <= 0.5

    with pytest.raises(GapIntegrationError):
        contact_envelope(times, initial, DragLaw("log"), -0.1)


def test_integrate_rejects_bad_inputs():
    with pytest.raises(GapIntegrationError):
        integrate_gap_ode(GapState(0.0, 0.0, 0.0), DragLaw("none"), -1.0, 1.0)
    with pytest.raises(GapIntegrationError):
        integrate_gap_ode(GapState(0.0, 1.0, 0.0), DragLaw("none"), -1.0, 1.0, method="Euler")


def test_buoyancy_acceleration():
    assert buoyancy_acceleration(1.0, 2.0, (0.0, -9.81)) == pytest.approx(-4.905)
    assert buoyancy_acceleration(1.0, 1.0, (0.0, -9.81)) == 0.0
    assert buoyancy_acceleration(2.0, 1.0, (0.0, 0.0, -1.0)) == pytest.approx(1.0)


def test_log_contact_envelope_stays_finite():
    initial = GapState(0.0, 1.0, 0.0)
    law = DragLaw("inverse", 1.0)

    envelope = log_contact_envelope([0.0, 1e6], initial, law, -1.0)

    assert envelope.tolist() == [0.0, -1e6]
    assert contact_envelope([1e6], initial, law, -1.0)[0] == 0.0
