import logging
import math

import attr
import numpy as np
from scipy import integrate

from .exceptions import GapIntegrationError

LOG = logging.getLogger("fsilab.slip")

DRAG_KINDS = ("log", "inverse", "none")
METHODS = ("LSODA", "RK45", "DOP853", "Radau")

# Default height at which the solid is declared in contact with the wall.
CONTACT_HEIGHT = 1e-9

# Samples of a gap followed along the inverse law's first integral.
TAIL_SAMPLES = 256


@attr.s(frozen=True)
class DragLaw(object):
    """Near-wall drag 𝒟(h): −κ|ln h|, −κ/h or 0.

    Heights below ``floor`` are evaluated at ``floor``. 𝒟 <= 0 near
    contact, so the term ḣ𝒟(h) opposes the approach.
    """

    kind = attr.ib()
    coefficient = attr.ib(default=1.0, converter=float)
    floor = attr.ib(default=0.0, converter=float)

    @kind.validator
    def _check_kind(self, attribute, value):
        # pylint: disable=unused-argument
        if value not in DRAG_KINDS:
            raise ValueError("drag law must be one of %s, got %r" % (", ".join(DRAG_KINDS), value))

    @coefficient.validator
    def _check_coefficient(self, attribute, value):
        # pylint: disable=unused-argument
        if not value > 0:
            raise ValueError("drag coefficient must be strictly positive, got %r" % value)

    @floor.validator
    def _check_floor(self, attribute, value):
        # pylint: disable=unused-argument
        if value < 0:
            raise ValueError("drag floor must be nonnegative, got %r" % value)

    @property
    def reaches_contact(self):
        """False for the unregularized inverse law.

        Along ḣ + κ ln h − a t = const a finite-time contact would need
        ḣ → +∞ while approaching, so h only decays exponentially.
        """
        return self.kind != "inverse" or self.floor > 0

    def __call__(self, h):
        h = np.maximum(np.asarray(h, dtype=float), self.floor)
        if self.kind == "log":
            return -self.coefficient * np.abs(np.log(h))
        if self.kind == "inverse":
            return -self.coefficient / h
        return np.zeros_like(h)


@attr.s(frozen=True)
class GapState(object):
    time = attr.ib(converter=float)
    height = attr.ib(converter=float)
    rate = attr.ib(converter=float)


@attr.s(frozen=True, eq=False)
class GapTrajectory(object):
    """Samples (t, ln h, ḣ) of a gap ODE solution and its contact event, if any.

    Heights are kept as logarithms: under the inverse law they fall below
    the smallest positive float long before the usual end times.
    """

    times = attr.ib()
    log_heights = attr.ib()
    rates = attr.ib()
    law = attr.ib()
    acceleration = attr.ib()
    contact = attr.ib(default=None)

    @property
    def heights(self):
        return np.exp(self.log_heights)

    @property
    def final(self):
        return GapState(self.times[-1], math.exp(self.log_heights[-1]), self.rates[-1])

    def flight_energy(self):
        """½ḣ² − a·h along the samples; conserved without drag."""
        return 0.5 * self.rates ** 2 - self.acceleration * self.heights


def _slaved_tail(crossing, law, acceleration, t_end, contact_height):
    # Below contact_height the inverse law relaxes onto κ ln h ≈ I + a t
    # within a time of order h/κ; ḣ = a h/κ corrects the exponent.
    kappa = law.coefficient
    invariant = crossing.rate + kappa * math.log(crossing.height) - acceleration * crossing.time
    stop = t_end
    if acceleration > 0:
        rise = (kappa * math.log(contact_height) - invariant) / acceleration
        stop = min(t_end, max(rise, crossing.time))
    times = np.linspace(crossing.time, stop, TAIL_SAMPLES + 1)[1:]
    exponent = (invariant + acceleration * times) / kappa
    log_heights = exponent - acceleration * np.exp(exponent) / kappa ** 2
    rates = acceleration / kappa * np.exp(log_heights)
    return times, log_heights, rates


def _solve(initial, law, acceleration, t_end, threshold, method, rtol, atol):
    def rhs(_, state):
        s, rate = state
        height = math.exp(s)
        return [rate / height, rate * float(law(height)) + acceleration]

    events = None
    if threshold is not None:

        def touchdown(_, state):
            return state[0] - threshold

        touchdown.terminal = True
        touchdown.direction = -1
        events = [touchdown]

    solution = integrate.solve_ivp(
        rhs,
        (initial.time, t_end),
        [math.log(initial.height), initial.rate],
        method=method,
        events=events,
        dense_output=True,
        rtol=rtol,
        atol=atol,
    )
    crossing = None
    if events and len(solution.t_events[0]):
        hit = solution.y_events[0][0]
        crossing = GapState(solution.t_events[0][0], math.exp(hit[0]), hit[1])
    elif solution.status != 0:
        raise GapIntegrationError(
            "gap integration stopped at t=%.6g before any contact: %s"
            % (solution.t[-1], solution.message)
        )
    return solution, crossing


def integrate_gap_ode(
    initial,
    law,
    acceleration,
    t_end,
    contact_height=CONTACT_HEIGHT,
    method="LSODA",
    rtol=1e-10,
    atol=1e-12,
):
    """Integrate ḧ = ḣ𝒟(h) + a from ``initial`` until ``t_end`` or contact.

    The height is carried as s = ln h so that its relative accuracy holds
    as h → 0. Contact is the first downward crossing of ``contact_height``,
    located by root finding on the dense output, under a law that reaches
    h = 0 in finite time. Under the unregularized inverse law the gap is
    followed past that height along the law's first integral and no
    contact is reported.

    Raises GapIntegrationError when the integrator stops before reaching
    ``t_end`` without a contact.
    """
    if not initial.height > 0:
        raise GapIntegrationError("initial gap must be positive, got %r" % initial.height)
    if method not in METHODS:
        raise GapIntegrationError("unknown integration method %r" % method)
    threshold = math.log(contact_height) if contact_height > 0 else None

    times, log_heights, rates = [], [], []
    contact = None
    state = initial
    while True:
        solution, crossing = _solve(
            state, law, acceleration, t_end, threshold, method, rtol, atol
        )
        times.append(solution.t)
        log_heights.append(solution.y[0])
        rates.append(solution.y[1])
        if crossing is None:
            break
        if law.reaches_contact:
            contact = crossing
            break
        LOG.debug(
            "Gap below %g under inverse drag at t=%.6g; following its first integral",
            contact_height,
            crossing.time,
        )
        tail = _slaved_tail(crossing, law, acceleration, t_end, contact_height)
        times.append(tail[0])
        log_heights.append(tail[1])
        rates.append(tail[2])
        if tail[0][-1] >= t_end:
            break
        # Buoyant solid lifted back above contact_height.
        state = GapState(tail[0][-1], math.exp(tail[1][-1]), tail[2][-1])

    trajectory = GapTrajectory(
        times=np.concatenate(times),
        log_heights=np.concatenate(log_heights),
        rates=np.concatenate(rates),
        law=law,
        acceleration=acceleration,
        contact=contact,
    )
    if contact:
        LOG.info(
            "Contact under %s drag at t=%.10g (impact velocity %.6g)",
            law.kind,
            contact.time,
            contact.rate,
            extra={"event": {"type": "gap-contact"}},
        )
    else:
        LOG.info(
            "No contact under %s drag up to t=%.6g; final gap %.6g",
            law.kind,
            trajectory.times[-1],
            trajectory.final.height,
            extra={"event": {"type": "gap-no-contact"}},
        )
    return trajectory


def log_contact_envelope(times, initial, law, acceleration):
    """Logarithm of the positive lower envelope of the gap under the inverse law.

    The law admits the first integral ḣ + κ ln h − a t = const, which
    bounds h from below by min(h₀, exp((a t + ḣ₀ + κ ln h₀)/κ)) while
    the solid approaches.
    """
    if law.kind != "inverse":
        raise GapIntegrationError("the contact envelope is only defined for the inverse drag law")
    kappa = law.coefficient
    times = np.asarray(times, dtype=float) - initial.time
    exponent = (acceleration * times + initial.rate + kappa * math.log(initial.height)) / kappa
    return np.minimum(math.log(initial.height), exponent)


def contact_envelope(times, initial, law, acceleration):
    return np.exp(log_contact_envelope(times, initial, law, acceleration))


def buoyancy_acceleration(rho_fluid, rho_solid, gravity):
    """((ρ_S − ρ_F)/ρ_S) times the vertical gravity component."""
    return (rho_solid - rho_fluid) / rho_solid * float(np.asarray(gravity)[-1])


@attr.s(frozen=True)
class ContactEstimate(object):
    """First time the gap fell below the 2δ guard of a simulation.

    ``bracket`` holds the accepted step before the event and the trial time
    that triggered it; ``extrapolated`` is the root of a local quadratic
    fit of the gap, or None if the fit never reaches zero.
    """

    time = attr.ib()
    bracket = attr.ib(converter=tuple)
    extrapolated = attr.ib(default=None)


def _extrapolate(times, gaps):
    times = np.asarray(times[-3:], dtype=float)
    gaps = np.asarray(gaps[-3:], dtype=float)
    degree = min(2, len(times) - 1)
    if degree < 1:
        return None
    coefficients = np.polyfit(times - times[-1], gaps, degree)
    roots = np.roots(coefficients)
    ahead = [r.real for r in roots if abs(r.imag) < 1e-12 and r.real > 0.0]
    if not ahead:
        return None
    return float(times[-1] + min(ahead))


def contact_time(result):
    """Scan a simulation for the collision-approach event; None if absent."""
    guard = 2.0 * result.system.params.band
    times = [record.time for record in result.records]
    gaps = [record.gap for record in result.records]
    for index, gap in enumerate(gaps):
        if gap < guard:
            start = times[max(index - 1, 0)]
            estimate = ContactEstimate(
                time=times[index],
                bracket=(start, times[index]),
                extrapolated=_extrapolate(times[: index + 1], gaps[: index + 1]),
            )
            return estimate
    if result.termination == "collision-approach":
        event = result.error
        return ContactEstimate(
            time=event.time,
            bracket=(times[-1], event.time),
            extrapolated=_extrapolate(times + [event.time], gaps + [event.gap]),
        )
    return None
