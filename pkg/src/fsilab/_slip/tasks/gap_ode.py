import logging

import numpy as np

from ..collision import integrate_gap_ode, log_contact_envelope
from .base import EXIT_VALIDATION, SlipBase, step

LOG = logging.getLogger("fsilab.slip")

GAP_COLUMNS = [("time", "s"), ("height", "m"), ("rate", "m/s")]


def _state(state):
    if state is None:
        return None
    return {"time": state.time, "height": state.height, "rate": state.rate}


def event_summary(scenario, trajectory):
    """The gap ODE event document."""
    config = scenario.gap_ode
    law = config.law
    document = {
        "scenario": scenario.name,
        "law": law.kind,
        "coefficient": law.coefficient,
        "floor": law.floor,
        "acceleration": config.acceleration,
        "method": config.method,
        "initial": _state(config.initial),
        "contact": _state(trajectory.contact),
        "final": _state(trajectory.final),
        "min_height": float(np.min(trajectory.heights)),
        "min_log_height": float(np.min(trajectory.log_heights)),
        "envelope_holds": None,
    }
    if law.kind == "inverse":
        envelope = log_contact_envelope(
            trajectory.times, config.initial, law, config.acceleration
        )
        document["envelope_holds"] = bool(np.all(trajectory.log_heights >= envelope - 1e-6))
    return document


class SlipGapOde(SlipBase):
    """Integrate the reduced gap equation of a disk approaching a wall.

    The gap h(t) obeys h'' = h'D(h) + a with the near-wall drag D chosen in
    the scenario's [gap_ode] section: logarithmic (the Navier slip case),
    inverse (the no-slip case) or none. Integration stops at [gap_ode].t_end
    or when h first drops below [gap_ode].contact_height. The inverse law never
    reaches the wall in finite time: its gap is followed below that height
    and reported through min_log_height.

    Writes the sampled trajectory as CSV and the contact event as JSON.
    """

    @step("Integrate gap")
    def integrate(self, scenario):
        config = scenario.gap_ode
        return integrate_gap_ode(
            config.initial,
            config.law,
            config.acceleration,
            config.t_end,
            contact_height=config.contact_height,
            method=config.method,
            rtol=config.rtol,
            atol=config.atol,
        )

    @step("Write results")
    def write_results(self, trajectory):
        writer = self.result_writer
        rows = zip(trajectory.times, trajectory.heights, trajectory.rates)
        writer.write_csv("gap.csv", GAP_COLUMNS, rows)
        writer.write_json("gap-event.json", "gap_ode", event_summary(self.scenario, trajectory))
        return trajectory

    def run_scenario(self, scenario):
        if scenario.gap_ode is None:
            self.fail(EXIT_VALIDATION, "Scenario %s has no [gap_ode] section", scenario.name)
        trajectory = self.integrate(scenario)
        self.write_results(trajectory)


def entry_point(cls=SlipGapOde):
    cls().main()


def doc_parser():
    return SlipGapOde().parser
