import logging

import attr

from ..collision import contact_time
from ..galerkin import LedgerRow
from .base import SlipBase, step

LOG = logging.getLogger("fsilab.slip")

LEDGER_UNITS = {
    "time": "s",
    "kinetic": "J",
    "viscous": "W",
    "wall_slip": "W",
    "interface_slip": "W",
    "penalization": "W",
    "gravity_work": "W",
    "numerical_dissipation": "J",
}


def ledger_columns():
    return [(a.name, LEDGER_UNITS[a.name]) for a in attr.fields(LedgerRow)]


def ledger_rows(ledger):
    for row in ledger:
        yield [getattr(row, field) for field, _ in ledger_columns()]


def trajectory_columns(size):
    columns = [
        ("time", "s"),
        ("center_x", "m"),
        ("center_y", "m"),
        ("orientation", "rad"),
        ("velocity_x", "m/s"),
        ("velocity_y", "m/s"),
        ("angular_velocity", "rad/s"),
        ("gap", "m"),
    ]
    return columns + [("alpha_%d" % i, "m/s") for i in range(size)]


def trajectory_rows(records):
    for record in records:
        yield [record.time] + list(record.center) + [record.orientation] + list(
            record.rigid
        ) + [record.gap] + list(record.coefficients)


def summary(scenario, result):
    """The simulation summary document."""
    kinetic = [result.initial_energy] + [row.kinetic for row in result.ledger]
    contact = contact_time(result)
    return {
        "scenario": scenario.name,
        "termination": result.termination,
        "steps": len(result.ledger),
        "time_step": result.time_step,
        "final_time": result.final_time,
        "initial_energy": result.initial_energy,
        "max_kinetic_energy": max(kinetic),
        "min_gap": min(record.gap for record in result.records),
        "contact": None
        if contact is None
        else {
            "time": contact.time,
            "bracket": list(contact.bracket),
            "extrapolated": contact.extrapolated,
        },
    }


class SlipSimulate(SlipBase):
    """Simulate a rigid disk in a viscous fluid with Navier slip.

    The penalized Galerkin scheme advances the scenario until [scheme].t_end
    or until the disk comes within two band widths of a cavity wall. The
    trajectory and the energy ledger are written as CSV, with a JSON summary.

    Exit status 32 reports a collision approach, 31 a Picard failure.
    """

    @step("Write results")
    def write_results(self, result):
        writer = self.result_writer
        writer.write_csv(
            "trajectory.csv",
            trajectory_columns(result.system.size),
            trajectory_rows(result.records),
        )
        writer.write_csv("ledger.csv", ledger_columns(), ledger_rows(result.ledger))
        writer.write_json("summary.json", "simulation", summary(self.scenario, result))
        return result

    def run_scenario(self, scenario):
        result = self.simulate(scenario)
        self.write_results(result)
        self.fail_on_termination(result)


def entry_point(cls=SlipSimulate):
    cls().main()


def doc_parser():
    return SlipSimulate().parser
