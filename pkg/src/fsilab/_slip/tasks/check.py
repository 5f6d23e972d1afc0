import logging

import attr

from ..arguments import SplitAndExtend
from ..diagnostics import (
    bubble_test_function,
    density_test_function,
    energy_report,
    mass_residual,
    rigid_test_function,
    weak_residual,
)
from ..exceptions import IncompatibleDataError
from .base import EXIT_VALIDATION, SlipBase, step

LOG = logging.getLogger("fsilab.slip")

RESIDUAL_COLUMNS = [
    ("test_fn", "-"),
    ("value", "kg m/s"),
    ("tolerance", "kg m/s"),
    ("steps", "-"),
    ("within_tolerance", "-"),
]


@attr.s(frozen=True)
class TestFunctionSpec(object):
    """A parsed ``--test-fn`` argument: ``bubble:cx,cy,R[,A]`` or ``rigid:vx,vy,w``."""

    __test__ = False

    kind = attr.ib()
    values = attr.ib(converter=tuple)
    text = attr.ib()

    @classmethod
    def parse(cls, text):
        kind, sep, rest = text.partition(":")
        if not sep:
            raise ValueError("test function %r needs a kind, e.g. bubble:1,1,0.5" % text)
        try:
            values = [float(v) for v in rest.split(",")]
        except ValueError:
            raise ValueError("test function %r has a non-numeric value" % text)
        if kind == "bubble" and len(values) not in (3, 4):
            raise ValueError("bubble test function takes cx,cy,R[,A], got %r" % text)
        if kind == "bubble" and values[2] <= 0:
            raise ValueError("bubble radius must be strictly positive in %r" % text)
        if kind == "rigid" and len(values) != 3:
            raise ValueError("rigid test function takes vx,vy,w, got %r" % text)
        if kind not in ("bubble", "rigid"):
            raise ValueError("unknown test function kind %r" % kind)
        return cls(kind, values, text)

    def build(self, result):
        horizon = result.final_time
        if self.kind == "bubble":
            amplitude = self.values[3] if len(self.values) == 4 else 1.0
            return bubble_test_function(self.values[:2], self.values[2], horizon, amplitude)
        system = result.system
        return rigid_test_function(
            result.records, system.shape, system.params.band, self.values, horizon
        )


def _report(report):
    return {
        "value": report.value,
        "tolerance": report.tolerance,
        "within_tolerance": report.within_tolerance,
        "steps": report.steps,
        "nodes": report.nodes,
        "terms": report.terms,
    }


class SlipCheck(SlipBase):
    """Check the weak formulation and the energy inequality on a simulation.

    The scenario is simulated, then each --test-fn is substituted in the weak
    momentum identity along the computed trajectory:

      bubble:cx,cy,R[,A]   a fluid-only bubble of radius R centred at (cx, cy)
      rigid:vx,vy,w        rigid on the disk, cut off over the band

    Both carry a time factor vanishing at the final time. The mass transport
    identity and the energy inequality are checked as well. The residual
    report is written as JSON and CSV.
    """

    def add_args(self):
        super(SlipCheck, self).add_args()

        group = self.parser.add_argument_group("Check options")
        group.add_argument(
            "--test-fn",
            help="test function spec; repeat the option or separate specs with ';'",
            action=SplitAndExtend,
            split_on=";",
            required=True,
        )

    @property
    def test_functions(self):
        return [TestFunctionSpec.parse(text) for text in self.args.test_fn]

    @step("Evaluate residuals")
    def evaluate(self, result, specs):
        if not result.ledger:
            raise IncompatibleDataError("no accepted step to evaluate residuals on", 0.0)
        residuals = []
        for spec in specs:
            report = weak_residual(result, spec.build(result))
            LOG.info("Weak residual for %s: %.3e", spec.text, report.value)
            if not report.within_tolerance:
                LOG.warning(
                    "Weak residual for %s exceeds %.3e", spec.text, report.tolerance
                )
            residuals.append((spec, report))

        first = result.records[0]
        psi = density_test_function(first.center, result.system.shape.radius, result.final_time)
        mass = mass_residual(
            result.records,
            result.system.shape,
            psi,
            time_step=result.time_step,
            order=result.system.params.quadrature_order,
        )
        LOG.info("Mass transport residual: %.3e", mass.value)
        energy = energy_report(result)
        return {"residuals": residuals, "mass": mass, "energy": energy}

    @step("Write results")
    def write_results(self, result, checks):
        residuals = checks["residuals"]
        energy = checks["energy"]
        writer = self.result_writer
        writer.write_csv(
            "residuals.csv",
            RESIDUAL_COLUMNS,
            (
                [spec.text, r.value, r.tolerance, r.steps, str(r.within_tolerance).lower()]
                for spec, r in residuals
            ),
        )
        document = {
            "scenario": self.scenario.name,
            "termination": result.termination,
            "horizon": result.final_time,
            "residuals": [dict(_report(r), test_fn=spec.text) for spec, r in residuals],
            "mass": _report(checks["mass"]),
            "energy": {
                "holds": energy.holds,
                "tolerance": energy.tolerance,
                "min_slack": min(energy.slack),
            },
        }
        writer.write_json("check.json", "check", document)
        return checks

    def run_scenario(self, scenario):
        try:
            specs = self.test_functions
        except ValueError as exc:
            self.fail(EXIT_VALIDATION, "Invalid test function: %s", exc)
        result = self.simulate(scenario)
        try:
            checks = self.evaluate(result, specs)
        except IncompatibleDataError as exc:
            self.fail(EXIT_VALIDATION, "Test function rejected: %s", exc)
        self.write_results(result, checks)
        self.fail_on_termination(result)


def entry_point(cls=SlipCheck):
    cls().main()


def doc_parser():
    return SlipCheck().parser
