import logging

from .. import rates
from ..arguments import SplitAndExtend
from ..services import ExecutorService
from .base import EXIT_VALIDATION, SlipBase, step

LOG = logging.getLogger("fsilab.slip")


def _connect(scenario, executor):
    config = scenario.rates
    return rates.connect_study(
        values=config.connect,
        band=config.construction_band,
        radius=scenario.shape.radius,
        executor=executor,
    )


def _testfn(scenario, executor):
    config = scenario.rates
    return rates.testfn_study(
        values=config.testfn,
        alpha=config.alpha,
        radius=scenario.shape.radius,
        executor=executor,
    )


def _rigidify(scenario, executor):
    config = scenario.rates
    return rates.rigidify_study(
        values=config.rigidify,
        band=config.construction_band,
        radius=scenario.shape.radius,
        executor=executor,
    )


def _penalization(scenario, executor):
    return rates.penalization_study(
        scenario.simulation_setup(), values=scenario.rates.penalization, executor=executor
    )


def _slip_flux(scenario, executor):
    return rates.slip_flux_study(
        scenario.simulation_setup(), values=scenario.rates.penalization, executor=executor
    )


def _slip_limit(scenario, executor):
    return rates.slip_limit_study(
        scenario.simulation_setup(), values=scenario.rates.slip_limit, executor=executor
    )


def _self_convergence(scenario, executor):
    return rates.self_convergence_study(
        scenario.simulation_setup(),
        levels=scenario.rates.self_convergence_levels,
        executor=executor,
    )


RUNNERS = {
    "connect": _connect,
    "testfn": _testfn,
    "rigidify": _rigidify,
    "penalization": _penalization,
    "slip-flux": _slip_flux,
    "slip-limit": _slip_limit,
    "self-convergence": _self_convergence,
}


class SlipRates(SlipBase, ExecutorService):
    """Measure convergence rates of the constructions and the scheme.

    Each study sweeps one parameter, evaluates a norm per sweep point on the
    worker pool and fits the log-log slope, which is compared with its
    expected value. Sweeps come from the scenario's [rates] section.

    Studies: connect, testfn, rigidify (constructions around the scenario's
    disk) and penalization, slip-flux, slip-limit, self-convergence (full
    simulations of the scenario). The slope table is written as JSON.
    """

    def add_args(self):
        self.parser.add_argument(
            "studies",
            help="comma-separated studies to run: %s" % ", ".join(rates.STUDIES),
            action=SplitAndExtend,
            split_on=",",
        )
        super(SlipRates, self).add_args()

    @step("Run studies")
    def run_studies(self, scenario):
        results = []
        try:
            for name in self.args.studies:
                LOG.info("Running %s study", name)
                result = RUNNERS[name](scenario, self.executor)
                _report(result)
                results.append(result)
        finally:
            self.shutdown_executor()
        return results

    @step("Write results")
    def write_results(self, results):
        document = {
            "scenario": self.scenario.name,
            "studies": [result.to_dict() for result in results],
        }
        self.result_writer.write_json("rates.json", "rates", document)
        return results

    def run_scenario(self, scenario):
        unknown = [name for name in self.args.studies if name not in RUNNERS]
        if unknown or not self.args.studies:
            self.fail(
                EXIT_VALIDATION,
                "Unknown or missing study %s; choose from %s",
                ", ".join(unknown) or "(none)",
                ", ".join(rates.STUDIES),
            )
        results = self.run_studies(scenario)
        self.write_results(results)


def _report(result):
    for name, slope in sorted(result.slopes.items()):
        LOG.info("%s: %s slope %.4f", result.study, name, slope)
    for name, passed in sorted(result.passed().items()):
        if not passed:
            LOG.warning("%s: %s outside its expected range", result.study, name)


def entry_point(cls=SlipRates):
    cls().main()


def doc_parser():
    return SlipRates().parser
