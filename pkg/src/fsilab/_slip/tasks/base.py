import logging
import os
import sys

from ..arguments import SplitAndExtend
from ..exceptions import PicardFailure, ScenarioError, SlipError
from ..galerkin import build_system, initial_state, run_simulation
from ..scenario import OutputConfig, load_scenario
from ..services import OutputService
from ..task import SlipTask

LOG = logging.getLogger("fsilab.slip")

EXIT_FAILURE = 30
EXIT_PICARD = 31
EXIT_COLLISION = 32
EXIT_VALIDATION = 33

step = SlipTask.step


class SlipBase(SlipTask, OutputService):
    """
    Base class for commands driven by a scenario file.
    """

    def __init__(self, *args, **kwargs):
        self._scenario = None
        super(SlipBase, self).__init__(*args, **kwargs)

    def add_args(self):
        super(SlipBase, self).add_args()

        group = self.parser.add_argument_group("Scenario options")
        group.add_argument("scenario", help="path to a TOML scenario file")
        group.add_argument(
            "--skip",
            help="skip the given step(s), e.g. --skip write-results",
            action=SplitAndExtend,
            split_on=",",
        )

    @property
    def scenario(self):
        if self._scenario is None:
            self._scenario = load_scenario(self.args.scenario)
        return self._scenario

    @property
    def output_config(self):
        if self._scenario is not None:
            return self._scenario.output
        stem = os.path.splitext(os.path.basename(self.args.scenario))[0]
        return OutputConfig(directory=".", prefix=stem or "scenario")

    def fail(self, code, msg, *args, **kwargs):
        """Log ``msg`` at ERROR, write the error document and exit with ``code``."""
        details = kwargs.pop("details", None)
        LOG.error(msg, *args)
        try:
            self.result_writer.write_error(code, msg % args if args else msg, details)
        except (OSError, ValueError) as exc:
            LOG.warning("Could not write the error document: %s", exc)
        sys.exit(code)

    @step("Load scenario")
    def load(self):
        scenario = self.scenario
        LOG.info("Loaded scenario %s from %s", scenario.name, self.args.scenario)
        self.result_writer.write_scenario(scenario)
        return scenario

    @step("Run simulation")
    def simulate(self, scenario):
        system = build_system(scenario.cavity, scenario.shape, scenario.params)
        state = initial_state(system, scenario.placement, scenario.initial_coefficients())
        return run_simulation(system, state, scenario.t_end)

    def fail_on_termination(self, result):
        """Exit with the code of an early-ended simulation; no-op if it completed."""
        if result.termination == "collision-approach":
            event = result.error
            self.fail(
                EXIT_COLLISION,
                "Simulation stopped by a collision approach at t=%.6g",
                event.time,
                details={
                    "event": "collision-approach",
                    "time": event.time,
                    "gap": event.gap,
                    "guard": 2.0 * result.system.params.band,
                    "last_accepted_time": event.state.time,
                },
            )
        if result.termination == "picard-failure":
            error = result.error
            self.fail(
                EXIT_PICARD,
                "Simulation stopped by a Picard failure at t=%.6g: %s",
                error.time,
                error,
                details={
                    "event": "picard-failure",
                    "time": error.time,
                    "residuals": error.history,
                },
            )

    def run(self):
        try:
            scenario = self.load()
        except ScenarioError as exc:
            self.fail(EXIT_VALIDATION, "Invalid scenario: %s", exc, details=_position(exc))
        except OSError as exc:
            self.fail(EXIT_VALIDATION, "Cannot read scenario: %s", exc)

        try:
            self.run_scenario(scenario)
        except PicardFailure as exc:
            self.fail(EXIT_PICARD, "Picard failure: %s", exc, details={"residuals": exc.history})
        except SlipError as exc:
            self.fail(EXIT_FAILURE, "%s failed: %s", type(exc).__name__, exc)

    def run_scenario(self, scenario):
        """Do the command's work on a loaded scenario."""
        raise NotImplementedError()


def _position(exc):
    return {
        "section": exc.section,
        "key": exc.key,
        "line": exc.line,
        "column": exc.column,
    }
