import logging
import threading

from ..arguments import from_environ
from ..output import ResultWriter
from .base import Service

LOG = logging.getLogger("fsilab.slip")


class OutputService(Service):
    """A service providing the writer for a command's result files.

    Files go to --output-dir (or FSILAB_OUTPUT_DIR) when given, otherwise
    to the scenario's [output].directory, named after [output].prefix.
    """

    def __init__(self, *args, **kwargs):
        self._writer_lock = threading.Lock()
        self._writer = None
        super(OutputService, self).__init__(*args, **kwargs)

    def add_service_args(self, parser):
        super(OutputService, self).add_service_args(parser)

        group = parser.add_argument_group("Output service")
        group.add_argument(
            "--output-dir",
            help="Directory for result files, overriding the scenario "
            "(or set FSILAB_OUTPUT_DIR environment variable)",
            default="",
            type=from_environ("FSILAB_OUTPUT_DIR"),
        )

    @property
    def result_writer(self):
        """The ResultWriter used for the rest of the command."""
        with self._writer_lock:
            if not self._writer:
                self._writer = self._get_writer()
        return self._writer

    def _get_writer(self):
        assert hasattr(self, "output_config"), "BUG: OutputService needs 'output_config'"
        config = self.output_config  # pylint: disable=no-member
        directory = self._service_args.output_dir or config.directory
        LOG.debug("Writing results under %s with prefix %s", directory, config.prefix)
        return ResultWriter(directory, config.prefix)
