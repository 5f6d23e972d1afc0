import logging
import textwrap
from argparse import ArgumentParser, RawDescriptionHelpFormatter

from .step import StepDecorator

LOG = logging.getLogger("fsilab.slip")
LOG_FORMAT = "%(asctime)s [%(levelname)-8s] %(message)s"

# Loggers switched to DEBUG by the first, second and third --debug.
DEBUG_TIERS = (
    ("fsilab.slip",),
    ("fsilab", "more_executors"),
    (None,),
)


def _rewrap(paragraph):
    # Indented paragraphs are tables or examples: keep their layout.
    if paragraph.startswith(" "):
        return paragraph
    return "\n".join(textwrap.wrap(paragraph))


class SlipTask(object):
    """Base class for slip laboratory commands.

    A subclass documents its command in its doc string, adds its options in
    add_args and does its work in run. Services are mixed in for shared
    options such as the output directory.
    """

    def __init__(self):
        super(SlipTask, self).__init__()
        self._args = None
        self.parser = ArgumentParser(
            description=self.description, formatter_class=RawDescriptionHelpFormatter
        )
        self.parser.add_argument(
            "--debug",
            "-d",
            action="count",
            default=0,
            help="Show debug logs; repeat up to three times to include the worker "
            "pool and then every library",
        )
        self.add_args()

    @property
    def description(self):
        """Parser description (and generated docs): the class doc string.

        The summary line is kept, the body is dedented and plain paragraphs
        are re-wrapped, since RawDescriptionHelpFormatter prints text as is.
        """
        summary, _, body = (self.__doc__ or "<undocumented command>").partition("\n")
        text = (summary + "\n" + textwrap.dedent(body)).strip()
        return "\n\n".join(_rewrap(p) for p in text.split("\n\n"))

    @property
    def args(self):
        """Command-line arguments, parsed from sys.argv on first access."""
        if self._args is None:
            self._args = self.parser.parse_args()
        return self._args

    @classmethod
    def step(cls, name):
        """Mark an instance method as a named step of the command.

        Steps log "started", then "finished" or "failed", each with an
        ``event`` extra of type ``<slug>-start|end|error``; the slug is the
        lower-cased name with dashes, e.g. ``run-simulation``. Failures add
        the exception class or the exit code to the event. A step whose slug
        is listed in ``--skip`` is not run and returns its first argument.
        """
        return StepDecorator(name)

    def configure_logging(self):
        logging.basicConfig(level=logging.INFO, format=LOG_FORMAT)
        for tier in DEBUG_TIERS[: self.args.debug]:
            for name in tier:
                logging.getLogger(name).setLevel(logging.DEBUG)

    def add_args(self):
        """Add command options, e.g. self.parser.add_argument("scenario")."""
        # Services may come before or after this class in the MRO.
        from_super = getattr(super(SlipTask, self), "add_args", lambda: None)
        from_super()

    def run(self):
        """Do the command's work."""
        raise NotImplementedError()

    def main(self):
        """Entry point body: configure logging, run, return the exit status."""
        self.configure_logging()
        self.run()
        return 0
