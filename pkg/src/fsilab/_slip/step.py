import functools
import logging

LOG = logging.getLogger("fsilab.slip")


class StepDecorator(object):
    """Implementation of SlipTask.step. See that method for more info."""

    def __init__(self, name):
        self.name = name
        self.slug = name.replace(" ", "-").lower()

    def emit(self, level, outcome, suffix, **details):
        event = dict(details, type="%s-%s" % (self.slug, suffix))
        LOG.log(level, "%s: %s", self.name, outcome, extra={"event": event})

    def skipped_by(self, task):
        skip = getattr(task.args, "skip", None) or []
        if isinstance(skip, str):
            skip = skip.split(",")
        return self.slug in skip

    def __call__(self, fn):
        @functools.wraps(fn)
        def run_step(task, *args, **kwargs):
            if self.skipped_by(task):
                self.emit(logging.INFO, "skipped", "skip")
                # A skipped step hands its input to the next one.
                return args[0] if args else None

            self.emit(logging.INFO, "started", "start")
            try:
                result = fn(task, *args, **kwargs)
            except SystemExit as exc:
                if exc.code in (0, None):
                    self.emit(logging.INFO, "finished", "end")
                else:
                    self.emit(logging.ERROR, "failed", "error", exit_code=exc.code)
                raise
            except Exception as exc:
                self.emit(logging.ERROR, "failed", "error", error=type(exc).__name__)
                raise
            self.emit(logging.INFO, "finished", "end")
            return result

        return run_step
