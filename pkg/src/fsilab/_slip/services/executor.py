import logging
import os
import threading

from more_executors import Executors

from ..arguments import from_environ
from .base import Service

LOG = logging.getLogger("fsilab.slip")


def _workers(value):
    count = int(value)
    if count < 1:
        raise ValueError("worker count must be at least 1")
    return count


class ExecutorService(Service):
    """A service providing the worker pool for independent sweep points.

    Results are always joined in submission order, so outputs do not
    depend on the number of workers.
    """

    def __init__(self, *args, **kwargs):
        self._executor_lock = threading.Lock()
        self._executor = None
        super(ExecutorService, self).__init__(*args, **kwargs)

    def add_service_args(self, parser):
        super(ExecutorService, self).add_service_args(parser)

        group = parser.add_argument_group("Executor service")
        group.add_argument(
            "--workers",
            help="Number of worker threads for sweep points "
            "(or set FSILAB_WORKERS environment variable; default: CPU count)",
            default="",
            type=from_environ("FSILAB_WORKERS", _workers),
        )

    @property
    def executor(self):
        """Thread pool shared by every study of the command."""
        with self._executor_lock:
            if not self._executor:
                workers = self._service_args.workers or os.cpu_count() or 1
                LOG.debug("Using %d worker thread(s)", workers)
                self._executor = Executors.thread_pool(
                    name="fsilab-slip-sweep", max_workers=workers
                )
        return self._executor

    def shutdown_executor(self):
        """Wait for pending work and release the pool, if one was created."""
        with self._executor_lock:
            if self._executor:
                self._executor.shutdown(wait=True)
                self._executor = None
