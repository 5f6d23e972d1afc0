import logging
import sys

import pytest

from fsilab._slip.task import SlipTask


class QuietTask(SlipTask):
    def run(self):
        pass


def simple_basic_config(level, **_kwargs):
    """Like logging.basicConfig, but only sets the root level, every time."""
    logging.getLogger().setLevel(level)


@pytest.fixture(autouse=True)
def clean_loggers(monkeypatch):
    """Hijack logging.basicConfig and restore the levels touched by --debug."""
    monkeypatch.setattr(logging, "basicConfig", simple_basic_config)

    names = [None, "fsilab", "fsilab.slip", "more_executors"]
    levels = dict((name, logging.getLogger(name).level) for name in names)
    for name in names[1:]:
        logging.getLogger(name).setLevel(logging.NOTSET)
    yield
    for name, level in levels.items():
        logging.getLogger(name).setLevel(level)


@pytest.fixture
def project_logger():
    return logging.getLogger("fsilab.slip")


@pytest.fixture
def pool_logger():
    """The worker pool's logger, enabled at the second tier."""
    return logging.getLogger("more_executors.thread_pool")


@pytest.fixture
def foreign_logger():
    out = logging.getLogger("some-foreign-logger")
    level = out.level
    out.setLevel(logging.NOTSET)
    yield out
    out.setLevel(level)


@pytest.mark.parametrize(
    "argv, expected",
    [
        ([], (logging.INFO, logging.INFO, logging.INFO)),
        (["--debug"], (logging.DEBUG, logging.INFO, logging.INFO)),
        (["-dd"], (logging.DEBUG, logging.DEBUG, logging.INFO)),
        (["--debug", "-d", "--debug"], (logging.DEBUG, logging.DEBUG, logging.DEBUG)),
    ],
)
def test_debug_tiers(argv, expected, project_logger, pool_logger, foreign_logger):
    """Each --debug enables DEBUG for a wider set of loggers."""
    sys.argv = ["quiet-task"] + argv
    QuietTask().main()

    assert (
        project_logger.getEffectiveLevel(),
        pool_logger.getEffectiveLevel(),
        foreign_logger.getEffectiveLevel(),
    ) == expected
