import os
import sys

import pytest

from .command import CommandTester


@pytest.fixture(autouse=True)
def save_argv():
    """Saves and restores sys.argv around each test.

    This is an autouse fixture, so tests can freely modify
    sys.argv without concern.
    """
    orig_argv = sys.argv[:]
    yield
    sys.argv[:] = orig_argv


@pytest.fixture(autouse=True)
def home_tmpdir(tmpdir, monkeypatch):
    """Points HOME underneath tmpdir for the duration of tests."""
    homedir = str(tmpdir.mkdir("home"))
    monkeypatch.setenv("HOME", homedir)


@pytest.fixture(autouse=True)
def output_dir(tmpdir, monkeypatch):
    """Sends every command's result files into tmpdir.

    This is an autouse fixture so that no test writes into the
    working directory by accident.
    """
    path = str(tmpdir.mkdir("out"))
    monkeypatch.setenv("FSILAB_OUTPUT_DIR", path)
    monkeypatch.delenv("FSILAB_WORKERS", raising=False)
    yield path


@pytest.fixture
def scenario_file(tmpdir):
    """Returns a function writing scenario text to a file and giving its path."""

    def write(text, name="scenario.toml"):
        path = os.path.join(str(tmpdir), name)
        with open(path, "wt") as f:
            f.write(text)
        return path

    return write


@pytest.fixture
def command_tester(request, caplog, tmpdir):
    """Yields a configured instance of CommandTester class for
    running commands and testing output against expected.
    """
    yield CommandTester(request.node, caplog, scrub={str(tmpdir): "<tmpdir>"})
