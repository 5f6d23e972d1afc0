"""Tests ensuring all task modules have a consistent interface."""

import argparse
import sys

import pytest


@pytest.fixture(
    params=[
        "fsilab._slip.tasks.simulate",
        "fsilab._slip.tasks.gap_ode",
        "fsilab._slip.tasks.rates",
        "fsilab._slip.tasks.check",
    ]
)
def task_module(request):
    __import__(request.param)
    return sys.modules[request.param]


def test_doc_parser(task_module):
    """Every task module has a doc_parser returning an ArgumentParser,
    used to render the command reference."""
    parser = task_module.doc_parser()
    assert isinstance(parser, argparse.ArgumentParser)


def test_entry_point(task_module):
    """Every task module has a callable entry_point."""
    assert callable(getattr(task_module, "entry_point"))


def test_common_options(task_module):
    """Every command takes a scenario and the output directory override."""
    options = [a.dest for a in task_module.doc_parser()._actions]
    assert "scenario" in options
    assert "output_dir" in options
    assert "debug" in options
