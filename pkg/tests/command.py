"""Helpers for testing commands."""

import difflib
import json
import logging
import os
import re
import sys
import traceback

LOGS_DIR = os.path.join(os.path.dirname(__file__), "logs")

# Numbers in messages depend on the platform's floating point; the baselines
# pin the log flow and the tests assert the values from the result files.
NUMBER = re.compile(r"-?\b\d+(?:\.\d+)?(?:[eE][-+]?\d+)?\b")


class CommandTester(object):
    """Runs a command entry point, captures its logs and compares them
    against baselines.

    An instance may be obtained via command_tester fixture.
    """

    def __init__(self, node, caplog, scrub=None):
        self._node = node
        self._caplog = caplog
        # paths replaced by placeholders so baselines do not depend on tmpdir
        self._scrub = scrub or {}

    def test(self, fn, args):
        """Put args into sys.argv, run fn and compare its logs with the baselines.

        INFO and higher logs are compared with tests/logs/<module>/<test>.txt,
        numbers masked as <num>, and the 'event' extras with the .jsonl file
        next to it. A missing baseline fails the test; set UPDATE_BASELINES=1
        to write or refresh baselines after an intended change.

        Returns the exit code of the command (0 when it returned normally).
        """
        self._caplog.set_level(logging.INFO)

        sys.argv[:] = args
        exception = None
        code = 0
        try:
            fn()
        except AssertionError:
            raise
        except SystemExit as ex:
            exception = ex
            code = ex.code
        except Exception as ex:  # pylint: disable=broad-except
            traceback.print_exc()
            exception = ex
            code = None

        records = [r for r in self._caplog.records if r.levelno >= logging.INFO]
        self._compare_outcome(records, exception)
        return code

    @property
    def logfile_basename(self):
        # tests/tasks/test_simulate.py::test_neutral_buoyancy
        #   => <logdir>/tasks/test_simulate/test_neutral_buoyancy
        out = self._node.nodeid
        if out.startswith("tests/"):
            out = out[len("tests/") :]
        out = out.replace(".py", "").replace("::", "/")
        return os.path.join(LOGS_DIR, out)

    def _clean(self, text):
        for path, placeholder in sorted(self._scrub.items(), key=lambda kv: -len(kv[0])):
            text = text.replace(path, placeholder)
        return text

    def _get_actual_plaintext(self, records):
        return "".join(
            "[%8s] %s\n"
            % (record.levelname, NUMBER.sub("<num>", self._clean(record.getMessage())))
            for record in records
        )

    def _get_actual_jsonl(self, records):
        events = [{"event": record.event} for record in records if hasattr(record, "event")]
        return "\n".join(json.dumps(x, sort_keys=True) for x in events)

    def _update_baseline(self, filename, content):
        if not content.strip():
            return
        dirname = os.path.dirname(filename)
        if not os.path.exists(dirname):
            os.makedirs(dirname)
        with open(filename, "wt") as f:
            f.write(content)

    def _compare_expected(self, text, suffix, exception=None):
        filename = self.logfile_basename + suffix
        if not text.endswith("\n"):
            text += "\n"

        expected_content = None
        if os.path.exists(filename):
            with open(filename, "rt") as f:
                expected_content = f.read()

        if expected_content == text:
            return
        if os.environ.get("UPDATE_BASELINES", "0") == "1":
            self._update_baseline(filename, text)
            return
        if expected_content is None:
            raise AssertionError(
                "Missing baseline %s (set UPDATE_BASELINES=1 to create it):\n%s"
                % (filename, text)
            )

        diff = list(
            difflib.unified_diff(
                expected_content.split("\n"),
                text.split("\n"),
                fromfile=filename,
                tofile="<output of test>",
                lineterm="",
            )
        )
        exception_changed = any(line.startswith("+# Raised:") for line in diff)
        message = (
            "Output differs from expected (set UPDATE_BASELINES=1 if intended):\n"
            + "\n".join(diff)
        )
        if exception_changed and exception:
            print(message)
            raise exception
        raise AssertionError(message)

    def _compare_outcome(self, records, exception):
        plaintext = self._get_actual_plaintext(records)
        if exception:
            plaintext += "# Raised: %s\n" % self._clean(str(exception))
        self._compare_expected(plaintext, ".txt", exception)
        self._compare_expected(self._get_actual_jsonl(records), ".jsonl")
