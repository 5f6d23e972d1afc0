"""Result files: CSV tables, schema-checked JSON documents and the scenario dump."""
import csv
import functools
import json
import logging
import math
import os

import jsonschema
import numpy as np

from .scenario import dump_scenario

LOG = logging.getLogger("fsilab.slip")

SCHEMA_PATH = os.path.join(os.path.dirname(__file__), "schema", "output.schema.json")

KINDS = ("simulation", "gap_ode", "rates", "check", "error")


@functools.lru_cache(maxsize=None)
def load_schema():
    with open(SCHEMA_PATH, "rt") as f:
        return json.load(f)


def validate_document(kind, document):
    """Raise jsonschema.ValidationError unless ``document`` is a valid ``kind``."""
    if kind not in KINDS:
        raise ValueError("unknown document kind %r" % kind)
    schema = dict(load_schema())
    schema["$ref"] = "#/definitions/%s" % kind
    jsonschema.Draft7Validator(schema).validate(document)


def plain(value):
    """JSON-ready copy: numpy scalars and arrays unwrapped, non-finite floats as null."""
    if isinstance(value, dict):
        return dict((str(k), plain(v)) for k, v in value.items())
    if isinstance(value, (list, tuple, np.ndarray)):
        return [plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


class ResultWriter(object):
    """Writes ``<prefix>-<name>`` files into one output directory."""

    def __init__(self, directory, prefix):
        self.directory = directory
        self.prefix = prefix

    def path(self, name):
        if not os.path.isdir(self.directory):
            os.makedirs(self.directory)
        return os.path.join(self.directory, "%s-%s" % (self.prefix, name))

    def write_csv(self, name, columns, rows):
        """``columns`` are (field, unit) pairs; rows are sequences of values."""
        path = self.path(name)
        with open(path, "wt", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["%s (%s)" % column for column in columns])
            count = 0
            for row in rows:
                writer.writerow([_cell(v) for v in row])
                count += 1
        LOG.info("Wrote %d rows to %s", count, os.path.basename(path))
        return path

    def write_json(self, name, kind, document):
        document = plain(dict(document, kind=kind))
        validate_document(kind, document)
        path = self.path(name)
        with open(path, "wt") as f:
            json.dump(document, f, sort_keys=True, indent=2)
            f.write("\n")
        LOG.info("Wrote %s", os.path.basename(path))
        return path

    def write_scenario(self, scenario):
        path = self.path("scenario.toml")
        with open(path, "wt") as f:
            f.write(dump_scenario(scenario))
        LOG.debug("Wrote normalized scenario to %s", path)
        return path

    def write_error(self, code, message, details=None):
        return self.write_json(
            "error.json",
            "error",
            {"exit_code": code, "message": message, "details": details or {}},
        )


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value
