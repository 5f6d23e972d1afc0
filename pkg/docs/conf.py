# Sphinx configuration for the fsilab-slip command reference.
#
# Each command page renders its argparse parser through sphinxarg.ext;
# the parsers are imported from ../src.
import os
import sys

sys.path.insert(0, os.path.abspath("../src"))

project = "fsilab-slip"
copyright = "2026, fsilab contributors"
author = "fsilab contributors"

extensions = ["sphinxarg.ext"]

source_suffix = ".rst"
master_doc = "index"
language = "en"
exclude_patterns = ["_build"]

html_theme = "alabaster"
html_theme_options = {"description": "Rigid disks in viscous fluid with Navier slip"}
