"""Numerical verification of Beckner-type inequalities for Cauchy-type measures."""

import json

from ._beckner import *  # noqa: F401,F403
from ._beckner import run_suite_json


def run_suite(suite="all", deterministic_timestamps=True):
    """Run a verification suite and return the parsed JSON report."""
    return json.loads(run_suite_json(suite, deterministic_timestamps))
