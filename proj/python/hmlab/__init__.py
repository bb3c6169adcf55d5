"""Python front end to the hmlab core."""

import json

from . import _hmlab
from ._hmlab import ConfigError, HmlabError, set_worker_count

__all__ = [
    "ConfigError",
    "HmlabError",
    "experiment_defaults",
    "experiment_names",
    "list_scenarios",
    "run",
    "run_experiment",
    "set_worker_count",
    "validate",
]


def list_scenarios():
    return json.loads(_hmlab.list_scenarios())


def experiment_names():
    return list(_hmlab.experiment_names())


def experiment_defaults(name):
    return json.loads(_hmlab.experiment_defaults(name))


def run_experiment(name, scenario="flat_line", params=None, seed=1):
    """Runs one experiment; `scenario` is a preset name or a scenario dict."""
    if not isinstance(scenario, str):
        scenario = json.dumps(scenario)
    text = _hmlab.run_experiment(name, scenario, json.dumps(params or {}), seed)
    return json.loads(text)


def run(config, stage="all"):
    """Runs the pipeline for a run-config dict. Returns (exit_code, summary)."""
    code, summary = _hmlab.run(json.dumps(config), stage)
    return code, json.loads(summary)


def validate(config):
    return list(_hmlab.validate(json.dumps(config)))
