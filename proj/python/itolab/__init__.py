"""Energy-equality checks for jump semimartingales and a p-Laplacian SPDE demo."""

import json

from ._core import ItolabError, Scenario, SpaceFamily
from . import _core

__all__ = [
    "ItolabError",
    "Scenario",
    "SpaceFamily",
    "energy_ledger",
    "energy_ledgers",
    "event_ledgers",
    "telescoping_defect",
    "correction_study",
    "homogeneity_deviation",
    "euler_run",
    "run_ledgers",
    "integrability_report",
]


def energy_ledger(scenario, t):
    return json.loads(_core.energy_ledger(scenario, t))


def energy_ledgers(scenario, times):
    return json.loads(_core.energy_ledgers(scenario, list(times)))


def event_ledgers(scenario):
    return json.loads(_core.event_ledgers(scenario))


def telescoping_defect(scenario, level):
    return _core.telescoping_defect(scenario, level)


def correction_study(scenario, t, max_level):
    return json.loads(_core.correction_study(scenario, t, max_level))


def homogeneity_deviation(scenario, n, t):
    return _core.homogeneity_deviation(scenario, n, t)


def euler_run(config=None):
    """Run the explicit scheme; `config` holds SpdeConfig fields, defaults elsewhere."""
    return json.loads(_core.euler_run(json.dumps(config or {})))


def run_ledgers(config=None):
    return json.loads(_core.run_ledgers(json.dumps(config or {})))


def integrability_report(config=None, first_mode=1, last_mode=40):
    return json.loads(_core.integrability_report(json.dumps(config or {}), first_mode, last_mode))
