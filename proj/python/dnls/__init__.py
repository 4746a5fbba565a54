"""Lattice NLS solitons, splitting integrators and modified energies."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import __version__, preset_json, run_json, validate_json


def preset(name):
    """Run configuration of a named experiment (E1, E2, E3) as a dict."""
    return _json.loads(preset_json(name))


def run(config):
    """Run a configuration dict; returns (manifest dict, trajectory dict)."""
    out = run_json(_json.dumps(config))
    return _json.loads(out["manifest"]), out["record"]


def validate():
    """Approximation-constant report as a dict."""
    return _json.loads(validate_json())
