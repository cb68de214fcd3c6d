"""Python access to the sdde_logem core.

Every entry point takes the text of a JSON config document. Reports come
back as plain dicts; simulate returns numpy arrays.
"""

import json as _json
from pathlib import Path as _Path

from . import _logem
from ._logem import LogemError

__all__ = ["LogemError", "load", "simulate", "converge", "audit", "validate", "canonical_scenario"]


def load(path):
    return _Path(path).read_text()


def simulate(config, seed=None):
    return _logem.simulate(config, seed)


def converge(config, seed=None, threads=0):
    return _json.loads(_logem.converge(config, seed, threads))


def audit(config, seed=None, threads=0):
    return _json.loads(_logem.audit(config, seed, threads))


def validate(config):
    return _json.loads(_logem.validate(config))


def canonical_scenario(config):
    return _json.loads(_logem.canonical_scenario(config))
