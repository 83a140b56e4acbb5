"""Python access to the pmlab core.

Experiments take the same keys as the CLI config tables and return the JSON summary as a dict.
"""

import json

import yaml

from ._core import (
    ConfigurationError,
    DimensionError,
    DomainError,
    PreconditionError,
    cone_apex,
    hit_cone,
    hitting_sequence,
    hjb_oracle_1d,
    isaacs_gap,
    markov_restart_check,
    set_workers,
    workers,
)
from ._core import run_experiment as _run

EXPERIMENTS = (
    "cone_example",
    "markov_restart",
    "regularity",
    "tails",
    "oracle_equivalence",
    "nonlinear_1d",
    "cascade",
    "comparison",
    "shjb",
    "isaacs",
)


def run(name, seed, **params):
    """Run a named pipeline; returns its JSON summary (with a boolean "pass") as a dict."""
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; expected one of {EXPERIMENTS}")
    text = yaml.safe_dump(params, default_flow_style=True) if params else ""
    return json.loads(_run(name, text, int(seed)))


def run_json(name, seed, **params):
    """Same as run() but returns the raw JSON text, byte-identical across reruns."""
    text = yaml.safe_dump(params, default_flow_style=True) if params else ""
    return _run(name, text, int(seed))


__all__ = [
    "ConfigurationError",
    "DimensionError",
    "DomainError",
    "PreconditionError",
    "EXPERIMENTS",
    "cone_apex",
    "hit_cone",
    "hitting_sequence",
    "hjb_oracle_1d",
    "isaacs_gap",
    "markov_restart_check",
    "run",
    "run_json",
    "set_workers",
    "workers",
]
