"""Benchmark registry: five step-wise reconfigurable target algorithms.

Each module provides an env class, an instance payload dataclass, a seeded
instance generator, JSON (de)serialization for instance files, and - where
the state space is small enough - an exact tabular model for the
value-iteration oracle.
"""

from __future__ import annotations

import json

from ..core import DacScenario, Instance, InstanceSet
from . import cma, leading_ones, luby, sigmoid, toygd

_MODULES = {
    "sigmoid": sigmoid,
    "luby": luby,
    "leading_ones": leading_ones,
    "toygd": toygd,
    "cma": cma,
}

DESCRIPTIONS = {
    "sigmoid": "trace per-dimension sigmoid curves with discrete actions",
    "luby": "guess the next term of a shifted Luby sequence",
    "leading_ones": "control the flip count of (1+1) local search on LeadingOnes",
    "toygd": "control the learning rate of gradient descent on polynomials",
    "cma": "control the step size of CMA-ES on continuous test functions",
}


def names() -> list[str]:
    return sorted(_MODULES)


def module(name: str):
    if name not in _MODULES:
        raise KeyError(f"unknown benchmark {name!r}; known: {names()}")
    return _MODULES[name]


def make_scenario(name: str, seed: int, **params) -> DacScenario:
    return module(name).make_scenario(seed=seed, **params)


def write_instance_file(path, instances: list[Instance], benchmark: str) -> None:
    mod = module(benchmark)
    doc = {
        "benchmark": benchmark,
        "instances": [mod.instance_to_dict(inst) for inst in instances],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)


def read_instance_file(path) -> tuple[str, list[Instance]]:
    with open(path) as fh:
        doc = json.load(fh)
    mod = module(doc["benchmark"])
    return doc["benchmark"], [mod.instance_from_dict(d) for d in doc["instances"]]
