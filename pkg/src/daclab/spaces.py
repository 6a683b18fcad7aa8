"""Configuration spaces: per-parameter domains and points inside them.

A space is an ordered cross product of parameter domains (categorical,
real or integer).  Forbidden combinations are out of scope: every element
of the cross product is a valid configuration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

__all__ = [
    "Categorical",
    "Real",
    "Integer",
    "ParameterSpec",
    "ConfigurationSpace",
    "Configuration",
]


@dataclass(frozen=True)
class Categorical:
    choices: tuple

    def __post_init__(self):
        if len(self.choices) == 0:
            raise ValueError("categorical domain must not be empty")
        if len(set(self.choices)) != len(self.choices):
            raise ValueError("categorical choices must be duplicate-free")

    def contains(self, value) -> bool:
        return value in self.choices


@dataclass(frozen=True)
class Real:
    lower: float
    upper: float
    log: bool = False

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"real domain needs lower < upper, got [{self.lower}, {self.upper}]")
        if self.log and self.lower <= 0:
            raise ValueError("log-scaled real domain requires lower > 0")

    def contains(self, value) -> bool:
        return isinstance(value, (int, float)) and self.lower <= value <= self.upper


@dataclass(frozen=True)
class Integer:
    lower: int
    upper: int

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"integer domain needs lower < upper, got [{self.lower}, {self.upper}]")

    def contains(self, value) -> bool:
        return isinstance(value, int) and self.lower <= value <= self.upper


@dataclass(frozen=True)
class ParameterSpec:
    """One named parameter and its domain."""

    name: str
    domain: Categorical | Real | Integer


@dataclass(frozen=True)
class ConfigurationSpace:
    """Ordered list of parameters; the space is their cross product."""

    params: tuple[ParameterSpec, ...]

    def __post_init__(self):
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate parameter names: {names}")

    def __len__(self) -> int:
        return len(self.params)

    def validate(self, config: "Configuration") -> None:
        if len(config.values) != len(self.params):
            raise ValueError(
                f"configuration arity {len(config.values)} != space arity {len(self.params)}"
            )
        for spec, value in zip(self.params, config.values):
            if not spec.domain.contains(value):
                raise ValueError(f"value {value!r} outside domain of parameter {spec.name!r}")

    def is_finite(self) -> bool:
        return all(not isinstance(p.domain, Real) for p in self.params)

    def enumerate(self) -> list["Configuration"]:
        """All configurations of a finite space, in lexicographic domain order."""
        axes = []
        for p in self.params:
            if isinstance(p.domain, Categorical):
                axes.append(p.domain.choices)
            elif isinstance(p.domain, Integer):
                axes.append(range(p.domain.lower, p.domain.upper + 1))
            else:
                raise ValueError(f"cannot enumerate real parameter {p.name!r}")
        return [Configuration(values) for values in itertools.product(*axes)]

    def clamp_real(self, index: int, raw: float) -> float:
        dom = self.params[index].domain
        if not isinstance(dom, Real):
            raise TypeError(f"parameter {self.params[index].name!r} is not real")
        if math.isnan(raw):
            raise ValueError(f"NaN output for real parameter {self.params[index].name!r}")
        return min(max(raw, dom.lower), dom.upper)


@dataclass(frozen=True)
class Configuration:
    """A point of a configuration space; one value per parameter, in order."""

    values: tuple

    def __init__(self, values):
        object.__setattr__(self, "values", tuple(values))
