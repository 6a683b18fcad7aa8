"""Shifted Luby sequence benchmark.

The Luby sequence is 1, 1, 2, 1, 1, 2, 4, 1, ... ; L(2^k - 1) = 2^(k-1),
otherwise L(t) = L(t - 2^(k-1) + 1) for the k with 2^(k-1) <= t < 2^k - 1.
At step t the action encodes a power of two via its exponent; guessing
L(shift + t + 1) costs 0, anything else costs 1, so the optimum is 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import (
    AlgorithmState,
    DacScenario,
    Instance,
    InstanceSet,
    Observation,
    TargetAlgorithm,
)
from ..policies import PolicySpaceSpec
from ..seeding import derive_seed
from ..spaces import Categorical, Configuration, ConfigurationSpace, ParameterSpec
from ..oracles.value_iteration import TabularInstanceMdp

WINDOW = 5  # last actions exposed in the observation


def luby(t: int) -> int:
    """t-th Luby value, 1-indexed."""
    if t < 1:
        raise ValueError("Luby sequence is 1-indexed")
    while True:
        k = t.bit_length()
        if t == (1 << k) - 1:
            return 1 << (k - 1)
        t = t - (1 << (k - 1)) + 1


@dataclass(frozen=True)
class LubyPayload:
    shift: int
    horizon: int
    max_exponent: int

    def __post_init__(self):
        if self.shift < 0 or self.horizon < 1:
            raise ValueError("need shift >= 0 and horizon >= 1")
        reachable = max(luby(self.shift + t + 1) for t in range(self.horizon))
        if (1 << self.max_exponent) < reachable:
            raise ValueError(
                f"max_exponent {self.max_exponent} cannot express Luby value {reachable}"
            )


class LubyEnv(TargetAlgorithm):
    def __init__(self, max_exponent: int):
        self.max_exponent = max_exponent
        self._space = ConfigurationSpace(
            (ParameterSpec("exponent", Categorical(tuple(range(max_exponent + 1)))),)
        )
        self._schema = ("t", *(f"a_prev_{j}" for j in range(WINDOW, 0, -1)), "shift")

    def config_space(self) -> ConfigurationSpace:
        return self._space

    def observation_schema(self) -> tuple[str, ...]:
        return self._schema

    def init(self, instance: Instance) -> AlgorithmState:
        if instance.payload.max_exponent != self.max_exponent:
            raise ValueError("instance max_exponent does not match the scenario space")
        return AlgorithmState(payload=(-1,) * WINDOW, step_index=0)

    def step(self, state, instance, config):
        t = state.step_index
        exponent = config.values[0]
        cost = 0.0 if (1 << exponent) == luby(instance.payload.shift + t + 1) else 1.0
        window = state.payload[1:] + (exponent,)
        return AlgorithmState(payload=window, step_index=t + 1), cost

    def is_final(self, state, instance) -> bool:
        return state.step_index >= instance.payload.horizon

    def observe(self, state, instance) -> Observation:
        values = (
            float(state.step_index),
            *(float(a) for a in state.payload),
            float(instance.payload.shift),
        )
        return Observation(values=values, schema=self._schema)

    # exact tabular model ---------------------------------------------------
    def oracle_key(self, obs: Observation):
        # the action window does not influence dynamics or cost
        return (obs.values[-1], obs.values[0])

    def exact_mdp(self, instance: Instance) -> TabularInstanceMdp:
        p = instance.payload
        T = p.horizon
        actions = self._space.enumerate()
        keys = [(float(p.shift), float(t)) for t in range(T + 1)]
        trans = []
        for t in range(T):
            target = luby(p.shift + t + 1)
            trans.append(
                [[(1.0, t + 1, 0.0 if (1 << a.values[0]) == target else 1.0)] for a in actions]
            )
        trans.append([[] for _ in actions])
        return TabularInstanceMdp(
            keys=keys,
            actions=actions,
            init=[(1.0, 0)],
            init_cost=0.0,
            final=[t == T for t in range(T + 1)],
            trans=trans,
        )


def luby_env(instance: Instance) -> LubyEnv:
    if not isinstance(instance.payload, LubyPayload):
        raise TypeError("not a luby instance")
    return LubyEnv(instance.payload.max_exponent)


def _needed_exponent(shift: int, horizon: int) -> int:
    return max(luby(shift + t + 1) for t in range(horizon)).bit_length() - 1


def generate_instances(
    seed: int,
    count: int,
    horizon: int = 8,
    max_shift: int = 8,
    shifts: list[int] | None = None,
) -> list[Instance]:
    rng = np.random.default_rng(derive_seed(seed, [0]))
    if shifts is None:
        shifts = [int(s) for s in rng.integers(0, max_shift + 1, size=count)]
    exponent = max(_needed_exponent(s, horizon) for s in shifts)
    return [
        Instance(
            id=f"luby-{j}",
            payload=LubyPayload(shift=s, horizon=horizon, max_exponent=exponent),
            seed=derive_seed(seed, [1, j]),
        )
        for j, s in enumerate(shifts)
    ]


def instance_to_dict(inst: Instance) -> dict:
    p = inst.payload
    return {
        "id": inst.id,
        "seed": inst.seed,
        "shift": p.shift,
        "horizon": p.horizon,
        "max_exponent": p.max_exponent,
    }


def instance_from_dict(d: dict) -> Instance:
    payload = LubyPayload(d["shift"], d["horizon"], d["max_exponent"])
    return Instance(id=d["id"], payload=payload, seed=d["seed"])


def make_scenario(
    seed: int,
    count: int = 3,
    horizon: int = 8,
    max_shift: int = 8,
    shifts: list[int] | None = None,
    instances: list[Instance] | None = None,
) -> DacScenario:
    if instances is None:
        instances = generate_instances(seed, count, horizon, max_shift, shifts)
    env = luby_env(instances[0])
    cutoff = max(i.payload.horizon for i in instances)
    spec = PolicySpaceSpec(
        kind="tabular",
        space=env.config_space(),
        bins=((0, cutoff, 0.0, float(cutoff)), (WINDOW + 1, max_shift + 1, 0.0, float(max_shift + 1))),
    )
    return DacScenario(
        algorithm=env,
        instance_set=InstanceSet(tuple(instances)),
        policy_space=spec,
        cutoff=cutoff,
    )


def default_grid(env: LubyEnv) -> list[Configuration]:
    return env.config_space().enumerate()
