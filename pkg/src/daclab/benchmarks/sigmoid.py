"""Sigmoid tracing benchmark.

Each of k dimensions carries a logistic curve sigma(t) = 1/(1+exp(-s*(t-p)))
over the episode clock t.  The action in dimension d picks one of A_d
levels a/(A_d-1); the step cost is one minus the product of per-dimension
proximities, so tracing every curve exactly costs zero.  Instances vary
the shifts and slopes; the action grid and horizon are scenario-level.
"""

from __future__ import annotations

import math
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


@dataclass(frozen=True)
class SigmoidPayload:
    shifts: tuple[float, ...]
    slopes: tuple[float, ...]
    action_counts: tuple[int, ...]
    horizon: int

    def __post_init__(self):
        k = len(self.shifts)
        if k < 1 or len(self.slopes) != k or len(self.action_counts) != k:
            raise ValueError("shifts/slopes/action_counts must have equal length >= 1")
        if any(a < 2 for a in self.action_counts):
            raise ValueError("need at least 2 actions per dimension")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


def curve(t: float, slope: float, shift: float) -> float:
    z = -slope * (t - shift)
    if z > 700.0:
        return 0.0
    if z < -700.0:
        return 1.0
    return 1.0 / (1.0 + math.exp(z))


def step_cost(payload: SigmoidPayload, t: int, actions) -> float:
    prod = 1.0
    for d, a in enumerate(actions):
        target = curve(t, payload.slopes[d], payload.shifts[d])
        level = a / (payload.action_counts[d] - 1)
        prod *= 1.0 - abs(target - level)
    return 1.0 - prod


class SigmoidEnv(TargetAlgorithm):
    def __init__(self, action_counts: tuple[int, ...]):
        self.action_counts = tuple(action_counts)
        self._space = ConfigurationSpace(
            tuple(
                ParameterSpec(f"level_{d}", Categorical(tuple(range(a))))
                for d, a in enumerate(self.action_counts)
            )
        )
        k = len(self.action_counts)
        self._schema = (
            "remaining",
            *(f"shift_{d}" for d in range(k)),
            *(f"slope_{d}" for d in range(k)),
        )

    def config_space(self) -> ConfigurationSpace:
        return self._space

    def observation_schema(self) -> tuple[str, ...]:
        return self._schema

    def _check(self, instance: Instance) -> SigmoidPayload:
        payload = instance.payload
        if payload.action_counts != self.action_counts:
            raise ValueError("instance action counts do not match the scenario space")
        return payload

    def init(self, instance: Instance) -> AlgorithmState:
        self._check(instance)
        return AlgorithmState(payload=None, step_index=0)

    def step(self, state, instance, config):
        cost = step_cost(instance.payload, state.step_index, config.values)
        return AlgorithmState(payload=None, step_index=state.step_index + 1), cost

    def is_final(self, state, instance) -> bool:
        return state.step_index >= instance.payload.horizon

    def observe(self, state, instance) -> Observation:
        p = instance.payload
        values = (float(p.horizon - state.step_index), *p.shifts, *p.slopes)
        return Observation(values=values, schema=self._schema)

    # exact tabular model ---------------------------------------------------
    def oracle_key(self, obs: Observation):
        return tuple(obs.values)

    def exact_mdp(self, instance: Instance) -> TabularInstanceMdp:
        p = self._check(instance)
        T = p.horizon
        actions = self._space.enumerate()
        keys = [
            (float(T - t), *p.shifts, *p.slopes) for t in range(T + 1)
        ]
        trans = [
            [[(1.0, t + 1, step_cost(p, t, a.values))] for a in actions]
            for t in range(T)
        ]
        trans.append([[] for _ in actions])  # final state; unused
        return TabularInstanceMdp(
            keys=keys,
            actions=actions,
            init=[(1.0, 0)],
            init_cost=0.0,
            final=[t == T for t in range(T + 1)],
            trans=trans,
        )


def sigmoid_env(instance: Instance) -> SigmoidEnv:
    """Environment for (the family of) a validated sigmoid instance."""
    if not isinstance(instance.payload, SigmoidPayload):
        raise TypeError("not a sigmoid instance")
    return SigmoidEnv(instance.payload.action_counts)


def generate_instances(
    seed: int,
    count: int,
    dims: int = 1,
    action_counts: tuple[int, ...] | None = None,
    horizon: int = 10,
) -> list[Instance]:
    action_counts = tuple(action_counts) if action_counts else (2,) * dims
    rng = np.random.default_rng(derive_seed(seed, [0]))
    out = []
    for j in range(count):
        shifts = tuple(float(x) for x in rng.uniform(0.0, horizon, size=dims))
        sign = rng.choice([-1.0, 1.0], size=dims)
        slopes = tuple(float(s * m) for s, m in zip(sign, rng.uniform(0.25, 2.5, size=dims)))
        payload = SigmoidPayload(shifts, slopes, action_counts, horizon)
        out.append(Instance(id=f"sigmoid-{j}", payload=payload, seed=derive_seed(seed, [1, j])))
    return out


def instance_to_dict(inst: Instance) -> dict:
    p = inst.payload
    return {
        "id": inst.id,
        "seed": inst.seed,
        "shifts": list(p.shifts),
        "slopes": list(p.slopes),
        "action_counts": list(p.action_counts),
        "horizon": p.horizon,
    }


def instance_from_dict(d: dict) -> Instance:
    payload = SigmoidPayload(
        tuple(d["shifts"]), tuple(d["slopes"]), tuple(d["action_counts"]), d["horizon"]
    )
    return Instance(id=d["id"], payload=payload, seed=d["seed"])


def make_scenario(
    seed: int,
    count: int = 5,
    dims: int = 1,
    action_counts: tuple[int, ...] | None = None,
    horizon: int = 10,
    instances: list[Instance] | None = None,
) -> DacScenario:
    if instances is None:
        instances = generate_instances(seed, count, dims, action_counts, horizon)
    env = sigmoid_env(instances[0])
    cutoff = max(i.payload.horizon for i in instances)
    spec = PolicySpaceSpec(
        kind="log-linear", space=env.config_space(), n_features=len(env.observation_schema())
    )
    return DacScenario(
        algorithm=env,
        instance_set=InstanceSet(tuple(instances)),
        policy_space=spec,
        cutoff=cutoff,
    )


def default_grid(env: SigmoidEnv) -> list[Configuration]:
    return env.config_space().enumerate()
