"""(1+1) randomized local search on LeadingOnes with a controlled flip count.

The action picks how many distinct, uniformly chosen bits to flip; the
offspring replaces the parent iff its LeadingOnes value is at least as
high.  Every step costs 1, so the total cost is the runtime until the
all-ones string.  The fitness level is a sufficient statistic for optimal
control, which the exact chain model below exploits.
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
from ..spaces import Categorical, Configuration, ConfigurationSpace, Integer, ParameterSpec
from ..oracles.value_iteration import TabularInstanceMdp


@dataclass(frozen=True)
class LeadingOnesPayload:
    n: int
    ks: tuple[int, ...] | None = None  # optional flip-count portfolio

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.ks is not None and any(k < 1 or k > self.n for k in self.ks):
            raise ValueError("portfolio flip counts must lie in [1, n]")


def leading_ones(bits: int, n: int) -> int:
    """Number of leading one bits (bit 0 first) of an n-bit mask."""
    lowest_zero = (~bits) & (bits + 1)
    lo = lowest_zero.bit_length() - 1
    return min(lo, n)


def _space_for(n: int, ks) -> ConfigurationSpace:
    if ks is not None:
        return ConfigurationSpace((ParameterSpec("flips", Categorical(tuple(ks))),))
    if n == 1:
        return ConfigurationSpace((ParameterSpec("flips", Categorical((1,))),))
    return ConfigurationSpace((ParameterSpec("flips", Integer(1, n)),))


class LeadingOnesEnv(TargetAlgorithm):
    def __init__(self, n: int, ks: tuple[int, ...] | None = None):
        self.n = n
        self.ks = tuple(ks) if ks is not None else None
        self._space = _space_for(n, self.ks)
        self._schema = ("lo", "n", "t")

    def config_space(self) -> ConfigurationSpace:
        return self._space

    def observation_schema(self) -> tuple[str, ...]:
        return self._schema

    def init(self, instance: Instance) -> AlgorithmState:
        if instance.payload.n != self.n:
            raise ValueError("instance size does not match the scenario space")
        rng = np.random.default_rng(derive_seed(instance.seed, [0]))
        bits = int(rng.integers(0, 1 << self.n))
        return AlgorithmState(payload=bits, step_index=0)

    def step(self, state, instance, config):
        n = self.n
        t = state.step_index
        k = int(config.values[0])
        rng = np.random.default_rng(derive_seed(instance.seed, [t + 1]))
        mask = 0
        for pos in rng.choice(n, size=k, replace=False):
            mask |= 1 << int(pos)
        parent = state.payload
        offspring = parent ^ mask
        if leading_ones(offspring, n) >= leading_ones(parent, n):
            parent = offspring
        return AlgorithmState(payload=parent, step_index=t + 1), 1.0

    def is_final(self, state, instance) -> bool:
        return leading_ones(state.payload, self.n) == self.n

    def observe(self, state, instance) -> Observation:
        lo = leading_ones(state.payload, self.n)
        return Observation(
            values=(float(lo), float(self.n), float(state.step_index)), schema=self._schema
        )

    # exact fitness-level chain --------------------------------------------
    def oracle_key(self, obs: Observation):
        return (obs.values[1], obs.values[0])  # (n, lo)

    def exact_mdp(self, instance: Instance) -> TabularInstanceMdp:
        n = self.n
        actions = self._space.enumerate()
        keys = [(float(n), float(lo)) for lo in range(n + 1)]
        trans = []
        for lo in range(n):
            per_action = []
            for a in actions:
                k = int(a.values[0])
                p_imp = improvement_probability(n, lo, k)
                outcomes = [(1.0 - p_imp, lo, 1.0)]
                if p_imp > 0.0:
                    for g, q in enumerate(jump_distribution(n, lo)):
                        outcomes.append((p_imp * q, lo + 1 + g, 1.0))
                per_action.append([(p, s, c) for p, s, c in outcomes if p > 0.0])
            trans.append(per_action)
        trans.append([[] for _ in actions])
        init = [(2.0 ** -(lo + 1), lo) for lo in range(n)] + [(2.0 ** -n, n)]
        return TabularInstanceMdp(
            keys=keys,
            actions=actions,
            init=init,
            init_cost=0.0,
            final=[lo == n for lo in range(n + 1)],
            trans=trans,
        )


def improvement_probability(n: int, lo: int, k: int) -> float:
    """P(the k-flip offspring improves) at fitness level lo.

    Requires the first zero bit flipped and the lo leading ones untouched:
    C(n-1-lo, k-1) / C(n, k).
    """
    if k > n - lo:
        return 0.0
    return math.comb(n - 1 - lo, k - 1) / math.comb(n, k)


def jump_distribution(n: int, lo: int) -> list[float]:
    """P(gain g extra levels beyond lo+1 | improvement), g = 0..n-lo-1.

    The suffix beyond the flipped zero stays uniform, so the extra gain is
    the leading-ones count of n-lo-1 fresh uniform bits.
    """
    m = n - lo - 1
    qs = [2.0 ** -(g + 1) for g in range(m)]
    qs.append(2.0 ** -m)
    return qs


def leading_ones_env(instance: Instance) -> LeadingOnesEnv:
    if not isinstance(instance.payload, LeadingOnesPayload):
        raise TypeError("not a leading-ones instance")
    return LeadingOnesEnv(instance.payload.n, instance.payload.ks)


def generate_instances(seed: int, count: int, n: int = 8, ks=None) -> list[Instance]:
    ks = tuple(ks) if ks is not None else None
    return [
        Instance(
            id=f"leadingones-{j}",
            payload=LeadingOnesPayload(n=n, ks=ks),
            seed=derive_seed(seed, [1, j]),
        )
        for j in range(count)
    ]


def instance_to_dict(inst: Instance) -> dict:
    p = inst.payload
    return {
        "id": inst.id,
        "seed": inst.seed,
        "n": p.n,
        "ks": list(p.ks) if p.ks is not None else None,
    }


def instance_from_dict(d: dict) -> Instance:
    ks = tuple(d["ks"]) if d.get("ks") else None
    return Instance(id=d["id"], payload=LeadingOnesPayload(d["n"], ks), seed=d["seed"])


def make_scenario(
    seed: int,
    count: int = 1,
    n: int = 8,
    ks=None,
    cutoff: int | None = None,
    instances: list[Instance] | None = None,
) -> DacScenario:
    if instances is None:
        instances = generate_instances(seed, count, n, ks)
    env = leading_ones_env(instances[0])
    spec = PolicySpaceSpec(
        kind="tabular",
        space=env.config_space(),
        bins=((0, n + 1, 0.0, float(n + 1)),),
    )
    return DacScenario(
        algorithm=env,
        instance_set=InstanceSet(tuple(instances)),
        policy_space=spec,
        cutoff=cutoff if cutoff is not None else max(200, 10 * n * n),
    )


def default_grid(env: LeadingOnesEnv) -> list[Configuration]:
    return env.config_space().enumerate()
