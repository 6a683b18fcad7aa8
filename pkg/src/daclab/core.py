"""Step-wise reconfigurable target algorithms and their execution loop.

A target algorithm exposes ``init`` / ``step`` / ``is_final`` plus an
``init_cost`` / ``step_cost`` decomposition of its total cost, and an
``observe`` projection that is the only state information a policy may
see.  ``execute`` runs one episode under a dynamic policy, recording every
(observation, configuration, step cost) triple; ``static_execute`` is the
independent fixed-configuration path used to cross-check that constant
policies embed classical static configuration.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .spaces import Configuration, ConfigurationSpace

__all__ = [
    "ConfigurationError",
    "ExecutionFault",
    "Instance",
    "InstanceSet",
    "AlgorithmState",
    "Observation",
    "TargetAlgorithm",
    "DecomposedSum",
    "TrajectoryFunctional",
    "BatchFunctional",
    "DacScenario",
    "Trajectory",
    "EvaluationRecord",
    "execute",
    "static_execute",
    "evaluate_policy",
]


class ConfigurationError(ValueError):
    """Policy/algorithm interface mismatch detected before any step runs."""


class ExecutionFault(RuntimeError):
    """A step produced an invalid result (e.g. non-finite step cost)."""


@dataclass(frozen=True)
class Instance:
    """One target problem instance: benchmark payload plus its RNG seed."""

    id: str
    payload: object
    seed: int
    features: Optional[tuple] = None


@dataclass(frozen=True)
class InstanceSet:
    instances: tuple[Instance, ...]
    sampling: str = "uniform"  # uniform | round-robin | explicit-weights
    weights: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if len(self.instances) == 0:
            raise ValueError("instance set must not be empty")
        ids = [i.id for i in self.instances]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate instance ids: {ids}")
        if self.sampling not in ("uniform", "round-robin", "explicit-weights"):
            raise ValueError(f"unknown sampling mode {self.sampling!r}")
        if self.sampling == "explicit-weights":
            if self.weights is None or len(self.weights) != len(self.instances):
                raise ValueError("explicit-weights sampling needs one weight per instance")
            if any(w < 0 for w in self.weights) or sum(self.weights) <= 0:
                raise ValueError("weights must be non-negative with positive sum")

    def __len__(self) -> int:
        return len(self.instances)

    def sample(self, rng: np.random.Generator, episode_index: int) -> Instance:
        if self.sampling == "round-robin":
            return self.instances[episode_index % len(self.instances)]
        if self.sampling == "explicit-weights":
            w = np.asarray(self.weights, dtype=float)
            return self.instances[rng.choice(len(self.instances), p=w / w.sum())]
        return self.instances[rng.integers(len(self.instances))]


@dataclass(frozen=True)
class AlgorithmState:
    """Opaque benchmark state plus the step counter; complete for resuming."""

    payload: object
    step_index: int = 0


@dataclass(frozen=True)
class Observation:
    """The policy-visible projection of an algorithm state."""

    values: tuple[float, ...]
    schema: tuple[str, ...]

    def __post_init__(self):
        if len(self.values) != len(self.schema):
            raise ValueError("observation length does not match its schema")


class TargetAlgorithm:
    """Behavioural interface each benchmark implements.

    ``step`` must be a pure function of (state, instance, configuration);
    stochastic benchmarks derive their per-step randomness from the
    instance seed and the step counter carried in the state payload.
    """

    def config_space(self) -> ConfigurationSpace:
        raise NotImplementedError

    def observation_schema(self) -> tuple[str, ...]:
        raise NotImplementedError

    def init(self, instance: Instance) -> AlgorithmState:
        raise NotImplementedError

    def init_cost(self, instance: Instance) -> float:
        return 0.0

    def step(
        self, state: AlgorithmState, instance: Instance, config: Configuration
    ) -> tuple[AlgorithmState, float]:
        raise NotImplementedError

    def is_final(self, state: AlgorithmState, instance: Instance) -> bool:
        raise NotImplementedError

    def observe(self, state: AlgorithmState, instance: Instance) -> Observation:
        raise NotImplementedError


# --- cost modes -----------------------------------------------------------


@dataclass(frozen=True)
class DecomposedSum:
    """Total cost is exactly init cost plus the sum of step costs."""

    mode = "decomposed-sum"


@dataclass(frozen=True)
class TrajectoryFunctional:
    """Cost is an arbitrary functional of one completed trajectory."""

    fn: Callable[["Trajectory", Instance], float]
    mode = "trajectory-functional"


@dataclass(frozen=True)
class BatchFunctional:
    """Cost is a functional of a batch of ``n`` trajectories per evaluation.

    The batch runs the same instance with per-run seeds derived from the
    evaluation seed; the functional also receives (instance, seed) so it
    can pull in reference material such as baseline runs.
    """

    fn: Callable[[list["Trajectory"], Instance, int], float]
    n: int
    mode = "trajectory-functional"


@dataclass(frozen=True)
class DacScenario:
    """A concrete configuration task: algorithm, instances, policy space,
    cutoff and cost metric."""

    algorithm: TargetAlgorithm
    instance_set: InstanceSet
    policy_space: object  # PolicySpaceSpec; kept loose to avoid an import cycle
    cutoff: int
    cost: DecomposedSum | TrajectoryFunctional | BatchFunctional = field(
        default_factory=DecomposedSum
    )

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")


@dataclass(frozen=True)
class Trajectory:
    instance_id: str
    seed: int
    steps: tuple  # of (Observation, Configuration, step_cost)
    init_cost: float
    total_cost: float
    terminated_by: str  # "is_final" | "cutoff"


@dataclass(frozen=True)
class EvaluationRecord:
    """One (policy, instance, seed) -> cost measurement."""

    policy_id: str
    instance_id: str
    seed: int
    cost: float
    run_id: str = ""
    solver_id: str = ""
    evaluations_used_at_emit: int = 0


# --- execution ------------------------------------------------------------


def _check_interface(algorithm: TargetAlgorithm, policy) -> None:
    schema = algorithm.observation_schema()
    ok, why = policy.accepts_schema(schema)
    if not ok:
        raise ConfigurationError(f"policy/observation schema mismatch: {why}")


def execute(
    algorithm: TargetAlgorithm,
    policy,
    instance: Instance,
    cutoff: int,
    seed: Optional[int] = None,
) -> Trajectory:
    """Run one episode: init, then query the policy at every
    reconfiguration point and step until final or cutoff.

    ``seed`` overrides the instance seed for this episode; identical
    arguments replay bit-identically.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    if seed is not None and seed != instance.seed:
        instance = dataclasses.replace(instance, seed=seed)
    _check_interface(algorithm, policy)
    space = algorithm.config_space()

    state = algorithm.init(instance)
    init_cost = algorithm.init_cost(instance)
    total = init_cost
    steps = []
    terminated_by = "cutoff"
    if algorithm.is_final(state, instance):
        terminated_by = "is_final"
    else:
        for _ in range(cutoff):
            obs = algorithm.observe(state, instance)
            config = policy.act(obs)
            space.validate(config)
            state, step_cost = algorithm.step(state, instance, config)
            if not math.isfinite(step_cost):
                raise ExecutionFault(
                    f"non-finite step cost {step_cost!r} at step {len(steps)} "
                    f"on instance {instance.id!r}"
                )
            steps.append((obs, config, step_cost))
            total += step_cost
            if algorithm.is_final(state, instance):
                terminated_by = "is_final"
                break
    return Trajectory(
        instance_id=instance.id,
        seed=instance.seed,
        steps=tuple(steps),
        init_cost=init_cost,
        total_cost=total,
        terminated_by=terminated_by,
    )


def static_execute(
    algorithm: TargetAlgorithm,
    config: Configuration,
    instance: Instance,
    cutoff: int,
    seed: Optional[int] = None,
) -> Trajectory:
    """Execute with one fixed configuration for every step.

    This is the classical static-evaluation path.  It deliberately shares
    no code with the policy loop in ``execute`` so that the two can serve
    as independent cross-checks of each other.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    if seed is not None and seed != instance.seed:
        instance = dataclasses.replace(instance, seed=seed)
    algorithm.config_space().validate(config)
    state = algorithm.init(instance)
    init_cost = algorithm.init_cost(instance)
    total = init_cost
    steps = []
    terminated_by = "cutoff"
    if algorithm.is_final(state, instance):
        terminated_by = "is_final"
    else:
        for _ in range(cutoff):
            obs = algorithm.observe(state, instance)
            state, step_cost = algorithm.step(state, instance, config)
            if not math.isfinite(step_cost):
                raise ExecutionFault(
                    f"non-finite step cost {step_cost!r} at step {len(steps)} "
                    f"on instance {instance.id!r}"
                )
            steps.append((obs, config, step_cost))
            total += step_cost
            if algorithm.is_final(state, instance):
                terminated_by = "is_final"
                break
    return Trajectory(
        instance_id=instance.id,
        seed=instance.seed,
        steps=tuple(steps),
        init_cost=init_cost,
        total_cost=total,
        terminated_by=terminated_by,
    )


def episode_cost(scenario: DacScenario, policy, instance: Instance, seed: int) -> float:
    """Cost of one evaluation of ``policy`` on (instance, seed) under the
    scenario's cost metric."""
    from .seeding import derive_seed

    cost_mode = scenario.cost
    if isinstance(cost_mode, BatchFunctional):
        trajs = [
            execute(scenario.algorithm, policy, instance, scenario.cutoff,
                    seed=derive_seed(seed, [j]))
            for j in range(cost_mode.n)
        ]
        return cost_mode.fn(trajs, instance, seed)
    traj = execute(scenario.algorithm, policy, instance, scenario.cutoff, seed=seed)
    if isinstance(cost_mode, TrajectoryFunctional):
        return cost_mode.fn(traj, instance)
    return traj.total_cost


def evaluate_policy(
    scenario: DacScenario,
    policy,
    instances: Sequence[Instance],
    seeds: Sequence[int],
    policy_id: str = "",
) -> list[EvaluationRecord]:
    """One record per (instance, seed) pair, under the scenario's cost mode."""
    if len(instances) == 0:
        raise ValueError("need at least one instance")
    if len(seeds) == 0:
        raise ValueError("need at least one seed")
    known = {i.id for i in scenario.instance_set.instances}
    for inst in instances:
        if inst.id not in known:
            raise ValueError(f"instance {inst.id!r} is not part of the scenario instance set")
    records = []
    for inst in instances:
        for seed in seeds:
            cost = episode_cost(scenario, policy, inst, seed)
            records.append(
                EvaluationRecord(
                    policy_id=policy_id, instance_id=inst.id, seed=seed, cost=cost
                )
            )
    return records


def mean_cost(records: Sequence[EvaluationRecord]) -> float:
    if not records:
        raise ValueError("no records")
    return sum(r.cost for r in records) / len(records)
