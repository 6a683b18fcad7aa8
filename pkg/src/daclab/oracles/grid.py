"""Static configuration bounds and the dynamic-policy oracle portfolio.

SBS is the single grid configuration with the lowest mean cost over the
training instances; VBS averages the per-instance best configuration.
``oracle_dac`` is the analogous portfolio over every dynamic policy a
solver actually evaluated: a pessimistic estimate of the optimal policy.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from typing import Sequence

from ..core import BatchFunctional, DacScenario, EvaluationRecord, Instance, static_execute
from ..seeding import derive_seed
from ..spaces import Configuration

__all__ = ["CostMatrix", "OracleReport", "static_grid_bounds", "oracle_dac", "static_cost"]


@dataclass
class CostMatrix:
    grid: list[Configuration]
    instance_ids: list[str]
    seeds: list[int]
    values: list[list[float]]  # [grid][instance], mean over seeds

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("config," + ",".join(self.instance_ids) + "\n")
            for config, row in zip(self.grid, self.values):
                label = json.dumps(list(config.values))
                fh.write(
                    '"' + label.replace('"', '""') + '",'
                    + ",".join(repr(v) for v in row) + "\n"
                )


@dataclass
class OracleReport:
    sbs_index: int
    sbs_values: list
    sbs_cost: float
    vbs_cost: float
    per_instance_argmin: list[int]
    oracle_dac_cost: float | None = None

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "OracleReport":
        return cls(**json.loads(text))


def static_cost(scenario: DacScenario, config: Configuration, instance: Instance, seed: int) -> float:
    """Cost of the static configuration on (instance, seed), through the
    fixed-configuration execution path."""
    cost_mode = scenario.cost
    if isinstance(cost_mode, BatchFunctional):
        trajs = [
            static_execute(scenario.algorithm, config, instance, scenario.cutoff,
                           seed=derive_seed(seed, [j]))
            for j in range(cost_mode.n)
        ]
        return cost_mode.fn(trajs, instance, seed)
    traj = static_execute(scenario.algorithm, config, instance, scenario.cutoff, seed=seed)
    if hasattr(cost_mode, "fn"):
        return cost_mode.fn(traj, instance)
    return traj.total_cost


def static_grid_bounds(
    scenario: DacScenario, grid: Sequence[Configuration], seeds: Sequence[int]
) -> tuple[CostMatrix, OracleReport]:
    """Exhaustive (grid x instances) evaluation with SBS/VBS bounds.

    Ties in the SBS argmin break toward the lowest grid index.
    """
    if len(grid) == 0:
        raise ValueError("grid must not be empty")
    space = scenario.algorithm.config_space()
    for config in grid:
        space.validate(config)
    instances = scenario.instance_set.instances
    values = [
        [
            sum(static_cost(scenario, config, inst, s) for s in seeds) / len(seeds)
            for inst in instances
        ]
        for config in grid
    ]
    matrix = CostMatrix(
        grid=list(grid),
        instance_ids=[i.id for i in instances],
        seeds=list(seeds),
        values=values,
    )
    row_means = [sum(row) / len(row) for row in values]
    sbs_index = min(range(len(grid)), key=lambda j: (row_means[j], j))
    per_instance_argmin = [
        min(range(len(grid)), key=lambda j: (values[j][col], j))
        for col in range(len(instances))
    ]
    vbs = sum(values[per_instance_argmin[col]][col] for col in range(len(instances))) / len(
        instances
    )
    report = OracleReport(
        sbs_index=sbs_index,
        sbs_values=list(grid[sbs_index].values),
        sbs_cost=row_means[sbs_index],
        vbs_cost=vbs,
        per_instance_argmin=per_instance_argmin,
    )
    return matrix, report


def oracle_dac(
    records: Sequence[EvaluationRecord], instance_ids: Sequence[str] | None = None
) -> float:
    """Mean over instances of the per-instance minimum mean cost across all
    evaluated policies."""
    if not records:
        raise ValueError("no records")
    if instance_ids is None:
        instance_ids = sorted({r.instance_id for r in records})
    sums: dict = {}
    counts: dict = {}
    for r in records:
        key = (r.policy_id, r.instance_id)
        sums[key] = sums.get(key, 0.0) + r.cost
        counts[key] = counts.get(key, 0) + 1
    best: dict = {}
    for (policy_id, instance_id), total in sums.items():
        mean = total / counts[(policy_id, instance_id)]
        if instance_id not in best or mean < best[instance_id]:
            best[instance_id] = mean
    missing = [i for i in instance_ids if i not in best]
    if missing:
        raise ValueError(f"no evaluation records for instances {missing}")
    return sum(best[i] for i in instance_ids) / len(instance_ids)
