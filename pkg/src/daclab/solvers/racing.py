"""Successive-halving racing over sampled candidates.

Rung r evaluates the surviving candidates on a fresh block of
n0 * eta^r (instance, seed) pairs and keeps the best 1/eta fraction by
cumulative mean cost; the last survivor is the result.  In static mode
the sampler draws plain configurations, making this the classical
algorithm-configuration baseline over constant policies.
"""

from __future__ import annotations

import numpy as np

from ..core import DacScenario, EvaluationRecord, ExecutionFault, episode_cost
from ..policies import Policy, constant_policy
from ..seeding import derive_seed
from ..spaces import Configuration
from .common import (
    EvalContext,
    IncumbentTracker,
    SolverBudget,
    SolverResult,
    episodes_per_evaluation,
)


def halving_schedule(n_candidates: int, eta: int, n0_pairs: int) -> list[tuple[int, int]]:
    """(candidates, pairs) per rung until a single survivor remains."""
    if n_candidates < 1 or eta < 2 or n0_pairs < 1:
        raise ValueError("need n_candidates >= 1, eta >= 2, n0_pairs >= 1")
    schedule = []
    candidates, pairs = n_candidates, n0_pairs
    while True:
        schedule.append((candidates, pairs))
        if candidates == 1:
            break
        candidates = max(1, candidates // eta)
        pairs *= eta
    return schedule


def racing_configurator(
    scenario: DacScenario,
    budget: SolverBudget,
    seed: int,
    eval_ctx: EvalContext,
    sampler,
    n_candidates: int = 27,
    eta: int = 3,
    n0_pairs: int = 1,
    static: bool = False,
    solver_id: str = "racing",
) -> SolverResult:
    """``sampler(rng)`` draws a Policy, or a Configuration in static mode."""
    schedule = halving_schedule(n_candidates, eta, n0_pairs)
    per_eval = episodes_per_evaluation(scenario)
    needed = sum(c * p for c, p in schedule) * per_eval
    if budget.max_evaluations < needed:
        raise ValueError(
            f"budget {budget.max_evaluations} is below the {needed} episodes "
            f"required by the schedule {schedule}"
        )

    rng = np.random.default_rng(derive_seed(seed, [0]))
    drawn = [sampler(rng) for _ in range(n_candidates)]
    if static:
        for config in drawn:
            if not isinstance(config, Configuration):
                raise TypeError("static mode needs a Configuration sampler")
        policies = [constant_policy(scenario.algorithm.config_space(), c) for c in drawn]
    else:
        for policy in drawn:
            if not isinstance(policy, Policy):
                raise TypeError("dynamic mode needs a Policy sampler")
        policies = list(drawn)

    tracker = IncumbentTracker(scenario, eval_ctx, solver_id, seed)
    instances = scenario.instance_set.instances
    alive = list(range(n_candidates))
    sums = {c: 0.0 for c in alive}
    counts = {c: 0 for c in alive}
    used = 0
    pair_cursor = 0

    for rung, (n_alive, pairs) in enumerate(schedule):
        alive = alive[:n_alive]
        block = [
            (instances[(pair_cursor + j) % len(instances)], derive_seed(seed, [1, pair_cursor + j]))
            for j in range(pairs)
        ]
        pair_cursor += pairs
        for c in alive:
            for inst, s in block:
                try:
                    cost = episode_cost(scenario, policies[c], inst, s)
                except (ExecutionFault, OverflowError):
                    cost = float("inf")
                tracker.records.append(
                    EvaluationRecord(
                        policy_id=f"{solver_id}-cand{c}", instance_id=inst.id, seed=s, cost=cost
                    )
                )
                sums[c] += cost
                counts[c] += 1
            used += pairs * per_eval
        alive.sort(key=lambda c: (sums[c] / counts[c], c))
        leader = alive[0]
        tracker.consider(policies[leader], f"{solver_id}-cand{leader}", used)

    survivor = alive[0]
    result = tracker.finalize(used)
    result.flags["survivor_index"] = survivor
    if static:
        result.flags["survivor_values"] = list(drawn[survivor].values)
    return result
