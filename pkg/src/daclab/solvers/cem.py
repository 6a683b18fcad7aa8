"""Cross-entropy method over flat policy parameter vectors.

Each generation samples candidates from a diagonal Gaussian, scores them
on a shared round-robin subsample of (instance, seed) pairs, and refits
mean and per-coordinate spread to the elite fraction.  Candidates that
fault during execution score +inf and are never selected.
"""

from __future__ import annotations

import numpy as np

from ..core import DacScenario, EvaluationRecord, ExecutionFault, episode_cost
from ..policies import ParametricPolicy
from ..seeding import derive_seed
from .common import (
    EvalContext,
    IncumbentTracker,
    SolverBudget,
    SolverResult,
    episodes_per_evaluation,
)

SIGMA_FLOOR = 1e-12


def cem_minimize(
    fn,
    x0,
    sigma_init: float,
    population: int,
    elite_frac: float,
    generations: int,
    rng: np.random.Generator,
):
    """Generic CEM loop on a vector objective; returns the final mean, the
    best sample seen, and whether the spread collapsed below the floor."""
    mean = np.asarray(x0, dtype=float).copy()
    sigma = np.full(mean.shape, float(sigma_init))
    n_elite = max(1, int(round(elite_frac * population)))
    best_x, best_f = mean.copy(), float("inf")
    collapsed = False
    for _ in range(generations):
        samples = mean + sigma * rng.standard_normal((population, mean.size))
        scores = np.array([fn(s) for s in samples])
        order = np.argsort(scores, kind="stable")[:n_elite]
        elites = samples[order]
        if scores[order[0]] < best_f:
            best_f = float(scores[order[0]])
            best_x = elites[0].copy()
        mean = elites.mean(axis=0)
        sigma = elites.std(axis=0)
        if float(sigma.max()) < SIGMA_FLOOR:
            collapsed = True
            break
    return mean, best_x, best_f, collapsed


def cem_policy_search(
    scenario: DacScenario,
    budget: SolverBudget,
    seed: int,
    eval_ctx: EvalContext,
    population: int = 16,
    elite_frac: float = 0.25,
    sigma_init: float = 1.0,
    subsample: int = 1,
    lam0=None,
    solver_id: str = "cem",
) -> SolverResult:
    spec = scenario.policy_space
    dim = spec.lam_length()
    mean = np.zeros(dim) if lam0 is None else np.asarray(lam0, dtype=float).copy()
    if mean.size != dim:
        raise ValueError(f"lam0 has length {mean.size}, spec needs {dim}")
    sigma = np.full(dim, float(sigma_init))
    n_elite = max(1, int(round(elite_frac * population)))
    per_eval = episodes_per_evaluation(scenario)
    gen_cost = population * subsample * per_eval
    if budget.max_evaluations < gen_cost:
        raise ValueError(
            f"budget {budget.max_evaluations} cannot fund one generation "
            f"({gen_cost} episodes)"
        )

    rng = np.random.default_rng(derive_seed(seed, [0]))
    tracker = IncumbentTracker(scenario, eval_ctx, solver_id, seed)
    instances = scenario.instance_set.instances
    used = 0
    pair_cursor = 0
    next_checkpoint = budget.checkpoint_every
    generation = 0
    flags = {}

    while used + gen_cost <= budget.max_evaluations:
        pairs = [
            (instances[(pair_cursor + j) % len(instances)], derive_seed(seed, [1, pair_cursor + j]))
            for j in range(subsample)
        ]
        pair_cursor += subsample

        samples = mean + sigma * rng.standard_normal((population, dim))
        scores = np.empty(population)
        for c in range(population):
            policy = ParametricPolicy(spec, tuple(samples[c]))
            total = 0.0
            policy_id = f"{solver_id}-g{generation}-c{c}"
            try:
                for inst, s in pairs:
                    cost = episode_cost(scenario, policy, inst, s)
                    tracker.records.append(
                        EvaluationRecord(
                            policy_id=policy_id, instance_id=inst.id, seed=s, cost=cost
                        )
                    )
                    total += cost
                scores[c] = total / len(pairs)
            except (ExecutionFault, OverflowError):
                scores[c] = float("inf")
        used += gen_cost

        order = np.argsort(scores, kind="stable")[:n_elite]
        elites = samples[order]
        mean = elites.mean(axis=0)
        sigma = elites.std(axis=0)

        if used >= next_checkpoint or used + gen_cost > budget.max_evaluations:
            best = ParametricPolicy(spec, tuple(samples[order[0]]))
            tracker.consider(best, f"{solver_id}-g{generation}", used)
            while next_checkpoint <= used:
                next_checkpoint += budget.checkpoint_every
        generation += 1
        if float(sigma.max()) < SIGMA_FLOOR:
            flags["sigma_collapse"] = True
            break

    return tracker.finalize(used, flags)
