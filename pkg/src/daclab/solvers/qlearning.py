"""Tabular Q-learning over discretized observations.

The environment side follows the classic reduction: state is the
discretized observation cell, actions enumerate the finite configuration
space, the reward is the negated step cost and episodes end at the
scenario cutoff or when the algorithm reports final.  Greedy policies are
extracted at checkpoints as tabular lookup policies over the same cells.
"""

from __future__ import annotations

import numpy as np

from ..core import DacScenario
from ..policies import ParametricPolicy, PolicySpaceSpec, encode_configuration, tabular_cell
from ..seeding import derive_seed
from .common import EvalContext, IncumbentTracker, SolverBudget, SolverResult

MAX_CELLS = 1_000_000


def _greedy_policy(spec: PolicySpaceSpec, q: np.ndarray, actions) -> ParametricPolicy:
    lam = []
    for cell in range(q.shape[0]):
        action = actions[int(np.argmax(q[cell]))]
        lam.extend(encode_configuration(spec.space, action))
    return ParametricPolicy(spec, tuple(lam))


def tabular_q_learning(
    scenario: DacScenario,
    budget: SolverBudget,
    seed: int,
    eval_ctx: EvalContext,
    bins=None,
    alpha: float = 0.1,
    gamma: float = 1.0,
    epsilon_start: float = 1.0,
    epsilon_end: float = 0.05,
    solver_id: str = "q_learning",
) -> SolverResult:
    """Learn a tabular policy; epsilon anneals linearly over the first half
    of the episode budget, then stays at ``epsilon_end``."""
    spec = scenario.policy_space
    if bins is None:
        if getattr(spec, "kind", None) != "tabular":
            raise ValueError("scenario has no tabular policy space; pass bins explicitly")
        bins = spec.bins
    else:
        bins = tuple(tuple(b) for b in bins)
        spec = PolicySpaceSpec(kind="tabular", space=scenario.algorithm.config_space(), bins=bins)
    n_cells = spec.n_cells()
    if n_cells > MAX_CELLS:
        raise ValueError(f"{n_cells} cells exceed the tabular limit of {MAX_CELLS}")
    actions = scenario.algorithm.config_space().enumerate()

    q = np.zeros((n_cells, len(actions)))
    rng = np.random.default_rng(derive_seed(seed, [0]))
    tracker = IncumbentTracker(scenario, eval_ctx, solver_id, seed)
    alg = scenario.algorithm
    half = max(1, budget.max_evaluations // 2)

    for episode in range(budget.max_evaluations):
        eps = max(
            epsilon_end,
            epsilon_start + (epsilon_end - epsilon_start) * min(1.0, episode / half),
        )
        instance = scenario.instance_set.sample(rng, episode)
        state = alg.init(instance)
        cell = tabular_cell(bins, alg.observe(state, instance).values)
        for _ in range(scenario.cutoff):
            if alg.is_final(state, instance):
                break
            if rng.random() < eps:
                a = int(rng.integers(len(actions)))
            else:
                a = int(np.argmax(q[cell]))
            state, step_cost = alg.step(state, instance, actions[a])
            reward = -step_cost
            done = alg.is_final(state, instance)
            if done:
                target = reward
                next_cell = cell
            else:
                next_cell = tabular_cell(bins, alg.observe(state, instance).values)
                target = reward + gamma * float(np.max(q[next_cell]))
            q[cell, a] += alpha * (target - q[cell, a])
            cell = next_cell
        used = episode + 1
        if used % budget.checkpoint_every == 0 or used == budget.max_evaluations:
            policy = _greedy_policy(spec, q, actions)
            tracker.consider(policy, f"{solver_id}-ep{used}", used)

    return tracker.finalize(budget.max_evaluations)
