"""Gradient descent on policy parameters via forward-mode differentiation.

For scenarios whose dynamics, step cost and observation are smooth in the
configuration (currently the polynomial gradient-descent benchmark), the
derivative of an episode's total cost with respect to each policy
parameter is computed by running the episode on dual numbers, one tangent
direction per coordinate.  The chain through policy -> step -> cost -> next
observation is realized implicitly by the dual arithmetic.
"""

from __future__ import annotations

import math

import numpy as np

from ..core import DacScenario, Instance
from ..dual import Dual, value_of
from ..policies import ParametricPolicy, UnsupportedDifferentiation, _decode
from ..spaces import Real
from .common import EvalContext, IncumbentTracker, SolverBudget, SolverResult

MAX_HALVINGS = 30


def _require_smooth(scenario: DacScenario, spec) -> None:
    alg = scenario.algorithm
    for attr in ("smooth_init", "smooth_step", "smooth_observe"):
        if not hasattr(alg, attr):
            raise UnsupportedDifferentiation(
                f"{type(alg).__name__} does not support smooth execution"
            )
    if spec.kind not in ("constant", "log-linear", "mlp"):
        raise UnsupportedDifferentiation(f"policy kind {spec.kind!r} is not differentiable")
    for p in spec.space.params:
        if not isinstance(p.domain, Real):
            raise UnsupportedDifferentiation(f"parameter {p.name!r} is not real-valued")


def episode_cost_and_tangent(
    scenario: DacScenario, spec, lam, tangent, instance: Instance
) -> tuple[float, float]:
    """Run one dual episode; returns (total cost, directional derivative)."""
    alg = scenario.algorithm
    policy = ParametricPolicy(spec, tuple(lam))
    lam_duals = [Dual(v, t) for v, t in zip(lam, tangent)]
    state = alg.smooth_init(instance)
    total = alg.init_cost(instance)
    for t in range(scenario.cutoff):
        obs_values = alg.smooth_observe(state, instance, t)
        raw = policy._forward(obs_values, lam_duals)
        theta = _decode(spec.space, raw, spec.squash)
        state, cost = alg.smooth_step(state, instance, theta)
        total = total + cost
    return value_of(total), total.b if isinstance(total, Dual) else 0.0


def batch_gradient(scenario: DacScenario, spec, lam, directions=None):
    """Mean cost over the training set and its gradient along ``directions``
    (all coordinates by default), one forward-mode pass per direction."""
    instances = scenario.instance_set.instances
    dims = list(range(len(lam))) if directions is None else list(directions)
    grad = np.zeros(len(lam))
    cost_sum = 0.0
    episodes = 0
    if not dims:
        for inst in instances:
            cost, _ = episode_cost_and_tangent(scenario, spec, lam, [0.0] * len(lam), inst)
            cost_sum += cost
            episodes += 1
    for j in dims:
        tangent = [0.0] * len(lam)
        tangent[j] = 1.0
        for inst in instances:
            cost, dcost = episode_cost_and_tangent(scenario, spec, lam, tangent, inst)
            grad[j] += dcost
            episodes += 1
            if j == dims[0]:
                cost_sum += cost
    grad /= len(instances)
    return cost_sum / len(instances), grad, episodes


def gradient_policy_search(
    scenario: DacScenario,
    budget: SolverBudget,
    seed: int,
    eval_ctx: EvalContext,
    lam0=None,
    step_size: float = 0.1,
    directions=None,
    solver_id: str = "gradient",
) -> SolverResult:
    spec = scenario.policy_space
    _require_smooth(scenario, spec)
    dim = spec.lam_length()
    lam = np.zeros(dim) if lam0 is None else np.asarray(lam0, dtype=float).copy()
    if lam.size != dim:
        raise ValueError(f"lam0 has length {lam.size}, spec needs {dim}")

    tracker = IncumbentTracker(scenario, eval_ctx, solver_id, seed)
    used = 0
    iteration = 0
    halvings = 0
    next_checkpoint = budget.checkpoint_every
    n_inst = len(scenario.instance_set.instances)
    iter_cost = max(1, (len(directions) if directions is not None else dim)) * n_inst

    tracker.consider(ParametricPolicy(spec, tuple(lam)), f"{solver_id}-it0", used)
    frozen = directions is not None and len(directions) == 0
    cost, grad, episodes = batch_gradient(scenario, spec, lam, directions)
    used += episodes
    stopped = False
    while not frozen and not stopped and used + iter_cost <= budget.max_evaluations:
        candidate = lam - step_size * grad
        c_cost, c_grad, episodes = batch_gradient(scenario, spec, candidate, directions)
        used += episodes
        if not math.isfinite(c_cost) or not np.all(np.isfinite(c_grad)):
            # a too-long step left the smooth region: reject and shorten
            halvings += 1
            if halvings > MAX_HALVINGS:
                stopped = True
            else:
                step_size /= 2.0
            continue
        lam, cost, grad = candidate, c_cost, c_grad
        iteration += 1
        if used >= next_checkpoint or used + iter_cost > budget.max_evaluations:
            tracker.consider(ParametricPolicy(spec, tuple(lam)), f"{solver_id}-it{iteration}", used)
            while next_checkpoint <= used:
                next_checkpoint += budget.checkpoint_every

    tracker.consider(ParametricPolicy(spec, tuple(lam)), f"{solver_id}-final", used)
    return tracker.finalize(used, {"step_size": step_size, "halvings": halvings})
