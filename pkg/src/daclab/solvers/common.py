"""Shared solver plumbing: budgets, incumbent traces, checkpoint evaluation.

Solvers charge one unit of budget per target-algorithm episode they
consume.  Incumbent quality at checkpoints is measured on the full
training set with a fixed evaluation seed block that is not charged, so
anytime curves reflect policy quality rather than evaluation noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..core import BatchFunctional, DacScenario, EvaluationRecord, evaluate_policy, mean_cost
from ..policies import Policy

__all__ = ["SolverBudget", "IncumbentTrace", "SolverResult", "EvalContext", "IncumbentTracker"]


@dataclass(frozen=True)
class SolverBudget:
    max_evaluations: int
    checkpoint_every: int

    def __post_init__(self):
        if self.max_evaluations < 1 or self.checkpoint_every < 1:
            raise ValueError("budget and checkpoint interval must be positive")
        if self.checkpoint_every > self.max_evaluations:
            raise ValueError("checkpoint interval exceeds the budget")


@dataclass
class IncumbentTrace:
    solver_id: str
    master_seed: int
    points: list = field(default_factory=list)  # (evaluations_used, policy_id, mean_cost)


@dataclass
class SolverResult:
    policy: Policy
    policy_id: str
    trace: IncumbentTrace
    records: list
    checkpoints: list  # (evaluations_used, policy_id, Policy)
    flags: dict = field(default_factory=dict)


@dataclass(frozen=True)
class EvalContext:
    """Fixed (instances, seeds) block for incumbent evaluation."""

    instances: tuple
    seeds: tuple


def episodes_per_evaluation(scenario: DacScenario) -> int:
    return scenario.cost.n if isinstance(scenario.cost, BatchFunctional) else 1


class IncumbentTracker:
    """Best-so-far bookkeeping against the fixed evaluation block."""

    def __init__(self, scenario: DacScenario, eval_ctx: EvalContext, solver_id: str, master_seed: int):
        self.scenario = scenario
        self.eval_ctx = eval_ctx
        self.solver_id = solver_id
        self.trace = IncumbentTrace(solver_id=solver_id, master_seed=master_seed)
        self.records: list[EvaluationRecord] = []
        self.checkpoints: list = []
        self.best_policy: Policy | None = None
        self.best_policy_id: str | None = None
        self.best_cost: float = float("inf")

    def consider(self, policy: Policy, policy_id: str, evaluations_used: int) -> float:
        """Evaluate a candidate incumbent and record the checkpoint."""
        recs = evaluate_policy(
            self.scenario, policy, self.eval_ctx.instances, self.eval_ctx.seeds, policy_id
        )
        self.records.extend(recs)
        cost = mean_cost(recs)
        if cost < self.best_cost:
            self.best_cost = cost
            self.best_policy = policy
            self.best_policy_id = policy_id
        self.checkpoints.append((evaluations_used, policy_id, policy))
        self._mark(evaluations_used)
        return cost

    def _mark(self, evaluations_used: int) -> None:
        point = (evaluations_used, self.best_policy_id, self.best_cost)
        if self.trace.points and self.trace.points[-1][0] == evaluations_used:
            self.trace.points[-1] = point
        else:
            self.trace.points.append(point)

    def finalize(self, evaluations_used: int, flags: dict | None = None) -> SolverResult:
        if self.best_policy is None:
            raise RuntimeError("no incumbent was ever evaluated")
        self._mark(evaluations_used)
        return SolverResult(
            policy=self.best_policy,
            policy_id=self.best_policy_id,
            trace=self.trace,
            records=self.records,
            checkpoints=self.checkpoints,
            flags=flags or {},
        )
