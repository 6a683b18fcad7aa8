"""Exact dynamic-policy oracle for enumerable scenarios.

Benchmarks with small state spaces expose a tabular model per instance
(states, finite action list, exact transition outcomes).  Value iteration
over these models - one contextual block per instance, rewards equal to
negated step costs, finals absorbing - yields the optimal expected cost
and a greedy lookup policy keyed on observation abstractions.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..core import DacScenario
from ..policies import LookupPolicy
from ..spaces import Configuration

__all__ = ["TabularInstanceMdp", "value_iteration", "value_iteration_optimal", "ValueIterationResult"]


@dataclass
class TabularInstanceMdp:
    """Exact per-instance model: ``trans[s][a]`` lists (prob, next, cost)."""

    keys: list
    actions: list[Configuration]
    init: list[tuple[float, int]]
    init_cost: float
    final: list[bool]
    trans: list[list[list[tuple[float, int, float]]]]

    def n_states(self) -> int:
        return len(self.keys)


def value_iteration(mdp: TabularInstanceMdp, tol: float = 1e-10, max_sweeps: int = 1_000_000):
    """Sweep V(s) = min_a sum_p p * (cost + V(s')) to a fixpoint.

    Finals are absorbing with value zero.  Actions with no chance of
    progress (pure self-loops with positive cost) are dominated away by
    the minimum, so the sweeps converge whenever some action makes
    progress from every reachable state.
    """
    n = mdp.n_states()
    v = [0.0] * n
    for _ in range(max_sweeps):
        delta = 0.0
        for s in range(n):
            if mdp.final[s]:
                continue
            best = None
            for a in range(len(mdp.actions)):
                q = 0.0
                for prob, nxt, cost in mdp.trans[s][a]:
                    q += prob * (cost + v[nxt])
                if best is None or q < best:
                    best = q
            delta = max(delta, abs(best - v[s]))
            v[s] = best
        if delta < tol:
            break
    else:
        raise RuntimeError("value iteration did not converge")
    greedy = []
    for s in range(n):
        if mdp.final[s]:
            greedy.append(None)
            continue
        best_a, best_q = 0, None
        for a in range(len(mdp.actions)):
            q = 0.0
            for prob, nxt, cost in mdp.trans[s][a]:
                q += prob * (cost + v[nxt])
            if best_q is None or q < best_q:
                best_a, best_q = a, q
        greedy.append(best_a)
    return v, greedy


@dataclass
class ValueIterationResult:
    policy: LookupPolicy
    mean_cost: float
    per_instance: dict


def value_iteration_optimal(
    scenario: DacScenario, tol: float = 1e-10, max_states: int = 1_000_000
) -> ValueIterationResult:
    """Optimal dynamic policy and its exact expected cost per instance."""
    alg = scenario.algorithm
    if not hasattr(alg, "exact_mdp"):
        raise TypeError(f"{type(alg).__name__} does not expose an exact tabular model")
    models = [(inst, alg.exact_mdp(inst)) for inst in scenario.instance_set.instances]
    total_states = sum(m.n_states() for _, m in models)
    if total_states > max_states:
        raise ValueError(f"state space too large: {total_states} > {max_states}")

    table: dict = {}
    per_instance = {}
    for inst, mdp in models:
        v, greedy = value_iteration(mdp, tol=tol)
        cost = mdp.init_cost + sum(p * v[s] for p, s in mdp.init)
        per_instance[inst.id] = cost
        for s, key in enumerate(mdp.keys):
            if mdp.final[s]:
                continue
            action = mdp.actions[greedy[s]]
            if key in table and table[key] != action:
                raise ValueError(f"conflicting greedy actions for shared state key {key!r}")
            table[key] = action
    policy = LookupPolicy(table=table, key_fn=alg.oracle_key)
    mean_cost = sum(per_instance.values()) / len(per_instance)
    return ValueIterationResult(policy=policy, mean_cost=mean_cost, per_instance=per_instance)
