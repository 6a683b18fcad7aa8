"""Gradient descent on one-dimensional polynomials with a controlled rate.

The single real parameter is the step size applied to x <- x - eta*f'(x).
Step cost is the objective gap to a per-instance lower bound, so costs are
non-negative and the minimum is zero.  Dynamics, cost and observation are
written in generic scalar arithmetic, making whole episodes forward-mode
differentiable with dual numbers; a diverging iterate freezes the episode
and keeps charging the cost at the truncation point so totals stay finite
and exactly decomposable.
"""

from __future__ import annotations

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
from ..dual import is_finite, value_of
from ..policies import PolicySpaceSpec
from ..seeding import derive_seed
from ..spaces import Configuration, ConfigurationSpace, ParameterSpec, Real

ETA_LOWER = 1e-6
ETA_UPPER = 10.0
DIVERGENCE_BOUND = 1e100


@dataclass(frozen=True)
class ToyGDPayload:
    coefficients: tuple[float, ...]  # c_0 + c_1 x + ... + c_d x^d
    x0: float
    horizon: int

    def __post_init__(self):
        degree = len(self.coefficients) - 1
        while degree > 0 and self.coefficients[degree] == 0.0:
            degree -= 1
        if degree > 6:
            raise ValueError("degree must be <= 6")
        if degree == 0 or degree % 2 != 0 or self.coefficients[degree] <= 0:
            raise ValueError("polynomial must have an even degree and positive leading term")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


def poly(coefficients, x):
    acc = coefficients[-1]
    for c in reversed(coefficients[:-1]):
        acc = acc * x + c
    return acc


def dpoly_coefficients(coefficients) -> tuple[float, ...]:
    return tuple(j * c for j, c in enumerate(coefficients))[1:]


def lower_bound(coefficients) -> float:
    """Global minimum of the polynomial, via a dense grid refined with the
    real critical points of its derivative."""
    deriv = dpoly_coefficients(coefficients)
    lead = abs(coefficients[-1])
    radius = 1.0 + max(abs(c) for c in coefficients) / lead
    xs = list(np.linspace(-radius, radius, 20001))
    roots = np.roots(list(reversed(deriv)))
    xs.extend(float(r.real) for r in roots if abs(r.imag) < 1e-9)
    return min(poly(coefficients, x) for x in xs)


class ToyGDEnv(TargetAlgorithm):
    def __init__(self):
        self._space = ConfigurationSpace(
            (ParameterSpec("eta", Real(ETA_LOWER, ETA_UPPER, log=True)),)
        )
        self._schema = ("x", "f", "df", "prev_eta", "t")
        self._bound_cache: dict[tuple[float, ...], float] = {}

    def config_space(self) -> ConfigurationSpace:
        return self._space

    def observation_schema(self) -> tuple[str, ...]:
        return self._schema

    def _fmin(self, payload: ToyGDPayload) -> float:
        key = payload.coefficients
        if key not in self._bound_cache:
            self._bound_cache[key] = lower_bound(key)
        return self._bound_cache[key]

    # smooth core (floats or duals) ----------------------------------------
    def smooth_init(self, instance: Instance):
        return [instance.payload.x0, 0.0, False]  # x, prev_eta, frozen

    def smooth_step(self, state, instance: Instance, theta):
        coeffs = instance.payload.coefficients
        fmin = self._fmin(instance.payload)
        x, _, frozen = state
        eta = theta[0]
        if frozen:
            return [x, eta, True], poly(coeffs, x) - fmin
        deriv = dpoly_coefficients(coeffs)
        x_new = x - eta * poly(deriv, x)
        if (
            not is_finite(x_new)
            or abs(value_of(x_new)) > DIVERGENCE_BOUND
            or not is_finite(poly(coeffs, x_new))
        ):
            return [x, eta, True], poly(coeffs, x) - fmin
        return [x_new, eta, False], poly(coeffs, x_new) - fmin

    def smooth_observe(self, state, instance: Instance, t):
        coeffs = instance.payload.coefficients
        x, prev_eta, _ = state
        deriv = dpoly_coefficients(coeffs)
        return [x, poly(coeffs, x), poly(deriv, x), prev_eta, float(t)]

    # TargetAlgorithm surface -----------------------------------------------
    def init(self, instance: Instance) -> AlgorithmState:
        return AlgorithmState(payload=tuple(self.smooth_init(instance)), step_index=0)

    def step(self, state, instance, config):
        new_state, cost = self.smooth_step(list(state.payload), instance, config.values)
        return AlgorithmState(payload=tuple(new_state), step_index=state.step_index + 1), cost

    def is_final(self, state, instance) -> bool:
        return False

    def observe(self, state, instance) -> Observation:
        values = self.smooth_observe(list(state.payload), instance, state.step_index)
        return Observation(values=tuple(float(v) for v in values), schema=self._schema)


def toygd_env(instance: Instance) -> ToyGDEnv:
    if not isinstance(instance.payload, ToyGDPayload):
        raise TypeError("not a toygd instance")
    return ToyGDEnv()


def generate_instances(
    seed: int, count: int, horizon: int = 20, quartic_fraction: float = 0.5
) -> list[Instance]:
    rng = np.random.default_rng(derive_seed(seed, [0]))
    out = []
    for j in range(count):
        if rng.random() < quartic_fraction:
            c4 = float(rng.uniform(0.1, 1.0))
            coeffs = (
                float(rng.uniform(-1.0, 1.0)),
                float(rng.uniform(-1.0, 1.0)),
                float(rng.uniform(-3.0, 2.0)),
                float(rng.uniform(-0.5, 0.5)),
                c4,
            )
        else:
            a = float(rng.uniform(0.2, 3.0))
            b = float(rng.uniform(-2.0, 2.0))
            # a*(x-b)^2 expanded
            coeffs = (a * b * b, -2.0 * a * b, a)
        x0 = float(rng.uniform(-3.0, 3.0))
        payload = ToyGDPayload(coefficients=coeffs, x0=x0, horizon=horizon)
        out.append(Instance(id=f"toygd-{j}", payload=payload, seed=derive_seed(seed, [1, j])))
    return out


def instance_to_dict(inst: Instance) -> dict:
    p = inst.payload
    return {
        "id": inst.id,
        "seed": inst.seed,
        "coefficients": list(p.coefficients),
        "x0": p.x0,
        "horizon": p.horizon,
    }


def instance_from_dict(d: dict) -> Instance:
    payload = ToyGDPayload(tuple(d["coefficients"]), d["x0"], d["horizon"])
    return Instance(id=d["id"], payload=payload, seed=d["seed"])


def make_scenario(
    seed: int,
    count: int = 6,
    horizon: int = 20,
    quartic_fraction: float = 0.5,
    instances: list[Instance] | None = None,
) -> DacScenario:
    if instances is None:
        instances = generate_instances(seed, count, horizon, quartic_fraction)
    env = ToyGDEnv()
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


def default_grid(env: ToyGDEnv, points: int = 64) -> list[Configuration]:
    etas = np.geomspace(ETA_LOWER, ETA_UPPER, points)
    return [Configuration((float(e),)) for e in etas]
