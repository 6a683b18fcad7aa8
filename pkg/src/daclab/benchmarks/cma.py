"""CMA-ES step-size control benchmark.

A (mu/mu_w, lambda) evolution strategy with rank-one plus rank-mu
covariance adaptation runs on a continuous test function; the usual
cumulative step-length adaptation (CSA) of sigma is replaced by the
policy's output each generation, clamped to [1e-8, 1e3].  The per-step
cost is the best objective value seen so far (a dense anytime signal);
scenario-level evaluation uses the pairwise win-rate against a CSA
baseline batch, negated so that lower is better.

Constants follow the standard CMA-ES tutorial defaults and are pinned by
``strategy_constants`` so tests stay bit-stable.  The env records the CSA
recommendation it would have made, and ``CsaPolicy`` reproduces exactly
that value from the observation alone, so driving the env with
``CsaPolicy`` recovers plain CMA-ES.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..core import (
    AlgorithmState,
    BatchFunctional,
    DacScenario,
    Instance,
    InstanceSet,
    Observation,
    TargetAlgorithm,
    Trajectory,
    execute,
)
from ..policies import Policy, PolicySpaceSpec
from ..seeding import derive_seed
from ..spaces import Configuration, ConfigurationSpace, ParameterSpec, Real

SIGMA_LOWER = 1e-8
SIGMA_UPPER = 1e3
HISTORY = 40
_CSA_SEED_TAG = 0xC5A

FUNCTIONS = ("sphere", "ellipsoid", "rastrigin", "rosenbrock")


def objective(function_id: str, x: np.ndarray) -> np.ndarray:
    """Vectorized test functions; ``x`` has shape (pop, dim)."""
    if function_id == "sphere":
        return np.sum(x * x, axis=1)
    if function_id == "ellipsoid":
        d = x.shape[1]
        scales = 10.0 ** (6.0 * np.arange(d) / (d - 1))
        return np.sum(scales * x * x, axis=1)
    if function_id == "rastrigin":
        d = x.shape[1]
        return 10.0 * d + np.sum(x * x - 10.0 * np.cos(2.0 * math.pi * x), axis=1)
    if function_id == "rosenbrock":
        a, b = x[:, :-1], x[:, 1:]
        return np.sum(100.0 * (b - a * a) ** 2 + (1.0 - a) ** 2, axis=1)
    raise ValueError(f"unknown function {function_id!r}")


@dataclass(frozen=True)
class CmaPayload:
    function_id: str
    dim: int
    mean0: tuple[float, ...]
    sigma0: float
    generations: int = 50
    lam_pop: int = 10
    batch_n: int = 25

    def __post_init__(self):
        if self.function_id not in FUNCTIONS:
            raise ValueError(f"unknown function {self.function_id!r}")
        if self.dim < 2 or len(self.mean0) != self.dim:
            raise ValueError("need dim >= 2 and a matching initial mean")
        if self.sigma0 <= 0 or self.generations < 1 or self.lam_pop < 2:
            raise ValueError("invalid sigma0/generations/population")


@lru_cache(maxsize=None)
def strategy_constants(dim: int, lam_pop: int):
    mu = lam_pop // 2
    raw = np.log((lam_pop + 1) / 2.0) - np.log(np.arange(1, mu + 1))
    weights = raw / raw.sum()
    mu_eff = 1.0 / float(np.sum(weights**2))
    c_sigma = (mu_eff + 2.0) / (dim + mu_eff + 5.0)
    d_sigma = 1.0 + 2.0 * max(0.0, math.sqrt((mu_eff - 1.0) / (dim + 1.0)) - 1.0) + c_sigma
    c_c = (4.0 + mu_eff / dim) / (dim + 4.0 + 2.0 * mu_eff / dim)
    c_1 = 2.0 / ((dim + 1.3) ** 2 + mu_eff)
    c_mu = min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((dim + 2.0) ** 2 + mu_eff))
    chi_n = math.sqrt(dim) * (1.0 - 1.0 / (4.0 * dim) + 1.0 / (21.0 * dim * dim))
    return mu, weights, mu_eff, c_sigma, d_sigma, c_c, c_1, c_mu, chi_n


def csa_update(sigma: float, p_norm: float, dim: int, lam_pop: int) -> float:
    """The CSA recommendation for the next step size."""
    _, _, _, c_sigma, d_sigma, _, _, _, chi_n = strategy_constants(dim, lam_pop)
    if p_norm == 0.0:  # no completed generation yet: keep the current sigma
        return sigma
    out = sigma * math.exp((c_sigma / d_sigma) * (p_norm / chi_n - 1.0))
    return min(max(out, SIGMA_LOWER), SIGMA_UPPER)


@dataclass(frozen=True)
class CmaCore:
    mean: tuple[float, ...]
    sigma: float
    cov: tuple[tuple[float, ...], ...]
    p_sigma: tuple[float, ...]
    p_c: tuple[float, ...]
    df_hist: tuple[float, ...]
    sigma_hist: tuple[float, ...]
    best_f: float
    last_gen_f: float | None
    csa_next: float


class CmaEnv(TargetAlgorithm):
    def __init__(self):
        self._space = ConfigurationSpace(
            (ParameterSpec("sigma", Real(SIGMA_LOWER, SIGMA_UPPER, log=True)),)
        )
        self._schema = (
            "sigma",
            "p_sigma_norm",
            *(f"df_hist_{j}" for j in range(HISTORY)),
            *(f"sigma_hist_{j}" for j in range(HISTORY)),
        )

    def config_space(self) -> ConfigurationSpace:
        return self._space

    def observation_schema(self) -> tuple[str, ...]:
        return self._schema

    def init(self, instance: Instance) -> AlgorithmState:
        p = instance.payload
        core = CmaCore(
            mean=tuple(p.mean0),
            sigma=p.sigma0,
            cov=tuple(tuple(row) for row in np.eye(p.dim)),
            p_sigma=(0.0,) * p.dim,
            p_c=(0.0,) * p.dim,
            df_hist=(0.0,) * HISTORY,
            sigma_hist=(0.0,) * HISTORY,
            best_f=math.inf,
            last_gen_f=None,
            csa_next=p.sigma0,
        )
        return AlgorithmState(payload=core, step_index=0)

    def step(self, state, instance, config):
        p = instance.payload
        core: CmaCore = state.payload
        t = state.step_index
        mu, weights, mu_eff, c_sigma, d_sigma, c_c, c_1, c_mu, chi_n = strategy_constants(
            p.dim, p.lam_pop
        )
        sigma = min(max(float(config.values[0]), SIGMA_LOWER), SIGMA_UPPER)

        cov = np.array(core.cov)
        evals, basis = np.linalg.eigh(cov)
        evals = np.maximum(evals, 1e-14 * max(float(evals.max()), 1e-300))
        d = np.sqrt(evals)

        rng = np.random.default_rng(derive_seed(instance.seed, [t + 1]))
        z = rng.standard_normal((p.lam_pop, p.dim))
        y = z @ (basis * d).T  # rows: B @ diag(d) @ z_i
        x = np.asarray(core.mean) + sigma * y
        fvals = objective(p.function_id, x)
        order = np.argsort(fvals, kind="stable")[:mu]

        y_w = weights @ y[order]
        mean_new = np.asarray(core.mean) + sigma * y_w

        inv_sqrt = basis @ np.diag(1.0 / d) @ basis.T
        p_sigma_new = (1.0 - c_sigma) * np.asarray(core.p_sigma) + math.sqrt(
            c_sigma * (2.0 - c_sigma) * mu_eff
        ) * (inv_sqrt @ y_w)
        p_norm = float(np.linalg.norm(p_sigma_new))

        h_sigma = (
            p_norm / math.sqrt(1.0 - (1.0 - c_sigma) ** (2.0 * (t + 1)))
            < (1.4 + 2.0 / (p.dim + 1.0)) * chi_n
        )
        p_c_new = (1.0 - c_c) * np.asarray(core.p_c) + (
            math.sqrt(c_c * (2.0 - c_c) * mu_eff) * y_w if h_sigma else 0.0
        )

        rank_mu = (weights[:, None, None] * (y[order][:, :, None] * y[order][:, None, :])).sum(
            axis=0
        )
        cov_new = (
            (1.0 - c_1 - c_mu) * cov
            + c_1
            * (np.outer(p_c_new, p_c_new) + (0.0 if h_sigma else c_c * (2.0 - c_c)) * cov)
            + c_mu * rank_mu
        )
        cov_new = (cov_new + cov_new.T) / 2.0

        gen_best = float(fvals.min())
        best_f = min(core.best_f, gen_best)
        if core.last_gen_f is None:
            df_hist = core.df_hist
        else:
            change = (core.last_gen_f - gen_best) / max(abs(core.last_gen_f), 1e-12)
            df_hist = core.df_hist[1:] + (change,)
        sigma_hist = core.sigma_hist[1:] + (sigma,)

        new_core = CmaCore(
            mean=tuple(float(v) for v in mean_new),
            sigma=sigma,
            cov=tuple(tuple(float(v) for v in row) for row in cov_new),
            p_sigma=tuple(float(v) for v in p_sigma_new),
            p_c=tuple(float(v) for v in p_c_new),
            df_hist=df_hist,
            sigma_hist=sigma_hist,
            best_f=best_f,
            last_gen_f=gen_best,
            csa_next=csa_update(sigma, p_norm, p.dim, p.lam_pop),
        )
        return AlgorithmState(payload=new_core, step_index=t + 1), best_f

    def is_final(self, state, instance) -> bool:
        return state.step_index >= instance.payload.generations

    def observe(self, state, instance) -> Observation:
        core: CmaCore = state.payload
        p_norm = math.sqrt(sum(v * v for v in core.p_sigma))
        values = (core.sigma, p_norm, *core.df_hist, *core.sigma_hist)
        return Observation(values=values, schema=self._schema)


@dataclass(frozen=True)
class CsaPolicy(Policy):
    """Cumulative step-length adaptation, read off the observation."""

    dim: int
    lam_pop: int

    def accepts_schema(self, schema):
        if len(schema) < 2 or schema[0] != "sigma" or schema[1] != "p_sigma_norm":
            return False, "CSA needs (sigma, p_sigma_norm, ...) observations"
        return True, ""

    def act(self, obs: Observation) -> Configuration:
        sigma, p_norm = obs.values[0], obs.values[1]
        return Configuration((csa_update(sigma, p_norm, self.dim, self.lam_pop),))


def csa_policy(dim: int, lam_pop: int = 10) -> CsaPolicy:
    return CsaPolicy(dim=dim, lam_pop=lam_pop)


def final_objective(traj: Trajectory) -> float:
    """Best objective value at the end of a run (the last step cost)."""
    return traj.steps[-1][2]


def cma_winrate_cost(policy_trajs, csa_trajs) -> float:
    """Negated pairwise win rate of the policy batch against the CSA batch.

    Returns -(number of strict wins)/n^2 in [-1, 0]; lower is better.
    """
    n = len(policy_trajs)
    if n == 0 or len(csa_trajs) != n:
        raise ValueError("need two equally sized, non-empty batches")
    ours = [final_objective(t) for t in policy_trajs]
    theirs = [final_objective(t) for t in csa_trajs]
    wins = sum(1 for a in ours for b in theirs if a < b)
    return -wins / (n * n)


def cma_env(instance: Instance) -> CmaEnv:
    if not isinstance(instance.payload, CmaPayload):
        raise TypeError("not a cma instance")
    return CmaEnv()


def generate_instances(
    seed: int,
    count: int,
    function_id: str = "sphere",
    dim: int = 5,
    generations: int = 50,
    lam_pop: int = 10,
    batch_n: int = 25,
) -> list[Instance]:
    rng = np.random.default_rng(derive_seed(seed, [0]))
    out = []
    for j in range(count):
        mean0 = tuple(float(v) for v in rng.uniform(-4.0, 4.0, size=dim))
        sigma0 = float(rng.uniform(0.3, 2.0))
        payload = CmaPayload(
            function_id=function_id,
            dim=dim,
            mean0=mean0,
            sigma0=sigma0,
            generations=generations,
            lam_pop=lam_pop,
            batch_n=batch_n,
        )
        out.append(Instance(id=f"cma-{j}", payload=payload, seed=derive_seed(seed, [1, j])))
    return out


def instance_to_dict(inst: Instance) -> dict:
    p = inst.payload
    return {
        "id": inst.id,
        "seed": inst.seed,
        "function_id": p.function_id,
        "dim": p.dim,
        "mean0": list(p.mean0),
        "sigma0": p.sigma0,
        "generations": p.generations,
        "lam_pop": p.lam_pop,
        "batch_n": p.batch_n,
    }


def instance_from_dict(d: dict) -> Instance:
    payload = CmaPayload(
        function_id=d["function_id"],
        dim=d["dim"],
        mean0=tuple(d["mean0"]),
        sigma0=d["sigma0"],
        generations=d.get("generations", 50),
        lam_pop=d.get("lam_pop", 10),
        batch_n=d.get("batch_n", 25),
    )
    return Instance(id=d["id"], payload=payload, seed=d["seed"])


def make_winrate_cost(env: CmaEnv):
    """Batch cost functional: win rate against a cached CSA baseline batch."""
    cache: dict = {}

    def fn(trajs, instance: Instance, seed: int) -> float:
        p = instance.payload
        key = (instance.id, seed)
        if key not in cache:
            baseline = csa_policy(p.dim, p.lam_pop)
            cache[key] = [
                execute(env, baseline, instance, p.generations,
                        seed=derive_seed(seed, [_CSA_SEED_TAG, j]))
                for j in range(p.batch_n)
            ]
        return cma_winrate_cost(trajs, cache[key])

    return fn


def make_scenario(
    seed: int,
    count: int = 2,
    function_id: str = "sphere",
    dim: int = 5,
    generations: int = 50,
    lam_pop: int = 10,
    batch_n: int = 25,
    instances: list[Instance] | None = None,
) -> DacScenario:
    if instances is None:
        instances = generate_instances(
            seed, count, function_id, dim, generations, lam_pop, batch_n
        )
    env = cma_env(instances[0])
    fn = make_winrate_cost(env)
    batch = instances[0].payload.batch_n
    cutoff = max(i.payload.generations for i in instances)
    spec = PolicySpaceSpec(
        kind="log-linear", space=env.config_space(), n_features=len(env.observation_schema())
    )
    return DacScenario(
        algorithm=env,
        instance_set=InstanceSet(tuple(instances)),
        policy_space=spec,
        cutoff=cutoff,
        cost=BatchFunctional(fn=fn, n=batch),
    )


def default_grid(env: CmaEnv, points: int = 64, lower: float = 1e-3, upper: float = 10.0):
    sigmas = np.geomspace(lower, upper, points)
    return [Configuration((float(s),)) for s in sigmas]
