"""Dynamic configuration policies over a flat real parameter vector.

Four parametric families share one calling convention: a policy maps an
observation to a configuration, and every family exposes its parameters
as a flat vector ``lam`` so that optimizers and the static-configuration
reduction treat them uniformly.

Output adapter.  Each parameter of the target space owns a "head" in the
raw output: one slot for real/integer parameters, one logit per choice
for categoricals (argmax, lowest index wins ties).  Table-backed families
(constant, tabular) store parameter values directly, so reals are only
clamped; function approximators (log-linear, mlp) emit unbounded
pre-activations, so log-scaled reals go through ``exp`` before clamping.

Forward passes are written in plain scalar arithmetic on purpose: the same
code runs on floats and on dual numbers, which makes the primal part of
``act_dual`` equal to ``act`` exactly.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

from .core import Observation
from .dual import Dual, dclamp, dexp, dtanh, value_of, tangent_of
from .spaces import Categorical, Configuration, ConfigurationSpace, Integer, Real

__all__ = [
    "PolicySpaceSpec",
    "Policy",
    "ParametricPolicy",
    "LookupPolicy",
    "act_dual",
    "UnsupportedDifferentiation",
    "encode_configuration",
    "policy_to_json",
    "policy_from_json",
]

KINDS = ("constant", "tabular", "log-linear", "mlp")


class UnsupportedDifferentiation(TypeError):
    pass


def head_width(space: ConfigurationSpace) -> int:
    w = 0
    for p in space.params:
        w += len(p.domain.choices) if isinstance(p.domain, Categorical) else 1
    return w


@dataclass(frozen=True)
class PolicySpaceSpec:
    """Shape of one policy family over a target configuration space.

    ``bins`` (tabular only) lists (feature_index, n_bins, lo, hi) axes; the
    cell is the row-major flattening of the per-axis bins.  ``n_features``
    fixes the expected observation length for log-linear and mlp.
    """

    kind: str
    space: ConfigurationSpace
    n_features: int | None = None
    hidden: tuple[int, ...] = ()
    bins: tuple[tuple[int, int, float, float], ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kind in ("log-linear", "mlp") and not self.n_features:
            raise ValueError(f"{self.kind} spec needs n_features")
        if self.kind == "tabular" and not self.bins:
            raise ValueError("tabular spec needs at least one bin axis")
        if self.kind == "mlp" and not self.hidden:
            raise ValueError("mlp spec needs at least one hidden layer")

    @property
    def squash(self) -> bool:
        return self.kind in ("log-linear", "mlp")

    def n_cells(self) -> int:
        n = 1
        for _, bins, _, _ in self.bins:
            n *= bins
        return n

    def lam_length(self) -> int:
        hw = head_width(self.space)
        if self.kind == "constant":
            return hw
        if self.kind == "tabular":
            return self.n_cells() * hw
        if self.kind == "log-linear":
            return hw * (self.n_features + 1)
        dims = [self.n_features, *self.hidden, hw]
        return sum(dims[i + 1] * dims[i] + dims[i + 1] for i in range(len(dims) - 1))


class Policy:
    """A deterministic mapping from observations to configurations."""

    def act(self, obs: Observation) -> Configuration:
        raise NotImplementedError

    def accepts_schema(self, schema: tuple[str, ...]) -> tuple[bool, str]:
        return True, ""


def tabular_cell(bins, values) -> int:
    """Row-major cell index of an observation under tabular bin axes."""
    cell = 0
    for idx, n_bins, lo, hi in bins:
        v = value_of(values[idx])
        j = int((v - lo) / (hi - lo) * n_bins)
        j = min(max(j, 0), n_bins - 1)
        cell = cell * n_bins + j
    return cell


def _decode(space: ConfigurationSpace, raw: list, squash: bool) -> list:
    """Map one raw head to parameter values (dual-aware for reals)."""
    out = []
    pos = 0
    for p in space.params:
        dom = p.domain
        if isinstance(dom, Categorical):
            m = len(dom.choices)
            best, best_v = 0, value_of(raw[pos])
            for j in range(1, m):
                v = value_of(raw[pos + j])
                if v > best_v:
                    best, best_v = j, v
            out.append(dom.choices[best])
            pos += m
        elif isinstance(dom, Real):
            r = raw[pos]
            if squash and dom.log:
                r = dexp(r)
            out.append(dclamp(r, dom.lower, dom.upper))
            pos += 1
        else:
            assert isinstance(dom, Integer)
            v = dclamp(value_of(raw[pos]), dom.lower, dom.upper)
            out.append(int(v + 0.5) if v >= 0 else -int(-v + 0.5))
            pos += 1
    return out


@dataclass(frozen=True)
class ParametricPolicy(Policy):
    spec: PolicySpaceSpec
    lam: tuple[float, ...]

    def __post_init__(self):
        if len(self.lam) != self.spec.lam_length():
            raise ValueError(
                f"lam length {len(self.lam)} != {self.spec.lam_length()} required by spec"
            )

    def accepts_schema(self, schema):
        spec = self.spec
        if spec.kind == "constant":
            return True, ""
        if spec.kind == "tabular":
            for idx, _, _, _ in spec.bins:
                if idx >= len(schema):
                    return False, f"tabular bin feature index {idx} outside schema of length {len(schema)}"
            return True, ""
        if spec.n_features != len(schema):
            return False, f"{spec.kind} expects {spec.n_features} features, schema has {len(schema)}"
        return True, ""

    # raw forward pass, generic over float/Dual scalars -------------------
    def _forward(self, obs_values, lam):
        spec = self.spec
        hw = head_width(spec.space)
        if spec.kind == "constant":
            return list(lam)
        if spec.kind == "tabular":
            cell = tabular_cell(spec.bins, obs_values)
            return list(lam[cell * hw:(cell + 1) * hw])
        if spec.kind == "log-linear":
            n = spec.n_features
            raw = []
            for r in range(hw):
                base = r * (n + 1)
                acc = lam[base]
                for c in range(n):
                    acc = acc + lam[base + 1 + c] * obs_values[c]
                raw.append(acc)
            return raw
        # mlp: tanh hidden layers, linear output head
        dims = [spec.n_features, *spec.hidden, hw]
        x = list(obs_values)
        pos = 0
        for layer in range(len(dims) - 1):
            n_in, n_out = dims[layer], dims[layer + 1]
            y = []
            for r in range(n_out):
                acc = lam[pos + n_out * n_in + r]  # bias
                row = pos + r * n_in
                for c in range(n_in):
                    acc = acc + lam[row + c] * x[c]
                y.append(dtanh(acc) if layer < len(dims) - 2 else acc)
            pos += n_out * n_in + n_out
            x = y
        return x

    def act(self, obs: Observation) -> Configuration:
        raw = self._forward(obs.values, self.lam)
        return Configuration(_decode(self.spec.space, raw, self.spec.squash))


@dataclass(frozen=True)
class LookupPolicy(Policy):
    """Exact table policy keyed by a benchmark-supplied observation key.

    Produced by the value-iteration oracle; falls back to ``default`` for
    keys outside the enumerated state set.
    """

    table: dict
    key_fn: object  # Callable[[Observation], hashable]
    default: Configuration | None = None

    def act(self, obs: Observation) -> Configuration:
        key = self.key_fn(obs)
        config = self.table.get(key, self.default)
        if config is None:
            raise KeyError(f"no table entry for observation key {key!r}")
        return config


def act_dual(policy: ParametricPolicy, obs_values, lam_tangent):
    """Evaluate ``policy`` with a tangent direction on its parameters.

    ``obs_values`` may carry tangents (Dual entries) for chained use inside
    an episode; returns the primal configuration and one output tangent per
    (real) parameter of the target space.
    """
    spec = policy.spec
    if spec.kind == "tabular":
        raise UnsupportedDifferentiation("tabular policies are not differentiable")
    for p in spec.space.params:
        if not isinstance(p.domain, Real):
            raise UnsupportedDifferentiation(
                f"parameter {p.name!r} is not real-valued; cannot differentiate"
            )
    lam_duals = [Dual(v, t) for v, t in zip(policy.lam, lam_tangent)]
    raw = policy._forward(obs_values, lam_duals)
    decoded = _decode(spec.space, raw, spec.squash)
    primal = Configuration([value_of(v) for v in decoded])
    tangents = tuple(tangent_of(v) for v in decoded)
    return primal, tangents


def constant_policy(space: ConfigurationSpace, config: Configuration) -> ParametricPolicy:
    """The constant policy that emits ``config`` for every observation."""
    spec = PolicySpaceSpec(kind="constant", space=space)
    return ParametricPolicy(spec, encode_configuration(space, config))


def encode_configuration(space: ConfigurationSpace, config: Configuration) -> tuple[float, ...]:
    """Flat head encoding of a configuration (one-hot logits for categoricals)."""
    space.validate(config)
    lam = []
    for p, v in zip(space.params, config.values):
        if isinstance(p.domain, Categorical):
            lam.extend(1.0 if c == v else 0.0 for c in p.domain.choices)
        else:
            lam.append(float(v))
    return tuple(lam)


# --- serialization ---------------------------------------------------------


def _domain_to_dict(dom):
    if isinstance(dom, Categorical):
        return {"type": "categorical", "choices": list(dom.choices)}
    if isinstance(dom, Real):
        return {"type": "real", "lower": dom.lower, "upper": dom.upper, "log": dom.log}
    return {"type": "integer", "lower": dom.lower, "upper": dom.upper}


def _domain_from_dict(d):
    if d["type"] == "categorical":
        return Categorical(tuple(d["choices"]))
    if d["type"] == "real":
        return Real(d["lower"], d["upper"], d.get("log", False))
    return Integer(d["lower"], d["upper"])


def space_to_dict(space: ConfigurationSpace) -> dict:
    return {"params": [{"name": p.name, **_domain_to_dict(p.domain)} for p in space.params]}


def space_from_dict(d: dict) -> ConfigurationSpace:
    from .spaces import ParameterSpec

    return ConfigurationSpace(
        tuple(ParameterSpec(p["name"], _domain_from_dict(p)) for p in d["params"])
    )


def _lam_to_hex(lam) -> str:
    return struct.pack(f"<{len(lam)}d", *lam).hex()


def _lam_from_hex(s: str) -> tuple[float, ...]:
    raw = bytes.fromhex(s)
    return struct.unpack(f"<{len(raw) // 8}d", raw)


def policy_to_json(policy: ParametricPolicy) -> str:
    spec = policy.spec
    doc = {
        "spec": {
            "kind": spec.kind,
            "space": space_to_dict(spec.space),
            "n_features": spec.n_features,
            "hidden": list(spec.hidden),
            "bins": [list(b) for b in spec.bins],
        },
        "lam_hex": _lam_to_hex(policy.lam),
    }
    return json.dumps(doc, sort_keys=True)


def policy_from_json(text: str) -> ParametricPolicy:
    doc = json.loads(text)
    s = doc["spec"]
    spec = PolicySpaceSpec(
        kind=s["kind"],
        space=space_from_dict(s["space"]),
        n_features=s.get("n_features"),
        hidden=tuple(s.get("hidden", ())),
        bins=tuple(tuple(b) for b in s.get("bins", ())),
    )
    return ParametricPolicy(spec, _lam_from_hex(doc["lam_hex"]))
