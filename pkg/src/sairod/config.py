"""YAML experiment configuration.

Schema (all top-level keys except ``parameters`` and ``initial`` optional)::

    name: fig4
    model: simplified            # full | simplified
    parameters:
      preset: paper              # start from the published vector, then override
      N: 20
      C: 5
    initial:                     # weights must sum to 1
      - {state: [15, 3, 0, 2, 0, 0], weight: 0.5}
    actions: {M: [1, 2, 3, 4, 5], t: [0]}
    policy:
      kind: constant             # constant | adaptive-symptomatic | adaptive-asymptomatic
      M: 2
      # adaptive: t_low, t_high, m_low, m_high, round_M, tests
    queries:
      - {name: deaths_ge_0.2, compartment: D, op: ">=", frac: 0.2}
    cdf: [D, R, S]
    solve: {tol: 1.0e-9, max_iter: 10000, steps: 30}
    sweep: {M: [1, 2, 3, 4, 5], C: [1, 2, 3, 5]}
    montecarlo: {runs: 1000, depth: 100, seed: 2021, scale: 1, real_population: null}
    export: {labels: [hospital_full, deaths_ge_0.2, all_absorbed], init: all}
    seed: 0
    output: out/fig4
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import yaml

from .model import COMPARTMENTS, Action, Parameters, SimpleState, State, check_state
from .policy import AdaptiveConfig, Policy, adaptive_policy, constant_policy
from .statespace import MODEL_KINDS, state_type

POLICY_KINDS = ("constant", "adaptive-symptomatic", "adaptive-asymptomatic")
_OPS = {">=": operator.ge, ">": operator.gt, "<=": operator.le, "<": operator.lt,
        "==": operator.eq, "!=": operator.ne}
_EPS = 1e-9


class ConfigError(ValueError):
    pass


@dataclass
class QuerySpec:
    name: str
    compartment: str
    op: str
    value: Optional[float] = None
    frac: Optional[float] = None

    def predicate(self, N: int) -> Callable:
        bound = self.frac * N if self.frac is not None else self.value
        cmp = _OPS[self.op]
        # fractional thresholds like 0.2 * 20 must not lose the boundary state
        if self.op in (">=", "<"):
            bound -= _EPS
        elif self.op in (">", "<="):
            bound += _EPS
        name = self.compartment
        return lambda v: cmp(getattr(v, name), bound)


@dataclass
class ExperimentConfig:
    params: Parameters
    initial: List[Tuple[Tuple[int, ...], float]]
    model: str = "simplified"
    name: str = "experiment"
    actions: List[Action] = field(default_factory=lambda: [Action(M) for M in range(1, 6)])
    policy: Dict[str, Any] = field(default_factory=lambda: {"kind": "constant", "M": 2})
    queries: List[QuerySpec] = field(default_factory=list)
    cdf: List[str] = field(default_factory=list)
    tol: float = 1e-9
    max_iter: int = 10_000
    steps: int = 30
    sweep: Optional[Dict[str, List[int]]] = None
    montecarlo: Optional[Dict[str, Any]] = None
    export: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    output: str = "out"
    raw: Dict[str, Any] = field(default_factory=dict)

    def make_policy(self, params: Optional[Parameters] = None, scale: int = 1) -> Policy:
        return build_policy(self.policy, (params or self.params).N, scale)


def build_policy(spec: Dict[str, Any], N: int, scale: int = 1) -> Policy:
    kind = spec.get("kind", "constant")
    if kind == "constant":
        return constant_policy(int(spec.get("M", 1)) * scale, int(spec.get("t", 0)))
    if kind not in POLICY_KINDS:
        raise ConfigError(f"unknown policy kind {kind!r}; expected one of {POLICY_KINDS}")
    signal = "AA" if kind == "adaptive-asymptomatic" else "AS"
    try:
        cfg = AdaptiveConfig(
            t_low=float(spec.get("t_low", 0.05)),
            t_high=float(spec.get("t_high", 0.15)),
            m_low=int(spec.get("m_low", 1)),
            m_high=int(spec.get("m_high", 5)),
            signal=signal,
            round_M=bool(spec.get("round_M", True)),
            tests=int(spec.get("tests", 0)),
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e
    return adaptive_policy(cfg.scaled(scale) if scale != 1 else cfg, N)


def _params(raw: Dict[str, Any]) -> Parameters:
    raw = dict(raw)
    preset = raw.pop("preset", None)
    try:
        if preset == "paper":
            base = Parameters.paper(N=int(raw.pop("N", 20)), C=int(raw.pop("C", 5)))
            return base.with_(**raw)
        if preset is not None:
            raise ConfigError(f"unknown parameter preset {preset!r}")
        return Parameters(**raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad parameters: {e}") from e


def from_dict(raw: Dict[str, Any]) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    for key in ("parameters", "initial"):
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}")
    params = _params(raw["parameters"])
    model = raw.get("model", "simplified")
    if model not in MODEL_KINDS:
        raise ConfigError(f"model must be one of {MODEL_KINDS}, got {model!r}")
    T = state_type(model)

    initial = []
    for entry in raw["initial"]:
        try:
            s = T(*entry["state"])
            check_state(s, params)
        except (TypeError, KeyError, ValueError) as e:
            raise ConfigError(f"bad initial state {entry!r}: {e}") from e
        initial.append((tuple(s), float(entry.get("weight", 1.0))))
    total = sum(w for _, w in initial)
    if not initial or abs(total - 1.0) > 1e-9 or any(w < 0 for _, w in initial):
        raise ConfigError(f"initial weights must be non-negative and sum to 1, got {total}")

    cfg = ExperimentConfig(params=params, initial=initial, model=model,
                           name=raw.get("name", "experiment"), raw=raw)
    if "actions" in raw:
        Ms = raw["actions"].get("M", [1, 2, 3, 4, 5])
        ts = raw["actions"].get("t", [0])
        cfg.actions = [Action(int(M), int(t)) for M in Ms for t in ts]
    if "policy" in raw:
        cfg.policy = dict(raw["policy"])
        build_policy(cfg.policy, params.N)
    for q in raw.get("queries", []):
        try:
            spec = QuerySpec(**q)
        except TypeError as e:
            raise ConfigError(f"bad query {q!r}: {e}") from e
        if spec.compartment not in T._fields or spec.op not in _OPS:
            raise ConfigError(f"bad query {q!r}")
        if (spec.frac is None) == (spec.value is None):
            raise ConfigError(f"query {spec.name!r} needs exactly one of frac / value")
        cfg.queries.append(spec)
    if not cfg.queries:
        cfg.queries = [QuerySpec("deaths_ge_0.2", "D", ">=", frac=0.2)]
    cfg.cdf = list(raw.get("cdf", []))
    for c in cfg.cdf:
        if c not in T._fields:
            raise ConfigError(f"unknown compartment {c!r} in cdf")
    solve = raw.get("solve", {})
    cfg.tol = float(solve.get("tol", cfg.tol))
    cfg.max_iter = int(solve.get("max_iter", cfg.max_iter))
    cfg.steps = int(solve.get("steps", cfg.steps))
    if cfg.tol <= 0 or cfg.max_iter < 1 or cfg.steps < 0:
        raise ConfigError("solve needs tol > 0, max_iter >= 1, steps >= 0")
    cfg.sweep = raw.get("sweep")
    cfg.montecarlo = raw.get("montecarlo")
    cfg.export = raw.get("export", {}) or {}
    cfg.seed = int(raw.get("seed", 0))
    cfg.output = raw.get("output", f"out/{cfg.name}")
    return cfg


def load(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: {e}") from e
    return from_dict(raw)
