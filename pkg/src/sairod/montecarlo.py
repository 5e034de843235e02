"""Seeded simulation of the chain, for population sizes the exact solver cannot hold.

Each step samples the same conditional structure the exact kernels sum
over: infections, then the asymptomatic outcomes together with the test
results, then the symptomatic outcomes with bed saturation, then the
hospital and quarantine outflows.  The induced next-state law is the exact
transition distribution, not an agent-based approximation of it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .model import (COMPARTMENTS, Action, Parameters, SimpleState, State,
                    check_action, check_state, infection_probability)
from .policy import Policy
from .statespace import state_type, width_of

RNG_ALGORITHM = "numpy PCG64, per-run streams from SeedSequence(seed).spawn(runs)"
QUANTILES = (0.05, 0.5, 0.95)


def sample_transition(v, action: Action, params: Parameters,
                      rng: np.random.Generator):
    """Draw one successor of ``v``; works for both the full and the untested state."""
    simplified = isinstance(v, SimpleState)
    p = params
    d1 = rng.binomial(v.S, infection_probability(v, action.M, p)) if v.S else 0

    n_sym, n_rec, n_stay = rng.multinomial(v.A, [p.delta, p.beta, p.c_beta_delta]) if v.A else (0, 0, 0)
    d2, d3, d9 = n_sym, n_rec, 0
    if action.t and not simplified and v.A:
        negatives = v.S + v.Ra
        tested_inf = rng.hypergeometric(v.A, negatives, action.t) if negatives else action.t
        H = rng.binomial(tested_inf, p.gamma)
        if H:
            # the positive set is a uniform H-subset of A, whatever each subject's fate
            _, F, G = rng.multivariate_hypergeometric([n_sym, n_rec, n_stay], H)
            d3 = n_rec - F
            d9 = F + G

    d4, d5, d6, _ = rng.multinomial(v.I, [p.mu, p.psi, p.alpha, p.c_mu_psi_alpha]) if v.I else (0, 0, 0, 0)
    d5 = min(d5, p.C - v.O)
    d7, d8, _ = rng.multinomial(v.O, [p.sigma, p.xi, p.c_sigma_xi]) if v.O else (0, 0, 0)

    if simplified:
        return SimpleState(
            S=v.S - d1,
            A=v.A + d1 - d2 - d3,
            I=v.I + d2 - d4 - d5 - d6,
            R=v.R + d4 + d8 + d3,
            O=v.O + d5 - d7 - d8,
            D=v.D + d6 + d7,
        )
    d10, d11, _ = rng.multinomial(v.Q, [p.iota, p.upsilon, p.c_iota_upsilon]) if v.Q else (0, 0, 0)
    return State(
        S=v.S - d1,
        A=v.A + d1 - d2 - d3 - d9,
        I=v.I + d10 + d2 - d4 - d5 - d6,
        R=v.R + d4 + d8 + d11,
        O=v.O + d5 - d7 - d8,
        D=v.D + d6 + d7,
        Q=v.Q + d9 - d10 - d11,
        Ra=v.Ra + d3,
    )


def quantization_error(real_population: int, representatives: int) -> Tuple[float, float]:
    """Worst-case error of representing ``real_population`` subjects by ``representatives``.

    Returns the absolute error in subjects and the relative error.
    """
    if representatives < 1:
        raise ValueError("need at least one representative")
    return real_population / (2 * representatives), 1 / (2 * representatives)


@dataclass
class McConfig:
    params: Parameters
    initial: Sequence[Tuple[Sequence[int], float]]
    policy: Policy
    runs: int = 1000
    depth: int = 100
    seed: int = 0
    model: str = "simplified"
    real_population: Optional[int] = None
    death_fracs: Sequence[float] = (0.2,)

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.real_population is not None and self.real_population < self.params.N:
            raise ValueError("real population smaller than the number of representatives")
        weights = np.array([w for _, w in self.initial], dtype=float)
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError("initial weights must be non-negative and sum to 1")
        T = state_type(self.model)
        for s, _ in self.initial:
            check_state(T(*s), self.params)

    def echo(self) -> Dict:
        return {
            "params": self.params.__dict__,
            "initial": [[list(s), w] for s, w in self.initial],
            "policy": {"name": self.policy.name, **self.policy.meta},
            "runs": self.runs,
            "depth": self.depth,
            "seed": self.seed,
            "model": self.model,
            "real_population": self.real_population,
            "death_fracs": list(self.death_fracs),
        }


@dataclass
class McReport:
    config: Dict
    seed: int
    rng: str
    compartments: List[str]
    trajectories: np.ndarray          # (runs, depth + 1, width)
    meetings: np.ndarray              # (runs, depth + 1) M applied at each step
    means: np.ndarray = field(init=False)
    quantiles: np.ndarray = field(init=False)
    benchmarks: Dict[str, np.ndarray] = field(init=False)

    def __post_init__(self):
        self.means = self.trajectories.mean(axis=0)
        self.quantiles = np.quantile(self.trajectories, QUANTILES, axis=0)
        N = self.config["params"]["N"]
        D = self.trajectories[:, :, self.compartments.index("D")]
        self.benchmarks = {}
        for frac in self.config["death_fracs"]:
            self.benchmarks[f"P[D>={frac:g}N]"] = (D >= frac * N - 1e-9).mean(axis=0)
            self.benchmarks[f"P[D>{frac:g}N]"] = (D > frac * N + 1e-9).mean(axis=0)
        self.benchmarks["mean_M"] = self.meetings.mean(axis=0)

    def final(self, name: str) -> float:
        return float(self.benchmarks[name][-1])

    def summary(self) -> Dict:
        out = {
            "seed": self.seed,
            "rng": self.rng,
            "config": self.config,
            "final": {k: float(v[-1]) for k, v in self.benchmarks.items()},
            "final_means": dict(zip(self.compartments, self.means[-1].tolist())),
        }
        if self.config.get("real_population"):
            n_hat, N = self.config["real_population"], self.config["params"]["N"]
            out["quantization_error"] = list(quantization_error(n_hat, N))
        return out

    def csv_rows(self):
        header = (["step"] + [f"mean_{c}" for c in self.compartments]
                  + [f"q{int(q * 100):02d}_{c}" for q in QUANTILES for c in self.compartments]
                  + list(self.benchmarks))
        rows = [header]
        for k in range(self.means.shape[0]):
            row = [k] + self.means[k].tolist()
            for qi in range(len(QUANTILES)):
                row += self.quantiles[qi, k].tolist()
            row += [float(v[k]) for v in self.benchmarks.values()]
            rows.append(row)
        return rows

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"


def run(config: McConfig) -> McReport:
    """Simulate ``config.runs`` independent trajectories of ``config.depth`` steps."""
    T = state_type(config.model)
    width = width_of(config.model)
    starts = [T(*s) for s, _ in config.initial]
    weights = np.array([w for _, w in config.initial], dtype=float)
    weights = weights / weights.sum()
    traj = np.empty((config.runs, config.depth + 1, width), dtype=np.int64)
    meetings = np.empty((config.runs, config.depth + 1))
    streams = np.random.SeedSequence(config.seed).spawn(config.runs)
    for r, ss in enumerate(streams):
        rng = np.random.Generator(np.random.PCG64(ss))
        v = starts[rng.choice(len(starts), p=weights)] if len(starts) > 1 else starts[0]
        for k in range(config.depth + 1):
            traj[r, k] = v
            action = Action(*config.policy(v))
            meetings[r, k] = action.M
            if k < config.depth:
                v = sample_transition(v, action, config.params, rng)
    return McReport(config.echo(), config.seed, RNG_ALGORITHM,
                    list(COMPARTMENTS[:width]), traj, meetings)


def scale_setup(factor: int, params: Parameters, initial, policy_factory):
    """Proportionally scale population, beds and initial counts.

    ``policy_factory(factor, N)`` builds the policy at the new size, so the
    caller decides how meeting counts scale.
    """
    big = params.with_(N=params.N * factor, C=params.C * factor)
    init = [(tuple(x * factor for x in s), w) for s, w in initial]
    return big, init, policy_factory(factor, big.N)
