"""Constant and adaptive meeting policies, and MDP -> DTMC reduction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict

import numpy as np
import scipy.sparse as sp

from .model import Action
from .statespace import DTMC, TransitionTable

SIGNALS = ("AS", "AA")


@dataclass(frozen=True)
class AdaptiveConfig:
    """Thresholds and meeting bounds of the linear-ramp heuristic.

    ``signal`` selects the observed fraction of the living population:
    ``"AS"`` uses symptomatic plus hospitalised, ``"AA"`` uses asymptomatic.
    With ``round_M=False`` the interpolated, non-integer M is kept as is.
    """

    t_low: float = 0.05
    t_high: float = 0.15
    m_low: int = 1
    m_high: int = 5
    signal: str = "AA"
    round_M: bool = True
    tests: int = 0

    def __post_init__(self):
        if not 0.0 <= self.t_low < self.t_high <= 1.0:
            raise ValueError(f"need 0 <= t_low < t_high <= 1, got {self.t_low}, {self.t_high}")
        if self.m_low > self.m_high:
            raise ValueError(f"need m_low <= m_high, got {self.m_low}, {self.m_high}")
        if self.signal not in SIGNALS:
            raise ValueError(f"signal must be one of {SIGNALS}, got {self.signal!r}")

    def scaled(self, factor: int) -> "AdaptiveConfig":
        """Multiply the meeting bounds; thresholds are fractions and stay put."""
        return AdaptiveConfig(self.t_low, self.t_high, self.m_low * factor,
                              self.m_high * factor, self.signal, self.round_M, self.tests)


def signal_fraction(v, signal: str, N: int) -> float:
    living = N - v.D
    if living < 1:
        raise ValueError(f"no living subjects in {v}")
    if signal == "AS":
        return (v.I + v.O) / living
    return v.A / living


def adaptive_M(v, cfg: AdaptiveConfig, N: int):
    f = signal_fraction(v, cfg.signal, N)
    if f <= cfg.t_low:
        return cfg.m_high
    if f >= cfg.t_high:
        return cfg.m_low
    m = cfg.m_high + (cfg.m_low - cfg.m_high) * (f - cfg.t_low) / (cfg.t_high - cfg.t_low)
    if not cfg.round_M:
        return m
    return int(math.floor(m + 0.5))


@dataclass
class Policy:
    """A total map from states to actions, with a name for reports."""

    name: str
    fn: Callable
    meta: Dict = field(default_factory=dict)

    def __call__(self, v) -> Action:
        return self.fn(v)


def constant_policy(M: int, t: int = 0) -> Policy:
    """Fixed M; ``t`` tests per step, capped by the testable pool so every state is admissible."""
    action = Action(M, t)

    def fn(v):
        if not t:
            return action
        return Action(M, min(t, v.A + v.S + getattr(v, "Ra", 0)))

    return Policy(f"M={M}" if not t else f"M={M},t={t}", fn,
                  {"kind": "constant", "M": M, "t": t})


def adaptive_policy(cfg: AdaptiveConfig, N: int) -> Policy:
    def fn(v, cfg=cfg, N=N):
        # all-deceased states are absorbing; any action gives the same row
        if v.D == N:
            return Action(cfg.m_low, 0)
        return Action(adaptive_M(v, cfg, N), min(cfg.tests, v.A + v.S + getattr(v, "Ra", 0)))

    kind = "adaptive-asymptomatic" if cfg.signal == "AA" else "adaptive-symptomatic"
    return Policy(cfg.signal, fn, {"kind": kind, **cfg.__dict__})


def apply_policy(table: TransitionTable, policy: Policy) -> DTMC:
    """Select, for every state, the row of the action the policy picks."""
    space = table.space
    pos = {a: j for j, a in enumerate(table.actions)}
    n = len(space)
    chosen = np.empty(n, dtype=np.int64)
    choice = np.zeros((n, 2))
    for i, v in enumerate(space):
        a = Action(*policy(v))
        j = pos.get(a)
        if j is None or not table.admissible[i, j]:
            raise KeyError(f"policy {policy.name} picks {a} in {v}, which the table lacks")
        chosen[i] = j
        choice[i] = a
    indptr = np.zeros(n + 1, dtype=np.int64)
    cols, data = [], []
    for i in range(n):
        c, d = table.row(i, chosen[i])
        cols.append(c)
        data.append(d)
        indptr[i + 1] = indptr[i] + len(c)
    P = sp.csr_matrix((np.concatenate(data), np.concatenate(cols), indptr), shape=(n, n))
    return DTMC(space, P, choice)
