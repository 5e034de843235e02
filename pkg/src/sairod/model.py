"""Closed-form transition kernels of the extended SAIROD chain.

The Markov state is the vector of compartment counts
``(S, A, I, R, O, D, Q, Ra)``.  One step moves subjects along eleven
flows ``d1 .. d11``:

    d1  S -> A      infection after M meetings
    d2  A -> I      asymptomatic develops symptoms
    d3  A -> Ra     asymptomatic recovers unnoticed
    d9  A -> Q      asymptomatic tested positive
    d4  I -> R,  d5  I -> O,  d6  I -> D
    d7  O -> D,  d8  O -> R
    d10 Q -> I,  d11 Q -> R

Outflows from different source compartments are conditionally independent
given the current state, so every kernel below is a distribution over the
flows leaving one compartment.  The one-step distribution is their product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from functools import lru_cache
from typing import Dict, Iterator, List, NamedTuple, Tuple

import numpy as np

from .combinatorics import binom, binomial_pmf, multinom

# Residuals like 1 - mu - psi - alpha can come out at -5e-17 for parameter
# vectors that sum to one; anything below this is treated as exactly zero.
_RESIDUAL_TOL = 1e-12
NORMALIZATION_TOL = 1e-9

COMPARTMENTS = ("S", "A", "I", "R", "O", "D", "Q", "Ra")
SIMPLE_COMPARTMENTS = ("S", "A", "I", "R", "O", "D")


class NormalizationError(RuntimeError):
    """A transition row lost or gained more mass than rounding can explain."""


class State(NamedTuple):
    S: int
    A: int
    I: int
    R: int
    O: int
    D: int
    Q: int = 0
    Ra: int = 0


class SimpleState(NamedTuple):
    """State of the untested model: no quarantine, Ra folded into R."""

    S: int
    A: int
    I: int
    R: int
    O: int
    D: int


class Action(NamedTuple):
    M: int
    t: int = 0


class FlowVector(NamedTuple):
    d1: int = 0
    d2: int = 0
    d3: int = 0
    d4: int = 0
    d5: int = 0
    d6: int = 0
    d7: int = 0
    d8: int = 0
    d9: int = 0
    d10: int = 0
    d11: int = 0

    def state_delta(self) -> State:
        """Apply the balance equations; the result may have negative entries."""
        f = self
        return State(
            S=-f.d1,
            A=f.d1 - f.d2 - f.d3 - f.d9,
            I=f.d10 + f.d2 - f.d4 - f.d5 - f.d6,
            R=f.d4 + f.d8 + f.d11,
            O=f.d5 - f.d7 - f.d8,
            D=f.d6 + f.d7,
            Q=f.d9 - f.d10 - f.d11,
            Ra=f.d3,
        )

    def feasible(self, v: State) -> bool:
        f = self
        return (
            min(f) >= 0
            and f.d1 <= v.S
            and f.d2 + f.d3 + f.d9 <= v.A
            and f.d10 + f.d11 <= v.Q
            and f.d4 + f.d5 + f.d6 <= v.I
            and f.d7 + f.d8 <= v.O
        )


@dataclass(frozen=True)
class Parameters:
    """Population size, hospital capacity and the eleven per-step probabilities.

    Attributes:
        N: population size.
        C: hospital beds.
        omega: infection probability per meeting with an asymptomatic subject.
        beta, delta: asymptomatic -> recovered / symptomatic.
        mu, psi, alpha: symptomatic -> recovered / hospitalised / deceased.
        sigma, xi: hospitalised -> deceased / recovered.
        gamma: probability that a tested infectious subject is positive.
        iota, upsilon: quarantined -> symptomatic / recovered.
    """

    N: int
    C: int
    omega: float
    beta: float
    delta: float
    mu: float
    alpha: float
    sigma: float
    xi: float
    gamma: float
    psi: float
    iota: float
    upsilon: float

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if self.C < 0:
            raise ValueError(f"C must be >= 0, got {self.C}")
        for f in fields(self)[2:]:
            p = getattr(self, f.name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{f.name}={p} is not a probability")
        for name in ("c_beta_delta", "c_mu_psi_alpha", "c_sigma_xi", "c_iota_upsilon"):
            getattr(self, name)

    @staticmethod
    def _residual(name: str, *ps: float) -> float:
        r = 1.0 - math.fsum(ps)
        if r < -_RESIDUAL_TOL:
            raise ValueError(f"{name} = {r} < 0: outgoing probabilities exceed 1")
        return max(r, 0.0)

    @property
    def c_beta_delta(self) -> float:
        return self._residual("C_beta_delta", self.beta, self.delta)

    @property
    def c_mu_psi_alpha(self) -> float:
        return self._residual("C_mu_psi_alpha", self.mu, self.psi, self.alpha)

    @property
    def c_sigma_xi(self) -> float:
        return self._residual("C_sigma_xi", self.sigma, self.xi)

    @property
    def c_iota_upsilon(self) -> float:
        return self._residual("C_iota_upsilon", self.iota, self.upsilon)

    def with_(self, **changes) -> "Parameters":
        return replace(self, **changes)

    @classmethod
    def paper(cls, N: int = 20, C: int = 5, gamma: float = 0.9,
              iota: float = 0.2, upsilon: float = 0.3) -> "Parameters":
        """The probability vector used in the published experiments.

        gamma, iota and upsilon are never exercised there (no tests are
        administered), so the defaults are placeholders.
        """
        return cls(N=N, C=C, omega=0.5, beta=0.45, delta=0.25, mu=0.4,
                   alpha=0.25, sigma=0.1, xi=0.65, gamma=gamma, psi=0.35,
                   iota=iota, upsilon=upsilon)

    @classmethod
    def frozen(cls, N: int, C: int) -> "Parameters":
        """All movement probabilities zero: every state is a fixed point."""
        return cls(N=N, C=C, omega=0.0, beta=0.0, delta=0.0, mu=0.0, alpha=0.0,
                   sigma=0.0, xi=0.0, gamma=0.0, psi=0.0, iota=0.0, upsilon=0.0)


def check_state(v, params: Parameters) -> None:
    if any(x < 0 for x in v):
        raise ValueError(f"negative compartment in {v}")
    if sum(v) != params.N:
        raise ValueError(f"{v} sums to {sum(v)}, expected N={params.N}")
    if v.O > params.C:
        raise ValueError(f"{v} has O={v.O} above capacity C={params.C}")


def testing_pool(v: State) -> int:
    return v.A + v.S + v.Ra


def check_action(v: State, action: Action) -> None:
    if action.M < 0 or action.t < 0:
        raise ValueError(f"negative action {action}")
    if action.t > testing_pool(v):
        raise ValueError(f"t={action.t} exceeds the testing pool {testing_pool(v)} of {v}")


# ---------------------------------------------------------------------------
# Per-compartment kernels


def infection_probability(v, M: int, params: Parameters) -> float:
    """Probability that one susceptible subject is infected during a step.

    Each of the ``M`` meetings picks a partner uniformly among subjects that
    circulate (everyone except I, O, D and Q) and transmits with ``omega``
    when the partner is asymptomatic.
    """
    if M < 0:
        raise ValueError(f"negative M={M}")
    if M == 0 or v.A == 0:
        return 0.0
    pool = params.N - v.D - v.I - v.O - getattr(v, "Q", 0)
    if pool <= 0:
        raise ValueError(f"empty meeting pool with A={v.A} > 0 in {v}")
    return 1.0 - (1.0 - params.omega * v.A / pool) ** M


def positive_test_pmf(v: State, t: int, params: Parameters) -> List[float]:
    """Distribution of the number of positives among ``t`` tests.

    Tests go to ``t`` distinct subjects drawn uniformly from A + S + Ra; only
    the asymptomatic ones can be positive, each with probability ``gamma``.
    Entry ``H`` is the probability of exactly ``H`` positives.
    """
    pool = testing_pool(v)
    if t < 0 or t > pool:
        raise ValueError(f"t={t} outside [0, {pool}]")
    negatives = v.S + v.Ra
    total = binom(pool, t)
    out = []
    for H in range(t + 1):
        acc = 0.0
        for p in range(t + 1):
            ways = binom(negatives, t - p) * binom(v.A, p)
            if ways:
                acc += ways * binomial_pmf(p, params.gamma, H)
        out.append(acc / total)
    return out


def rho(d2: int, d3: int, v, params: Parameters) -> float:
    """Probability that exactly ``d2`` asymptomatics turn symptomatic and ``d3`` recover."""
    A = v.A
    if d2 < 0 or d3 < 0 or d2 + d3 > A:
        return 0.0
    return (multinom(A, (d2, d3)) * params.beta**d3 * params.delta**d2
            * params.c_beta_delta ** (A - d2 - d3))


def _rho_e_terms(d2: int, d3: int, d9: int, v: State, t: int, params: Parameters,
                 h_start: int) -> float:
    A = v.A
    pmf = positive_test_pmf(v, t, params)
    acc = 0.0
    for H in range(h_start, t + 1):
        if H > A or pmf[H] == 0.0:
            continue
        inner = 0.0
        for F in range(d9 + 1):
            K = (binom(d3 + F, F) * binom(A - (d2 + d3 + F), d9 - F)
                 * binom(d2, H - d9))
            if K:
                inner += rho(d2, d3 + F, v, params) * K
        acc += pmf[H] * inner / binom(A, H)
    return acc


def rho_e(d2: int, d3: int, d9: int, v: State, t: int, params: Parameters) -> float:
    """Joint probability of the asymptomatic outflows when ``t`` tests are administered.

    ``d9`` counts positives that are quarantined; positives that develop
    symptoms in the same step are counted in ``d2`` instead.  Conditioning on
    the number ``H`` of positives, the positive set is a uniform ``H``-subset
    of A, independent of the health outcomes.
    """
    if min(d2, d3, d9) < 0 or d2 + d3 + d9 > v.A or d9 > t:
        return 0.0
    return _rho_e_terms(d2, d3, d9, v, t, params, h_start=d9)


def rho_e_full_range(d2: int, d3: int, d9: int, v: State, t: int,
                     params: Parameters) -> float:
    """Same as :func:`rho_e` but summing ``H`` from 0; terms below ``d9`` vanish."""
    if min(d2, d3, d9) < 0 or d2 + d3 + d9 > v.A or d9 > t:
        return 0.0
    return _rho_e_terms(d2, d3, d9, v, t, params, h_start=0)


def _phi_raw(d4: int, d5: int, d6: int, I: int, params: Parameters) -> float:
    if min(d4, d5, d6) < 0 or d4 + d5 + d6 > I:
        return 0.0
    return (multinom(I, (d4, d5, d6)) * params.mu**d4 * params.psi**d5
            * params.alpha**d6 * params.c_mu_psi_alpha ** (I - d4 - d5 - d6))


def phi(d4: int, d5: int, d6: int, v, params: Parameters) -> float:
    """Symptomatic outflows (recover, hospitalised, die) with bed saturation.

    When more subjects need a bed than the ``C - O`` free ones, the extra
    patients are turned down and stay symptomatic; their mass is folded onto
    ``d5 = C - O``.
    """
    I = v.I
    free = params.C - v.O
    if free < 0:
        raise ValueError(f"O={v.O} exceeds capacity C={params.C}")
    if min(d4, d5, d6) < 0 or d4 + d5 + d6 > I or d5 > free:
        return 0.0
    if d5 < free:
        return _phi_raw(d4, d5, d6, I, params)
    return sum(_phi_raw(d4, free + h, d6, I, params)
               for h in range(I - d4 - d6 - free + 1))


def zeta(d7: int, d8: int, v, params: Parameters) -> float:
    """Hospitalised outflows: ``d7`` die, ``d8`` recover."""
    O = v.O
    if d7 < 0 or d8 < 0 or d7 + d8 > O:
        return 0.0
    return (multinom(O, (d7, d8)) * params.sigma**d7 * params.xi**d8
            * params.c_sigma_xi ** (O - d7 - d8))


def chi(d10: int, d11: int, v, params: Parameters) -> float:
    """Quarantined outflows: ``d10`` develop symptoms, ``d11`` recover."""
    Q = v.Q
    if d10 < 0 or d11 < 0 or d10 + d11 > Q:
        return 0.0
    return (multinom(Q, (d10, d11)) * params.iota**d10 * params.upsilon**d11
            * params.c_iota_upsilon ** (Q - d10 - d11))


# ---------------------------------------------------------------------------
# Single transition probability (nested-sum form)


def transition_probability(v: State, v2: State, action: Action,
                           params: Parameters) -> float:
    """Probability of moving from ``v`` to ``v2`` in one step under ``action``.

    Evaluated as nested conditional sums: the susceptible outflow is fixed by
    ``S``; for each ``d2`` the asymptomatic outflow ``(d2, dRa, d9)`` is fixed
    by the A and Ra balances; for each ``(d4, d5, d6)`` the remaining
    hospital and quarantine flows follow from the D, O, I and R balances.
    """
    v, v2 = State(*v), State(*v2)
    check_state(v, params)
    check_state(v2, params)
    check_action(v, action)
    dS, dA, dI, dR, dO, dD, dQ, dRa = (b - a for a, b in zip(v, v2))

    d1 = -dS
    p1 = binomial_pmf(v.S, infection_probability(v, action.M, params), d1)
    if p1 == 0.0 or dRa < 0:
        return 0.0

    total = 0.0
    for d2 in range(-dS - dA - dRa + 1):
        d9 = -dS - dA - dRa - d2
        p2 = rho_e(d2, dRa, d9, v, action.t, params)
        if p2 == 0.0:
            continue
        inner = 0.0
        for d4 in range(v.I + 1):
            for d5 in range(v.I - d4 + 1):
                for d6 in range(v.I - d4 - d5 + 1):
                    p3 = phi(d4, d5, d6, v, params)
                    if p3 == 0.0:
                        continue
                    s = d4 + d5 + d6
                    p4 = (zeta(dD - d6, s - d4 - dD - dO, v, params)
                          * chi(dI - d2 + s, dR + dD + dO - s, v, params))
                    inner += p3 * p4
        total += p2 * inner
    return p1 * total


def iter_flows(v: State, action: Action, params: Parameters
               ) -> Iterator[Tuple[FlowVector, float]]:
    """Yield every flow vector with positive probability, with its probability.

    Enumeration order: d1, then the asymptomatic block with d2 outermost,
    then (d4, d5, d6), then the hospital and quarantine blocks.  This is the
    slow reference path; :func:`transition_distribution` is the fast one.
    """
    v = State(*v)
    pg = infection_probability(v, action.M, params)
    a_block = _asymptomatic_block(v.A, v.S + v.Ra, action.t, params)
    for d1 in range(v.S + 1):
        p1 = binomial_pmf(v.S, pg, d1)
        if p1 == 0.0:
            continue
        for (d2, d3, d9), p2 in a_block:
            for d4, d5, d6 in _triples(v.I):
                p3 = phi(d4, d5, d6, v, params)
                if p3 == 0.0:
                    continue
                for d7, d8 in _pairs(v.O):
                    p4 = zeta(d7, d8, v, params)
                    if p4 == 0.0:
                        continue
                    for d10, d11 in _pairs(v.Q):
                        p5 = chi(d10, d11, v, params)
                        if p5 == 0.0:
                            continue
                        yield (FlowVector(d1, d2, d3, d4, d5, d6, d7, d8, d9, d10, d11),
                               p1 * p2 * p3 * p4 * p5)


def _pairs(n: int):
    return [(a, b) for a in range(n + 1) for b in range(n - a + 1)]


def _triples(n: int):
    return [(a, b, c) for a in range(n + 1) for b in range(n - a + 1)
            for c in range(n - a - b + 1)]


# ---------------------------------------------------------------------------
# Fast one-step distribution: product of per-compartment blocks.
#
# A state is encoded as a base-R integer with R = 2N + 1 and S as the most
# significant digit, so integer order is lexicographic order on the tuple and
# the encoding is linear: key(v + dv) = key(v) + key(dv) for any dv whose
# entries lie in [-N, N].


def radix(N: int) -> int:
    return 2 * N + 1


def digit_weights(N: int, width: int) -> np.ndarray:
    R = radix(N)
    return np.array([R ** (width - 1 - i) for i in range(width)], dtype=np.int64)


def encode(v, N: int) -> int:
    R = radix(N)
    key = 0
    for x in v:
        key = key * R + x
    return key


def decode(key: int, N: int, width: int) -> Tuple[int, ...]:
    R = radix(N)
    out = [0] * width
    for i in range(width - 1, -1, -1):
        key, out[i] = divmod(key, R)
    return tuple(out)


def decode_many(keys: np.ndarray, N: int, width: int) -> np.ndarray:
    R = radix(N)
    keys = np.asarray(keys, dtype=np.int64).copy()
    out = np.empty((len(keys), width), dtype=np.int64)
    for i in range(width - 1, -1, -1):
        out[:, i] = keys % R
        keys //= R
    return out


@lru_cache(maxsize=None)
def _asymptomatic_block(A: int, negatives: int, t: int, params: Parameters):
    v = State(S=negatives, A=A, I=0, R=0, O=0, D=params.N - A - negatives)
    out = []
    for d2 in range(A + 1):
        for d3 in range(A - d2 + 1):
            if t == 0:
                p = rho(d2, d3, v, params)
                if p > 0.0:
                    out.append(((d2, d3, 0), p))
                continue
            for d9 in range(min(t, A - d2 - d3) + 1):
                p = rho_e(d2, d3, d9, v, t, params)
                if p > 0.0:
                    out.append(((d2, d3, d9), p))
    return tuple(out)


@lru_cache(maxsize=None)
def _symptomatic_block(I: int, free: int, params: Parameters):
    v = SimpleState(S=0, A=0, I=I, R=0, O=params.C - free, D=0)
    out = []
    for d4, d5, d6 in _triples(I):
        if d5 > free:
            continue
        p = phi(d4, d5, d6, v, params)
        if p > 0.0:
            out.append(((d4, d5, d6), p))
    return tuple(out)


@lru_cache(maxsize=None)
def _pair_block(n: int, p_first: float, p_second: float):
    rest = max(0.0, 1.0 - math.fsum((p_first, p_second)))
    out = []
    for a, b in _pairs(n):
        p = multinom(n, (a, b)) * p_first**a * p_second**b * rest ** (n - a - b)
        if p > 0.0:
            out.append(((a, b), p))
    return tuple(out)


class _Blocks:
    """Per-compartment outflow tables as (delta-key, probability) arrays."""

    def __init__(self, N: int, width: int):
        self.N = N
        self.width = width
        self.w = digit_weights(N, width)
        self.idx = {c: i for i, c in enumerate(COMPARTMENTS[:width])}
        self._cache: Dict[tuple, Tuple[np.ndarray, np.ndarray]] = {}

    def key(self, **moves: int) -> int:
        return int(sum(self.w[self.idx[c]] * n for c, n in moves.items()))

    def table(self, tag, rows) -> Tuple[np.ndarray, np.ndarray]:
        hit = self._cache.get(tag)
        if hit is None:
            keys = np.fromiter((k for k, _ in rows), dtype=np.int64, count=len(rows))
            probs = np.fromiter((p for _, p in rows), dtype=np.float64, count=len(rows))
            hit = self._cache[tag] = (keys, probs)
        return hit


def _convolve(keys_a, probs_a, keys_b, probs_b):
    if len(keys_b) == 1:
        return keys_a + keys_b[0], probs_a * probs_b[0]
    keys = (keys_a[:, None] + keys_b[None, :]).ravel()
    probs = (probs_a[:, None] * probs_b[None, :]).ravel()
    uniq, inv = np.unique(keys, return_inverse=True)
    return uniq, np.bincount(inv, weights=probs, minlength=len(uniq))


_BLOCKS: Dict[Tuple[int, int, Parameters], _Blocks] = {}


def _blocks_for(params: Parameters, width: int) -> _Blocks:
    b = _BLOCKS.get((width, params))
    if b is None:
        b = _BLOCKS[(width, params)] = _Blocks(params.N, width)
    return b


def row_keys(v, action: Action, params: Parameters, simplified: bool = False
             ) -> Tuple[np.ndarray, np.ndarray]:
    """Encoded successor states of ``v`` and their probabilities.

    Keys are sorted ascending (canonical state order) and the probabilities
    are checked to sum to one before being returned.
    """
    width = 6 if simplified else 8
    B = _blocks_for(params, width)
    p = params
    pg = infection_probability(v, action.M, params)

    s_tag = ("S", v.S, pg)
    if s_tag not in B._cache:
        rows = [(B.key(S=-d1, A=d1), binomial_pmf(v.S, pg, d1)) for d1 in range(v.S + 1)]
        B.table(s_tag, [r for r in rows if r[1] > 0.0])
    keys, probs = B._cache[s_tag]

    if simplified:
        a_rows = (((d2, d3, 0), pr) for (d2, d3, _), pr in _asymptomatic_block(v.A, 0, 0, p))
        a_tag = ("A6", v.A)
        ak = lambda d2, d3, d9: B.key(A=-(d2 + d3), I=d2, R=d3)
    else:
        a_rows = _asymptomatic_block(v.A, v.S + v.Ra, action.t, p)
        a_tag = ("A8", v.A, v.S + v.Ra, action.t)
        ak = lambda d2, d3, d9: B.key(A=-(d2 + d3 + d9), I=d2, Ra=d3, Q=d9)
    if a_tag not in B._cache:
        B.table(a_tag, [(ak(*f), pr) for f, pr in a_rows])
    keys, probs = _convolve(keys, probs, *B._cache[a_tag])

    free = p.C - v.O
    i_tag = ("I", v.I, free)
    if i_tag not in B._cache:
        B.table(i_tag, [(B.key(I=-(d4 + d5 + d6), R=d4, O=d5, D=d6), pr)
                        for (d4, d5, d6), pr in _symptomatic_block(v.I, free, p)])
    keys, probs = _convolve(keys, probs, *B._cache[i_tag])

    o_tag = ("O", v.O)
    if o_tag not in B._cache:
        B.table(o_tag, [(B.key(O=-(d7 + d8), D=d7, R=d8), pr)
                        for (d7, d8), pr in _pair_block(v.O, p.sigma, p.xi)])
    keys, probs = _convolve(keys, probs, *B._cache[o_tag])

    if not simplified and v.Q:
        q_tag = ("Q", v.Q)
        if q_tag not in B._cache:
            B.table(q_tag, [(B.key(Q=-(d10 + d11), I=d10, R=d11), pr)
                            for (d10, d11), pr in _pair_block(v.Q, p.iota, p.upsilon)])
        keys, probs = _convolve(keys, probs, *B._cache[q_tag])

    keys = keys + encode(v, params.N)
    nz = probs > 0.0
    keys, probs = keys[nz], probs[nz]
    return keys, normalize(probs, context=v)


def normalize(probs: np.ndarray, context=None) -> np.ndarray:
    """Renormalize a row whose mass is within :data:`NORMALIZATION_TOL` of one."""
    total = math.fsum(probs)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise NormalizationError(f"row mass {total!r} deviates from 1 (state {context})")
    return probs / total


def transition_distribution(v: State, action: Action, params: Parameters
                            ) -> Dict[State, float]:
    """One-step successor distribution of the full model."""
    v = State(*v)
    check_state(v, params)
    check_action(v, action)
    keys, probs = row_keys(v, action, params)
    return {State(*decode(int(k), params.N, 8)): float(p) for k, p in zip(keys, probs)}


def simplified_transition_distribution(v: SimpleState, action: Action,
                                       params: Parameters) -> Dict[SimpleState, float]:
    """One-step successor distribution of the untested six-compartment model.

    Asymptomatic recoveries land in R, which here also stands for Ra.
    """
    v = SimpleState(*v)
    if action.t != 0:
        raise ValueError("the untested model admits t = 0 only")
    check_state(v, params)
    keys, probs = row_keys(v, action, params, simplified=True)
    return {SimpleState(*decode(int(k), params.N, 6)): float(p)
            for k, p in zip(keys, probs)}


def simplified_transition_probability(v: SimpleState, v2: SimpleState, M: int,
                                      params: Parameters) -> float:
    """Nested-sum probability of one transition in the untested model.

    With no quarantine the asymptomatic recoveries are fixed by the A
    balance once ``d2`` is chosen, ``d6`` by the I balance and the hospital
    flows by the D and O balances.
    """
    v, v2 = SimpleState(*v), SimpleState(*v2)
    check_state(v, params)
    check_state(v2, params)
    dS, dA, dI, dR, dO, dD = (b - a for a, b in zip(v, v2))
    p1 = binomial_pmf(v.S, infection_probability(v, M, params), -dS)
    if p1 == 0.0:
        return 0.0
    total = 0.0
    for d2 in range(-dS - dA + 1):
        p2 = rho(d2, -dS - dA - d2, v, params)
        if p2 == 0.0:
            continue
        for d4 in range(d2 - dI + 1):
            for d5 in range(d2 - dI - d4 + 1):
                d6 = d2 - dI - d4 - d5
                p3 = phi(d4, d5, d6, v, params)
                if p3 == 0.0:
                    continue
                total += p2 * p3 * zeta(dD + dI - d2 + d4 + d5,
                                        d2 - d4 - dD - dI - dO, v, params)
    return p1 * total


def merge_recovered(v: State) -> SimpleState:
    """Project a full state with Q = 0 onto the untested model."""
    if v.Q:
        raise ValueError(f"{v} has quarantined subjects")
    return SimpleState(v.S, v.A, v.I, v.R + v.Ra, v.O, v.D)


def compositions(N: int, width: int):
    """All tuples of ``width`` non-negative integers summing to ``N``, lexicographic."""
    if width == 1:
        yield (N,)
        return
    for first in range(N + 1):
        for rest in compositions(N - first, width - 1):
            yield (first,) + rest
