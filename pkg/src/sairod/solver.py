"""Transient and limiting analysis of a DTMC by repeated vector-matrix products."""

from __future__ import annotations

import logging
import math
from typing import Callable, Iterable, List, NamedTuple, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .model import COMPARTMENTS
from .statespace import DTMC, StateSpace

log = logging.getLogger(__name__)

MASS_TOL = 1e-9


class Convergence(NamedTuple):
    dist: np.ndarray
    iterations: int
    converged: bool


def initial_distribution(space: StateSpace, weighted: Iterable[Tuple[Sequence[int], float]]
                         ) -> np.ndarray:
    dist = np.zeros(len(space))
    for v, w in weighted:
        dist[space.rank(tuple(v))] += w
    if abs(dist.sum() - 1.0) > MASS_TOL or np.any(dist < 0):
        raise ValueError(f"initial weights must be non-negative and sum to 1, got {dist.sum()}")
    return dist


def step(dtmc: DTMC, dist: np.ndarray) -> np.ndarray:
    if dist.shape != (len(dtmc),):
        raise ValueError(f"distribution of length {dist.shape} for a chain of {len(dtmc)} states")
    out = dtmc.P.T @ dist
    if abs(out.sum() - 1.0) > MASS_TOL:
        raise ArithmeticError(f"mass {out.sum()!r} after one step")
    return out


def converge(dtmc: DTMC, dist0: np.ndarray, tol: float = 1e-9,
             max_iter: int = 10_000) -> Convergence:
    """Iterate until the L1 change of one step drops below ``tol``.

    With several absorbing states the limit depends on ``dist0``; this is
    the limit reached from that particular start.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    dist = np.asarray(dist0, dtype=float)
    PT = dtmc.P.T.tocsr()
    for k in range(max_iter):
        nxt = PT @ dist
        change = np.abs(nxt - dist).sum()
        if change < tol:
            return Convergence(dist, k, True)
        dist = nxt
    log.warning("no convergence after %d iterations (tol=%g)", max_iter, tol)
    return Convergence(dist, max_iter, False)


def predicate_mask(space: StateSpace, predicate: Callable) -> np.ndarray:
    """Evaluate ``predicate`` on every state; vectorized over compartment columns."""
    mask = predicate(space.columns())
    mask = np.broadcast_to(np.asarray(mask, dtype=bool), (len(space),))
    return mask


def query_probability(dist: np.ndarray, space: StateSpace, predicate: Callable) -> float:
    return float(math.fsum(dist[predicate_mask(space, predicate)]))


def deaths_at_least(frac: float, N: int) -> Callable:
    """Predicate ``D >= frac * N``, the benchmark event for excess mortality."""
    bound = frac * N
    return lambda v: v.D >= bound - 1e-9


def query_series(dtmc: DTMC, dist0: np.ndarray, predicates: Sequence[Callable],
                 steps: int) -> np.ndarray:
    """Values of each predicate at iterations 0..steps, shape (steps + 1, len(predicates))."""
    masks = [predicate_mask(dtmc.space, p) for p in predicates]
    PT = dtmc.P.T.tocsr()
    out = np.empty((steps + 1, len(masks)))
    dist = np.asarray(dist0, dtype=float)
    for k in range(steps + 1):
        out[k] = [dist[m].sum() for m in masks]
        if k < steps:
            dist = PT @ dist
    return out


def marginal_cdf(dist: np.ndarray, space: StateSpace, compartment: str) -> np.ndarray:
    """CDF of one compartment's count over 0..N."""
    col = space.array[:, space_columns(space).index(compartment)]
    pmf = np.bincount(col, weights=dist, minlength=space.N + 1)
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0 if abs(cdf[-1] - 1.0) <= MASS_TOL else cdf[-1]
    return cdf


def space_columns(space: StateSpace) -> List[str]:
    return list(COMPARTMENTS[: space.width])


def expected_action(dist: np.ndarray, dtmc: DTMC) -> float:
    """Mean number of meetings, sum over states of M(v) * Pr{v}."""
    return float(dist @ dtmc.choice[:, 0])


def expected_action_series(dtmc: DTMC, dist0: np.ndarray, steps: int) -> np.ndarray:
    PT = dtmc.P.T.tocsr()
    out = np.empty(steps + 1)
    dist = np.asarray(dist0, dtype=float)
    for k in range(steps + 1):
        out[k] = dist @ dtmc.choice[:, 0]
        if k < steps:
            dist = PT @ dist
    return out


# ---------------------------------------------------------------------------
# Reachability.  These are the only path queries answered natively; anything
# richer goes through the explicit-state export.


def reach_probability(dtmc: DTMC, target: np.ndarray, tol: float = 1e-12,
                      max_iter: int = 100_000) -> np.ndarray:
    """Per-state probability of eventually visiting a ``target`` state.

    States that cannot reach the target by any path are fixed at 0 first, so
    value iteration converges from below on the rest.
    """
    target = np.asarray(target, dtype=bool)
    can = _backward_reachable(dtmc.P, target)
    x = target.astype(float)
    free = can & ~target
    P = dtmc.P.tocsr()
    for _ in range(max_iter):
        nxt = np.where(free, P @ x, x)
        if np.abs(nxt - x).max() < tol:
            return nxt
        x = nxt
    log.warning("reachability did not converge in %d iterations", max_iter)
    return x


def _backward_reachable(P: sp.csr_matrix, target: np.ndarray) -> np.ndarray:
    PT = P.T.tocsr()
    seen = target.copy()
    frontier = np.flatnonzero(target)
    while len(frontier):
        preds = np.unique(PT[frontier].indices)
        preds = preds[~seen[preds]]
        seen[preds] = True
        frontier = preds
    return seen


def bottom_components(dtmc: DTMC) -> Tuple[np.ndarray, np.ndarray]:
    """Strongly connected component label per state and a per-label bottom flag."""
    P = dtmc.P
    n, labels = connected_components(P, directed=True, connection="strong")
    coo = P.tocoo()
    leaves = labels[coo.row] != labels[coo.col]
    bottom = np.ones(n, dtype=bool)
    bottom[np.unique(labels[coo.row[leaves]])] = False
    return labels, bottom


def infinitely_often_probability(dtmc: DTMC, phi: np.ndarray) -> np.ndarray:
    """Per-state probability that ``phi`` holds infinitely often.

    In a finite chain this is the probability of ending in a bottom
    component that contains a ``phi`` state.
    """
    labels, bottom = bottom_components(dtmc)
    good_labels = np.zeros(len(bottom), dtype=bool)
    good_labels[np.unique(labels[np.asarray(phi, dtype=bool)])] = True
    target = bottom[labels] & good_labels[labels]
    return reach_probability(dtmc, target)
