"""State enumeration, reachability and the sparse transition table.

States are stored by their integer encoding (see :func:`sairod.model.encode`),
sorted ascending, which is lexicographic order on the compartment tuple.
A state's index is its position in that sorted array.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .model import (COMPARTMENTS, SIMPLE_COMPARTMENTS, Action, Parameters,
                    SimpleState, State, check_action, check_state, compositions,
                    decode_many, encode, row_keys, testing_pool)

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 2_000_000
MODEL_KINDS = ("full", "simplified")


class BudgetExceeded(RuntimeError):
    def __init__(self, count: int, budget: int):
        super().__init__(f"{count} states exceed the budget of {budget}")
        self.count = count
        self.budget = budget


def state_count(n: int, N: int) -> int:
    """Number of ways to spread ``N`` subjects over ``n`` compartments."""
    if n < 1 or N < 0:
        raise ValueError(f"need n >= 1 and N >= 0, got n={n}, N={N}")
    return comb(N + n - 1, n - 1)


def width_of(model: str) -> int:
    if model not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {model!r}")
    return 8 if model == "full" else 6


def state_type(model: str):
    return State if width_of(model) == 8 else SimpleState


@dataclass
class StateSpace:
    params: Parameters
    model: str
    keys: np.ndarray
    actions: List[Action] = field(default_factory=list)

    def __post_init__(self):
        self.keys = np.asarray(self.keys, dtype=np.int64)
        if len(self.keys) > 1 and not np.all(np.diff(self.keys) > 0):
            raise ValueError("state keys must be strictly increasing")
        self._array = None

    @property
    def width(self) -> int:
        return width_of(self.model)

    @property
    def N(self) -> int:
        return self.params.N

    def __len__(self) -> int:
        return len(self.keys)

    def __iter__(self):
        T = state_type(self.model)
        for row in self.array.tolist():
            yield T(*row)

    def __contains__(self, v) -> bool:
        k = encode(v, self.N)
        i = np.searchsorted(self.keys, k)
        return i < len(self.keys) and self.keys[i] == k

    @property
    def array(self) -> np.ndarray:
        """States as an ``(n, width)`` integer array in index order."""
        if self._array is None:
            self._array = decode_many(self.keys, self.N, self.width)
        return self._array

    def columns(self):
        """The state tuple type holding one column array per compartment.

        Lets scalar predicates such as ``lambda v: v.D >= 4`` run vectorized.
        """
        return state_type(self.model)(*self.array.T)

    def rank(self, v) -> int:
        if len(v) != self.width:
            raise KeyError(f"{v} has the wrong width for a {self.model} space")
        k = encode(v, self.N)
        i = int(np.searchsorted(self.keys, k))
        if i >= len(self.keys) or self.keys[i] != k:
            raise KeyError(f"{v} is not in the state space")
        return i

    def unrank(self, i: int):
        if not 0 <= i < len(self.keys):
            raise IndexError(f"state index {i} out of range [0, {len(self.keys)})")
        return state_type(self.model)(*self.array[i].tolist())

    def ranks(self, keys: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.keys, keys)
        if np.any(idx >= len(self.keys)) or np.any(self.keys[np.minimum(idx, len(self.keys) - 1)] != keys):
            raise KeyError("successor outside the state space")
        return idx


@dataclass
class TransitionTable:
    """MDP rows: one CSR matrix per action; inadmissible rows are empty."""

    space: StateSpace
    actions: List[Action]
    matrices: List[sp.csr_matrix]
    admissible: np.ndarray

    def row(self, i: int, a: int):
        m = self.matrices[a]
        lo, hi = m.indptr[i], m.indptr[i + 1]
        return m.indices[lo:hi], m.data[lo:hi]


@dataclass
class DTMC:
    """A single-action-per-state chain; ``choice`` records the (M, t) used per row."""

    space: StateSpace
    P: sp.csr_matrix
    choice: np.ndarray

    def __len__(self) -> int:
        return self.P.shape[0]


def enumerate_all(params: Parameters, model: str = "full",
                  budget: int = DEFAULT_BUDGET) -> StateSpace:
    """Every state with the right population and O <= C, in canonical order."""
    width = width_of(model)
    bound = state_count(width, params.N)
    if bound > budget:
        raise BudgetExceeded(bound, budget)
    o = COMPARTMENTS.index("O")
    keys = [encode(v, params.N) for v in compositions(params.N, width) if v[o] <= params.C]
    return StateSpace(params, model, np.array(keys, dtype=np.int64))


def default_actions(m_low: int = 1, m_high: int = 5) -> List[Action]:
    return [Action(M, 0) for M in range(m_low, m_high + 1)]


def admissible(v, action: Action, model: str) -> bool:
    if model == "simplified":
        return action.t == 0
    return action.t <= testing_pool(v)


def _rows_for(v, action, params, model):
    if model == "full":
        check_action(v, action)
    elif action.t:
        raise ValueError("the untested model admits t = 0 only")
    return row_keys(v, action, params, simplified=(model == "simplified"))


def _explore(initial, params: Parameters, model: str, chooser, budget: int):
    """Breadth-first closure; ``chooser(v)`` gives the actions to expand."""
    T = state_type(model)
    init = []
    for v in initial:
        v = T(*v)
        check_state(v, params)
        init.append(encode(v, params.N))
    seen = np.unique(np.array(init, dtype=np.int64))
    level = seen
    rows = {}
    width = width_of(model)
    while len(level):
        found = []
        for k in level.tolist():
            v = T(*decode_many(np.array([k]), params.N, width)[0].tolist())
            out = []
            for a in chooser(v):
                keys, probs = _rows_for(v, a, params, model)
                out.append((a, keys, probs))
                found.append(keys)
            rows[k] = out
        new = np.setdiff1d(np.unique(np.concatenate(found)), seen, assume_unique=True)
        seen = np.union1d(seen, new)
        if len(seen) > budget:
            raise BudgetExceeded(len(seen), budget)
        level = new
        log.debug("explored level: %d new states, %d total", len(new), len(seen))
    return seen, rows


def _csr(space: StateSpace, parts):
    """Assemble a CSR matrix from per-row (keys, probs) in index order."""
    n = len(space)
    indptr = np.zeros(n + 1, dtype=np.int64)
    for i, (keys, _) in enumerate(parts):
        indptr[i + 1] = indptr[i] + len(keys)
    if parts:
        cols = space.ranks(np.concatenate([k for k, _ in parts]))
        data = np.concatenate([p for _, p in parts])
    else:
        cols = np.zeros(0, dtype=np.int64)
        data = np.zeros(0)
    idx_dtype = np.int32 if n < 2**31 else np.int64
    return sp.csr_matrix((data, cols.astype(idx_dtype), indptr), shape=(n, n))


_EMPTY = (np.zeros(0, dtype=np.int64), np.zeros(0))


def build_reachable(initial: Iterable, actions: Sequence[Action], params: Parameters,
                    model: str = "full",
                    is_admissible: Optional[Callable] = None,
                    budget: int = DEFAULT_BUDGET):
    """Close ``initial`` under every admissible action; return (space, table).

    ``is_admissible(v, action)`` defaults to ``t <= A + S + Ra`` for the full
    model and ``t == 0`` for the untested one.
    """
    actions = list(actions)
    if not actions:
        raise ValueError("empty action set")
    pred = is_admissible or (lambda v, a: admissible(v, a, model))

    def chooser(v):
        chosen = [a for a in actions if pred(v, a)]
        if not chosen:
            raise ValueError(f"no admissible action in {v}")
        return chosen

    keys, rows = _explore(initial, params, model, chooser, budget)
    space = StateSpace(params, model, keys, actions)
    adm = np.zeros((len(space), len(actions)), dtype=bool)
    per_action = [[] for _ in actions]
    pos = {a: j for j, a in enumerate(actions)}
    for i, k in enumerate(keys.tolist()):
        got = {a: (kk, pp) for a, kk, pp in rows[k]}
        for a, j in pos.items():
            if a in got:
                adm[i, j] = True
                per_action[j].append(got[a])
            else:
                per_action[j].append(_EMPTY)
    rows.clear()
    mats = [_csr(space, parts) for parts in per_action]
    return space, TransitionTable(space, actions, mats, adm)


def build_dtmc(initial: Iterable, policy: Callable, params: Parameters,
               model: str = "full", budget: int = DEFAULT_BUDGET) -> DTMC:
    """Reachable chain under ``policy``, computing only the chosen action per state."""
    keys, rows = _explore(initial, params, model, lambda v: [policy(v)], budget)
    space = StateSpace(params, model, keys)
    parts, choice = [], np.zeros((len(space), 2), dtype=np.float64)
    for i, k in enumerate(keys.tolist()):
        a, kk, pp = rows[k][0]
        choice[i] = a
        parts.append((kk, pp))
    rows.clear()
    space.actions = sorted({Action(*c) for c in choice.tolist()})
    return DTMC(space, _csr(space, parts), choice)


# ---------------------------------------------------------------------------
# On-disk layout:
#   header.json      N, C, parameter vector, action list, model kind
#   states.txt       one state per line, space-separated, in index order
#   transitions.txt  "src action dst probability" with 17 significant digits


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def save_table(table: TransitionTable, directory: str) -> None:
    space = table.space
    os.makedirs(directory, exist_ok=True)
    header = {
        "model": space.model,
        "N": space.params.N,
        "C": space.params.C,
        "parameters": space.params.__dict__,
        "actions": [list(a) for a in table.actions],
        "states": len(space),
    }
    _atomic_write(os.path.join(directory, "header.json"), json.dumps(header, indent=2) + "\n")
    _atomic_write(os.path.join(directory, "states.txt"),
                  "".join(" ".join(map(str, row)) + "\n" for row in space.array.tolist()))
    lines = []
    for i in range(len(space)):
        for j in range(len(table.actions)):
            cols, data = table.row(i, j)
            lines.extend(f"{i} {j} {c} {p:.17g}\n" for c, p in zip(cols.tolist(), data.tolist()))
    _atomic_write(os.path.join(directory, "transitions.txt"), "".join(lines))


def load_table(directory: str) -> TransitionTable:
    with open(os.path.join(directory, "header.json")) as fh:
        header = json.load(fh)
    params = Parameters(**header["parameters"])
    model = header["model"]
    states = np.loadtxt(os.path.join(directory, "states.txt"), dtype=np.int64, ndmin=2)
    keys = np.array([encode(r, params.N) for r in states.tolist()], dtype=np.int64)
    actions = [Action(*a) for a in header["actions"]]
    space = StateSpace(params, model, keys, actions)
    n = len(space)
    raw = np.loadtxt(os.path.join(directory, "transitions.txt"), ndmin=2)
    mats, adm = [], np.zeros((n, len(actions)), dtype=bool)
    for j in range(len(actions)):
        sel = raw[raw[:, 1] == j] if len(raw) else raw
        src = sel[:, 0].astype(np.int64)
        mats.append(sp.csr_matrix((sel[:, 3], (src, sel[:, 2].astype(np.int64))), shape=(n, n)))
        adm[np.unique(src), j] = True
    return TransitionTable(space, actions, mats, adm)
