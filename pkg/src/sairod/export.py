"""Explicit-state files for external probabilistic model checkers.

Layout (PRISM's explicit import format, so ``prism -importmodel base.sta,tra,lab``
or ``storm --explicit base.tra base.lab`` can read it):

``base.sta``
    ``(S,A,I,R,O,D,...)`` header, then ``index:(s,a,i,...)`` per state.
``base.tra``
    DTMC: header ``states transitions``, then ``src dst prob``.
    MDP: header ``states choices transitions``, then
    ``src choice dst prob action`` where ``choice`` is local to the state
    and ``action`` is a label such as ``M2_t0``.
``base.lab``
    header ``0="init" 1="deadlock" 2="hospital_full" ...``, then
    ``index: label_ids`` for every state carrying at least one label.

Probabilities are printed with 17 significant digits, which round-trips
IEEE doubles exactly.
"""

from __future__ import annotations

import os
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from .model import COMPARTMENTS, NORMALIZATION_TOL, NormalizationError, Parameters, encode
from .solver import predicate_mask
from .statespace import DTMC, StateSpace, TransitionTable, _atomic_write, state_type

Labels = Dict[str, Union[Callable, np.ndarray]]


class ParseError(ValueError):
    def __init__(self, path: str, lineno: int, msg: str):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.path = path
        self.lineno = lineno


def default_labels(params: Parameters, death_fracs: Sequence[float] = (0.2,)) -> Labels:
    """hospital_full (O = C), deaths_ge_<frac> and all_absorbed (nobody left to move)."""
    labels: Labels = {"hospital_full": lambda v: v.O == params.C}
    for frac in death_fracs:
        bound = frac * params.N
        labels[f"deaths_ge_{frac:g}"] = lambda v, b=bound: v.D >= b - 1e-9
    labels["all_absorbed"] = lambda v: (v.A + v.I + v.O + getattr(v, "Q", 0)) == 0
    return labels


def _fmt(p: float) -> str:
    return f"{p:.17g}"


def _label_masks(space: StateSpace, labels: Labels, init: Optional[np.ndarray]
                 ) -> List[Tuple[str, np.ndarray]]:
    n = len(space)
    out = []
    init_mask = np.zeros(n, dtype=bool)
    if init is not None:
        init_mask[np.asarray(init, dtype=np.int64)] = True
    out.append(("init", init_mask))
    out.append(("deadlock", np.zeros(n, dtype=bool)))
    for name, lab in labels.items():
        if name in ("init", "deadlock"):
            raise ValueError(f"label name {name!r} is reserved")
        mask = predicate_mask(space, lab) if callable(lab) else np.asarray(lab, dtype=bool)
        out.append((name, mask))
    return out


def export_explicit(model: Union[DTMC, TransitionTable], base: str,
                    labels: Optional[Labels] = None,
                    init: Optional[Sequence[int]] = None) -> List[str]:
    """Write ``base.sta``, ``base.tra`` and ``base.lab``; return the paths.

    ``init`` lists initial state indices; when omitted every state is
    initial, which is how whole-space properties are checked.
    """
    space = model.space
    n = len(space)
    if n == 0:
        raise ValueError("cannot export an empty model")
    if labels is None:
        labels = default_labels(space.params)
    if init is None:
        init = np.arange(n)
    d = os.path.dirname(base)
    if d:
        os.makedirs(d, exist_ok=True)

    names = ",".join(COMPARTMENTS[: space.width])
    sta = [f"({names})\n"]
    sta += [f"{i}:({','.join(map(str, row))})\n" for i, row in enumerate(space.array.tolist())]

    if isinstance(model, DTMC):
        P = model.P.tocsr()
        P.sort_indices()
        tra = [f"{n} {P.nnz}\n"]
        for i in range(n):
            lo, hi = P.indptr[i], P.indptr[i + 1]
            tra += [f"{i} {j} {_fmt(p)}\n" for j, p in
                    zip(P.indices[lo:hi].tolist(), P.data[lo:hi].tolist())]
    else:
        body, choices = [], 0
        for i in range(n):
            local = 0
            for a, act in enumerate(model.actions):
                if not model.admissible[i, a]:
                    continue
                cols, data = model.row(i, a)
                order = np.argsort(cols)
                tag = f"M{act.M}_t{act.t}"
                body += [f"{i} {local} {j} {_fmt(p)} {tag}\n" for j, p in
                         zip(cols[order].tolist(), data[order].tolist())]
                local += 1
            choices += local
        tra = [f"{n} {choices} {len(body)}\n"] + body

    masks = _label_masks(space, labels, init)
    lab = [" ".join(f'{k}="{name}"' for k, (name, _) in enumerate(masks)) + "\n"]
    per_state = [[] for _ in range(n)]
    for k, (_, mask) in enumerate(masks):
        for i in np.flatnonzero(mask).tolist():
            per_state[i].append(k)
    lab += [f"{i}: {' '.join(map(str, ids))}\n" for i, ids in enumerate(per_state) if ids]

    paths = []
    for ext, lines in (("sta", sta), ("tra", tra), ("lab", lab)):
        path = f"{base}.{ext}"
        _atomic_write(path, "".join(lines))
        paths.append(path)
    return paths


def _lines(path: str):
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if line:
                yield lineno, line


def import_explicit(base: str, params: Parameters, model: str = "simplified") -> DTMC:
    """Read back a DTMC written by :func:`export_explicit`.

    Rows are checked to sum to one; a tampered file raises
    :class:`~sairod.model.NormalizationError`.
    """
    sta_path, tra_path = f"{base}.sta", f"{base}.tra"
    T = state_type(model)
    rows = []
    it = _lines(sta_path)
    try:
        next(it)
    except StopIteration:
        raise ParseError(sta_path, 1, "empty states file")
    for lineno, line in it:
        try:
            idx, tup = line.split(":", 1)
            vals = tuple(int(x) for x in tup.strip().strip("()").split(","))
        except ValueError:
            raise ParseError(sta_path, lineno, f"cannot parse state line {line!r}")
        if int(idx) != len(rows) or len(vals) != len(T._fields):
            raise ParseError(sta_path, lineno, f"unexpected state entry {line!r}")
        rows.append(vals)
    keys = np.array([encode(r, params.N) for r in rows], dtype=np.int64)
    space = StateSpace(params, model, keys)
    n = len(space)

    it = _lines(tra_path)
    try:
        lineno, head = next(it)
    except StopIteration:
        raise ParseError(tra_path, 1, "empty transitions file")
    parts = head.split()
    if len(parts) != 2 or int(parts[0]) != n:
        raise ParseError(tra_path, lineno, f"expected DTMC header '{n} <transitions>', got {head!r}")
    nnz = int(parts[1])
    src = np.empty(nnz, dtype=np.int64)
    dst = np.empty(nnz, dtype=np.int64)
    prob = np.empty(nnz)
    k = 0
    for lineno, line in it:
        f = line.split()
        if len(f) != 3 or k >= nnz:
            raise ParseError(tra_path, lineno, f"bad transition line {line!r}")
        try:
            src[k], dst[k], prob[k] = int(f[0]), int(f[1]), float(f[2])
        except ValueError:
            raise ParseError(tra_path, lineno, f"bad transition line {line!r}")
        if not (0 <= src[k] < n and 0 <= dst[k] < n):
            raise ParseError(tra_path, lineno, "state index out of range")
        k += 1
    if k != nnz:
        raise ParseError(tra_path, lineno, f"header promised {nnz} transitions, found {k}")
    P = sp.csr_matrix((prob, (src, dst)), shape=(n, n))
    sums = np.asarray(P.sum(axis=1)).ravel()
    bad = np.flatnonzero(np.abs(sums - 1.0) > NORMALIZATION_TOL)
    if len(bad):
        raise NormalizationError(f"row {bad[0]} of {tra_path} sums to {sums[bad[0]]!r}")
    return DTMC(space, P, np.full((n, 2), np.nan))


def roundtrip_check(dtmc: DTMC, base: str, labels: Optional[Labels] = None) -> bool:
    """Export, import, export again and compare the files byte for byte."""
    first = export_explicit(dtmc, base, labels)
    back = import_explicit(base, dtmc.space.params, dtmc.space.model)
    blobs = [open(p, "rb").read() for p in first]
    second = export_explicit(back, base + "_rt", labels)
    return all(open(p, "rb").read() == b for p, b in zip(second, blobs))
