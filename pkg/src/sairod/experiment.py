"""Experiment driver: build, apply a policy, solve, simulate, write CSV."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import platform
import time
from typing import Dict, List, Optional

import numpy as np
import scipy

from . import __version__
from .config import ExperimentConfig
from .montecarlo import McConfig, run as run_mc
from .solver import (converge, expected_action_series, initial_distribution,
                     marginal_cdf, query_probability, query_series)
from .statespace import DTMC, _atomic_write, build_dtmc

log = logging.getLogger(__name__)


def write_csv(path: str, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow([f"{x:.17g}" if isinstance(x, float) else x for x in row])
    _atomic_write(path, buf.getvalue())


def policy_dtmc(cfg: ExperimentConfig, params=None, policy=None) -> DTMC:
    params = params or cfg.params
    policy = policy or cfg.make_policy(params)
    return build_dtmc([s for s, _ in cfg.initial], policy, params, cfg.model)


def limit_sweep(cfg: ExperimentConfig) -> List[list]:
    """Limit value of every query for each (C, M) of a constant-policy sweep."""
    Ms = cfg.sweep.get("M", [1, 2, 3, 4, 5])
    Cs = cfg.sweep.get("C", [cfg.params.C])
    header = ["C", "M"] + [q.name for q in cfg.queries] + ["iterations", "converged"]
    rows = [header]
    for C in Cs:
        params = cfg.params.with_(C=int(C))
        for M in Ms:
            from .policy import constant_policy
            dtmc = policy_dtmc(cfg, params, constant_policy(int(M)))
            x0 = initial_distribution(dtmc.space, cfg.initial)
            res = converge(dtmc, x0, cfg.tol, cfg.max_iter)
            vals = [query_probability(res.dist, dtmc.space, q.predicate(params.N))
                    for q in cfg.queries]
            rows.append([int(C), int(M)] + vals + [res.iterations, res.converged])
            log.info("C=%s M=%s -> %s", C, M, vals)
            del dtmc
    return rows


def evaluate_policy(cfg: ExperimentConfig) -> Dict[str, List[list]]:
    """Transient series, limit values and marginal CDFs under the configured policy."""
    dtmc = policy_dtmc(cfg)
    N = cfg.params.N
    x0 = initial_distribution(dtmc.space, cfg.initial)
    preds = [q.predicate(N) for q in cfg.queries]
    series = query_series(dtmc, x0, preds, cfg.steps)
    mean_M = expected_action_series(dtmc, x0, cfg.steps)
    out = {}
    rows = [["iteration"] + [q.name for q in cfg.queries] + ["mean_M"]]
    for k in range(cfg.steps + 1):
        rows.append([k] + series[k].tolist() + [float(mean_M[k])])
    out["series"] = rows

    res = converge(dtmc, x0, cfg.tol, cfg.max_iter)
    lim = [["query", "limit", "iterations", "converged"]]
    for q, p in zip(cfg.queries, preds):
        lim.append([q.name, query_probability(res.dist, dtmc.space, p), res.iterations,
                    res.converged])
    out["limit"] = lim
    for c in cfg.cdf:
        cdf = marginal_cdf(res.dist, dtmc.space, c)
        out[f"cdf_{c}"] = [[c, "cdf"]] + [[i, float(v)] for i, v in enumerate(cdf)]
    out["_states"] = len(dtmc.space)
    return out


def montecarlo(cfg: ExperimentConfig, seed: Optional[int] = None):
    mc = dict(cfg.montecarlo or {})
    scale = int(mc.get("scale", 1))
    params = cfg.params.with_(N=cfg.params.N * scale, C=cfg.params.C * scale)
    initial = [(tuple(x * scale for x in s), w) for s, w in cfg.initial]
    policy = cfg.make_policy(params, scale)
    mcc = McConfig(params, initial, policy,
                   runs=int(mc.get("runs", 1000)), depth=int(mc.get("depth", 100)),
                   seed=int(seed if seed is not None else mc.get("seed", cfg.seed)),
                   model=cfg.model, real_population=mc.get("real_population"),
                   death_fracs=[q.frac for q in cfg.queries
                                if q.compartment == "D" and q.frac is not None] or [0.2])
    return run_mc(mcc)


def run_experiment(cfg: ExperimentConfig, out_dir: Optional[str] = None,
                   seed: Optional[int] = None, what: str = "all") -> Dict[str, str]:
    """Run the configured pipeline and write its outputs; return name -> path.

    ``what`` restricts the run to ``solve`` (sweep or policy evaluation) or
    ``mc``.
    """
    out_dir = out_dir or cfg.output
    os.makedirs(out_dir, exist_ok=True)
    written: Dict[str, str] = {}
    timings: Dict[str, float] = {}
    extra: Dict[str, object] = {}

    if what in ("all", "solve"):
        t0 = time.perf_counter()
        if cfg.sweep:
            path = os.path.join(out_dir, "sweep.csv")
            write_csv(path, limit_sweep(cfg))
            written["sweep"] = path
        else:
            res = evaluate_policy(cfg)
            extra["states"] = res.pop("_states")
            for name, rows in res.items():
                path = os.path.join(out_dir, f"{name}.csv")
                write_csv(path, rows)
                written[name] = path
        timings["solve"] = time.perf_counter() - t0

    if cfg.montecarlo and what in ("all", "mc"):
        t0 = time.perf_counter()
        rep = montecarlo(cfg, seed)
        path = os.path.join(out_dir, "mc.csv")
        write_csv(path, rep.csv_rows())
        written["mc"] = path
        path = os.path.join(out_dir, "mc.json")
        _atomic_write(path, rep.to_json())
        written["mc_summary"] = path
        timings["mc"] = time.perf_counter() - t0

    manifest = {
        "name": cfg.name,
        "versions": {"sairod": __version__, "numpy": np.__version__,
                     "scipy": scipy.__version__, "python": platform.python_version()},
        "seed": seed if seed is not None else cfg.seed,
        "config": cfg.raw,
        "outputs": {k: os.path.basename(v) for k, v in written.items()},
        **extra,
    }
    # timings vary run to run; kept apart so the manifest itself is reproducible
    _atomic_write(os.path.join(out_dir, "manifest.json"),
                  json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    _atomic_write(os.path.join(out_dir, "timings.json"),
                  json.dumps(timings, indent=2, sort_keys=True) + "\n")
    return written
