"""Command line entry point.

Exit codes: 0 success, 1 configuration error, 2 numeric or invariant
failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import config as config_mod
from .export import default_labels, export_explicit, import_explicit, roundtrip_check
from .experiment import policy_dtmc, run_experiment
from .model import NormalizationError
from .solver import converge, initial_distribution, query_probability
from .statespace import BudgetExceeded, build_reachable, save_table

log = logging.getLogger("sairod")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


def _load(args) -> config_mod.ExperimentConfig:
    cfg = config_mod.load(args.config)
    if args.tol is not None:
        if args.tol <= 0:
            raise config_mod.ConfigError("--tol must be positive")
        cfg.tol = args.tol
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def _out(args, cfg) -> str:
    out = args.out or cfg.output
    os.makedirs(out, exist_ok=True)
    return out


def cmd_build(args) -> int:
    cfg = _load(args)
    out = _out(args, cfg)
    space, table = build_reachable([s for s, _ in cfg.initial], cfg.actions, cfg.params, cfg.model)
    save_table(table, os.path.join(out, "table"))
    print(f"{len(space)} states, {len(cfg.actions)} actions -> {out}/table")
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = _load(args)
    written = run_experiment(cfg, _out(args, cfg), args.seed, what="solve")
    for name, path in written.items():
        print(f"{name}: {path}")
    return EXIT_OK


def cmd_policy_eval(args) -> int:
    cfg = _load(args)
    cfg.sweep = None
    written = run_experiment(cfg, _out(args, cfg), args.seed, what="solve")
    for name, path in written.items():
        print(f"{name}: {path}")
    return EXIT_OK


def cmd_mc(args) -> int:
    cfg = _load(args)
    mc = dict(cfg.montecarlo or {})
    for key in ("runs", "depth", "scale"):
        val = getattr(args, key)
        if val is not None:
            mc[key] = val
    cfg.montecarlo = mc
    written = run_experiment(cfg, _out(args, cfg), args.seed, what="mc")
    for name, path in written.items():
        print(f"{name}: {path}")
    return EXIT_OK


def _labels(cfg):
    fracs = [q.frac for q in cfg.queries if q.compartment == "D" and q.frac is not None]
    return default_labels(cfg.params, fracs or (0.2,))


def _init_indices(cfg, space):
    if cfg.export.get("init", "all") == "all":
        return None
    return [space.rank(s) for s, _ in cfg.initial]


def cmd_export(args) -> int:
    cfg = _load(args)
    out = _out(args, cfg)
    base = os.path.join(out, args.name)
    if args.mdp:
        space, model = build_reachable([s for s, _ in cfg.initial], cfg.actions, cfg.params,
                                       cfg.model)
    else:
        model = policy_dtmc(cfg)
        space = model.space
    paths = export_explicit(model, base, _labels(cfg), _init_indices(cfg, space))
    print("\n".join(paths))
    return EXIT_OK


def cmd_roundtrip(args) -> int:
    cfg = _load(args)
    out = _out(args, cfg)
    dtmc = policy_dtmc(cfg)
    base = os.path.join(out, args.name)
    same = roundtrip_check(dtmc, base, _labels(cfg))
    back = import_explicit(base, cfg.params, cfg.model)
    x0 = initial_distribution(dtmc.space, cfg.initial)
    a = converge(dtmc, x0, cfg.tol, cfg.max_iter).dist
    b = converge(back, x0, cfg.tol, cfg.max_iter).dist
    worst = 0.0
    for q in cfg.queries:
        pa = query_probability(a, dtmc.space, q.predicate(cfg.params.N))
        pb = query_probability(b, back.space, q.predicate(cfg.params.N))
        worst = max(worst, abs(pa - pb))
        print(f"{q.name}: {pa:.17g} vs {pb:.17g}")
    print(f"byte-identical re-export: {same}; max query difference {worst:.3g}")
    return EXIT_OK if same and worst <= 1e-12 else EXIT_NUMERIC


COMMANDS = {
    "build": (cmd_build, "enumerate the reachable space under all configured actions"),
    "solve": (cmd_solve, "limit sweep or policy evaluation, as the config says"),
    "policy-eval": (cmd_policy_eval, "series, limits and CDFs under the configured policy"),
    "mc": (cmd_mc, "Monte Carlo simulation"),
    "export": (cmd_export, "write explicit-state .sta/.tra/.lab files"),
    "roundtrip-check": (cmd_roundtrip, "export, re-import, re-solve and compare"),
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sairod", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (fn, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", "-c", required=True, help="YAML experiment config")
        p.add_argument("--out", "-o", default=None, help="output directory (overrides config)")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.add_argument("--tol", type=float, default=None, help="convergence tolerance override")
        if name == "mc":
            p.add_argument("--runs", type=int, default=None)
            p.add_argument("--depth", type=int, default=None)
            p.add_argument("--scale", type=int, default=None, help="population scaling factor")
        if name in ("export", "roundtrip-check"):
            p.add_argument("--name", default="model", help="base name of the exported files")
        if name == "export":
            p.add_argument("--mdp", action="store_true", help="export every action, not the policy")
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except config_mod.ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (NormalizationError, BudgetExceeded, ArithmeticError, ValueError, KeyError) as e:
        print(f"numeric/invariant failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
