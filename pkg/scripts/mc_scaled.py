"""Monte Carlo at a scaled population: N, C, initial counts and M bounds times --scale."""

import json
import os

from _common import FIG4_INIT, parser, save, setup
from sairod.model import Parameters
from sairod.montecarlo import McConfig, run, scale_setup
from sairod.policy import AdaptiveConfig, adaptive_policy, constant_policy


def factories():
    return {
        "AA": lambda f, N: adaptive_policy(AdaptiveConfig(signal="AA").scaled(f), N),
        "AS": lambda f, N: adaptive_policy(AdaptiveConfig(signal="AS").scaled(f), N),
        "M_low": lambda f, N: constant_policy(1 * f),
        "M_high": lambda f, N: constant_policy(5 * f),
    }


def main():
    ap = parser(__doc__, "out/mc_scaled")
    ap.add_argument("--scale", type=int, default=5)
    ap.add_argument("--runs", type=int, default=1000)
    ap.add_argument("--depth", type=int, default=100)
    ap.add_argument("--seed", type=int, default=2021)
    ap.add_argument("--C", type=int, default=1)
    args = ap.parse_args()
    out = setup(args)
    base = Parameters.paper(N=20, C=args.C)
    summary, rows = {}, [["policy", "P[D>0.2N]", "P[D>=0.2N]", "mean_M_final"]]
    for name, fac in factories().items():
        big, init, pol = scale_setup(args.scale, base, FIG4_INIT, fac)
        rep = run(McConfig(big, init, pol, runs=args.runs, depth=args.depth, seed=args.seed,
                           real_population=None))
        save(out, f"{name}.csv", rep.csv_rows())
        summary[name] = rep.summary()
        rows.append([name, rep.final("P[D>0.2N]"), rep.final("P[D>=0.2N]"), rep.final("mean_M")])
    save(out, "summary.csv", rows)
    with open(os.path.join(out, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
