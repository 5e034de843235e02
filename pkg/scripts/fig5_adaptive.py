"""Adaptive AA / AS policies against constant M = 1 and M = 5 with one bed.

Writes P[D_k >= 0.2N] and the expected M per iteration for each policy.
"""

from _common import FIG4_INIT, parser, save, setup
from sairod.model import Parameters
from sairod.policy import AdaptiveConfig, adaptive_policy, constant_policy
from sairod.solver import (converge, deaths_at_least, expected_action_series,
                           initial_distribution, query_probability, query_series)
from sairod.statespace import build_dtmc


def main():
    ap = parser(__doc__, "out/fig5")
    ap.add_argument("--steps", type=int, default=40)
    ap.add_argument("--C", type=int, default=1)
    args = ap.parse_args()
    out = setup(args)
    p = Parameters.paper(N=20, C=args.C)
    pred = deaths_at_least(0.2, p.N)
    policies = {
        "M1": constant_policy(1),
        "AA": adaptive_policy(AdaptiveConfig(0.05, 0.15, 1, 5, "AA"), p.N),
        "AS": adaptive_policy(AdaptiveConfig(0.05, 0.15, 1, 5, "AS"), p.N),
        "M5": constant_policy(5),
    }
    cols, limits = {}, [["policy", "limit", "iterations"]]
    for name, pol in policies.items():
        d = build_dtmc([s for s, _ in FIG4_INIT], pol, p, "simplified")
        x0 = initial_distribution(d.space, FIG4_INIT)
        cols[f"{name}_P"] = query_series(d, x0, [pred], args.steps)[:, 0]
        cols[f"{name}_meanM"] = expected_action_series(d, x0, args.steps)
        res = converge(d, x0)
        limits.append([name, query_probability(res.dist, d.space, pred), res.iterations])
        del d
    rows = [["iteration"] + list(cols)]
    rows += [[k] + [float(c[k]) for c in cols.values()] for k in range(args.steps + 1)]
    save(out, "series.csv", rows)
    save(out, "limits.csv", limits)


if __name__ == "__main__":
    main()
