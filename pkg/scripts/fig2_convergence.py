"""P[D_k >= 0.2N] over iterations from three initial states, M in {2, 5}, C = 5."""

from _common import FIG2_INIT, parser, save, setup
from sairod.model import Parameters
from sairod.policy import constant_policy
from sairod.solver import converge, deaths_at_least, initial_distribution, query_probability, query_series
from sairod.statespace import build_dtmc


def main():
    ap = parser(__doc__, "out/fig2")
    ap.add_argument("--steps", type=int, default=40)
    args = ap.parse_args()
    out = setup(args)
    p = Parameters.paper(N=20, C=5)
    pred = deaths_at_least(0.2, p.N)
    cols, limits = {}, [["M", "initial", "limit", "iterations"]]
    for M in (2, 5):
        d = build_dtmc(list(FIG2_INIT.values()), constant_policy(M), p, "simplified")
        for name, s in FIG2_INIT.items():
            x0 = initial_distribution(d.space, [(s, 1.0)])
            cols[f"M{M}_{name}"] = query_series(d, x0, [pred], args.steps)[:, 0]
            res = converge(d, x0)
            limits.append([M, name, query_probability(res.dist, d.space, pred), res.iterations])
        del d
    rows = [["iteration"] + list(cols)]
    rows += [[k] + [float(c[k]) for c in cols.values()] for k in range(args.steps + 1)]
    save(out, "series.csv", rows)
    save(out, "limits.csv", limits)


if __name__ == "__main__":
    main()
