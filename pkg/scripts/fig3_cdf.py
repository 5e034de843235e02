"""Limit marginal CDFs of D, R and S from the third initial state for M = 1..5, C = 5."""

from _common import FIG2_INIT, parser, save, setup
from sairod.model import Parameters
from sairod.policy import constant_policy
from sairod.solver import converge, initial_distribution, marginal_cdf
from sairod.statespace import build_dtmc


def main():
    args = parser(__doc__, "out/fig3").parse_args()
    out = setup(args)
    p = Parameters.paper(N=20, C=5)
    s = FIG2_INIT["IS3"]
    cols = {}
    for M in range(1, 6):
        d = build_dtmc([s], constant_policy(M), p, "simplified")
        dist = converge(d, initial_distribution(d.space, [(s, 1.0)])).dist
        for c in ("D", "R", "S"):
            cols[f"{c}_M{M}"] = marginal_cdf(dist, d.space, c)
        del d
    rows = [["count"] + list(cols)]
    rows += [[x] + [float(v[x]) for v in cols.values()] for x in range(p.N + 1)]
    save(out, "cdf.csv", rows)


if __name__ == "__main__":
    main()
