"""N = 10 AA chain from every state: native path queries plus explicit-state export.

When ``prism`` is on PATH the exported files can be checked with, e.g.::

    prism -importmodel out/pmc_n10/model.sta,tra,lab -dtmc -pf 'P=? [ F "hospital_full" ]'
"""

import numpy as np

from _common import parser, save, setup
from sairod.export import export_explicit
from sairod.model import Parameters
from sairod.policy import AdaptiveConfig, adaptive_policy
from sairod.solver import infinitely_often_probability, predicate_mask, reach_probability
from sairod.statespace import build_dtmc, enumerate_all


def main():
    ap = parser(__doc__, "out/pmc_n10")
    ap.add_argument("--C", type=int, default=1)
    args = ap.parse_args()
    out = setup(args)
    p = Parameters.paper(N=10, C=args.C)
    d = build_dtmc(list(enumerate_all(p, "simplified")), adaptive_policy(AdaptiveConfig(), p.N),
                   p, "simplified")
    full = predicate_mask(d.space, lambda v: v.O == p.C)
    gf_lt = infinitely_often_probability(d, ~full)
    gf_eq = infinitely_often_probability(d, full)
    reach = reach_probability(d, full)
    n = len(d.space)
    one, zero = np.mean(reach >= 1 - 1e-9), np.mean(reach <= 1e-12)
    save(out, "properties.csv", [
        ["property", "min", "max", "frac_prob1", "frac_prob0", "frac_between"],
        ["GF O<C", gf_lt.min(), gf_lt.max(), "", "", ""],
        ["GF O=C", gf_eq.min(), gf_eq.max(), "", "", ""],
        ["F O=C", reach.min(), reach.max(), one, zero, 1 - one - zero],
    ])
    for path in export_explicit(d, f"{out}/model"):
        print(path)
    print(f"{n} states; F(O=C): prob-1 {one:.3f}, prob-0 {zero:.3f}, between {1 - one - zero:.3f}")


if __name__ == "__main__":
    main()
