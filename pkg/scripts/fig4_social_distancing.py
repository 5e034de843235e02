"""Limit P[D >= 0.2N] for M = 1..5 and C in {1, 2, 3, 5}, driven by the YAML config."""

import os

from _common import parser, setup
from sairod import config
from sairod.experiment import run_experiment

HERE = os.path.dirname(os.path.abspath(__file__))


def main():
    ap = parser(__doc__, "out/fig4")
    ap.add_argument("--config", default=os.path.join(HERE, "..", "configs", "fig4_sweep.yaml"))
    args = ap.parse_args()
    out = setup(args)
    for name, path in run_experiment(config.load(args.config), out).items():
        print(name, path)


if __name__ == "__main__":
    main()
