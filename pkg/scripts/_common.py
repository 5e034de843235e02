"""Shared setup for the figure scripts."""

import argparse
import logging
import os

from sairod.experiment import write_csv

# Five-coordinate published states hold 18 subjects; 2 are padded into R.
FIG4_INIT = [((15, 3, 0, 2, 0, 0), 0.5), ((17, 1, 0, 2, 0, 0), 0.5)]
FIG2_INIT = {"IS1": (19, 1, 0, 0, 0, 0), "IS2": (17, 3, 0, 0, 0, 0), "IS3": (15, 5, 0, 0, 0, 0)}


def parser(doc: str, out: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=doc)
    p.add_argument("--out", default=out, help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def setup(args) -> str:
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    os.makedirs(args.out, exist_ok=True)
    return args.out


def save(out: str, name: str, rows) -> str:
    path = os.path.join(out, name)
    write_csv(path, rows)
    print(path)
    return path
