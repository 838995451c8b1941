"""Tabulate the theta-derivative checks of a random gluing to CSV."""

import argparse
import math
import sys

from torsor.cli import write_sweep_csv
from torsor.gluing import random_gluing, sweep, theta_grid


def dims(text):
    return tuple(int(x) for x in text.split(","))


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--dims-b", type=dims, default=(1, 2, 1))
    p.add_argument("--dims-k1", type=dims, default=(2, 3, 1))
    p.add_argument("--dims-k2", type=dims, default=(1, 2, 2))
    p.add_argument("--steps", type=int, default=33)
    p.add_argument("--non-isometric", action="store_true")
    p.add_argument("--out", default="-")
    args = p.parse_args()

    g = random_gluing(args.dims_b, args.dims_k1, args.dims_k2, seed=args.seed, isometric=not args.non_isometric)
    rows = sweep(g, theta_grid(1e-3, math.pi / 2 - 1e-3, args.steps))
    if args.out == "-":
        write_sweep_csv(rows, sys.stdout)
    else:
        with open(args.out, "w") as fh:
            write_sweep_csv(rows, fh)
    worst = max(max(r["res_ha7"], r["res_ha8"], r["res_ha9"]) for r in rows)
    print(f"max residual {worst:.3e}", file=sys.stderr)


if __name__ == "__main__":
    main()
