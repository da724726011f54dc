"""Grid scan of a catalog family for harmonic spinors, written as CSV.

Example: python scripts/grid_scan.py N5,6 mu12=-2:2 mu34=-2:2 --steps 81
"""

import argparse
import csv
import itertools
import sys
from pathlib import Path

import numpy as np

from spinlab.algebra import JacobiError, family
from spinlab.scan import grid_axis, kernel_of, parse_range, smallest_singular_value


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("family")
    ap.add_argument("ranges", nargs="+", metavar="NAME=LO:HI")
    ap.add_argument("--fixed", action="append", default=[], metavar="NAME=VALUE")
    ap.add_argument("--steps", type=int, default=41)
    ap.add_argument("--out", type=Path, default=Path("results/grid_scan.csv"))
    args = ap.parse_args()

    fam = family(args.family)
    ranges = dict(parse_range(r) for r in args.ranges)
    fixed = {k: float(v) for k, v in (f.split("=", 1) for f in args.fixed)}
    names = list(ranges)
    axes = [grid_axis(*ranges[p], args.steps) for p in names]
    args.out.parent.mkdir(parents=True, exist_ok=True)
    hits = 0
    with args.out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names + ["min_singular", "kernel_dim"])
        for combo in itertools.product(*axes):
            b = dict(zip(names, map(float, combo)), **fixed)
            if any(b[p] == 0.0 for p in fam.nonzero):
                continue
            try:
                alg = fam.instantiate(b)
            except JacobiError:
                continue
            kd = kernel_of(alg).kernel_dim
            hits += kd > 0
            w.writerow([f"{x:.6g}" for x in combo]
                       + [f"{smallest_singular_value(alg):.6e}", kd])
    print(f"{args.out}: {int(np.prod([len(a) for a in axes]))} grid points, {hits} hits")
    return 0


if __name__ == "__main__":
    sys.exit(main())
