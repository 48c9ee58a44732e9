#!/usr/bin/env python3
"""Census of quotient types over weight grids.

Tabulates how the three rational homotopy types are distributed among the
free, effective actions of a grid, for exploring how the mix shifts with
the number of factors and the coefficient bound.  Exhaustive grids grow as
(2B+1)^(4N); anything beyond N=3, B=1 is better sampled.
"""

import argparse
import sys

from torquot.harness import GridSpec, run_t2_campaign


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--factors", type=int, default=3)
    parser.add_argument("--bound", type=int, default=1)
    parser.add_argument("--sample", type=int, default=None, help="random sample size")
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--jobs", type=int, default=None)
    args = parser.parse_args()

    if args.sample:
        grid = GridSpec(
            args.factors, args.bound, mode="random", count=args.sample, seed=args.seed
        )
    else:
        grid = GridSpec(args.factors, args.bound)
    report = run_t2_campaign(grid, jobs=args.jobs)
    totals = report.totals
    print(f"grid: N={args.factors} B={args.bound} mode={grid.mode}")
    print(f"tested    {totals['tested']:>12}")
    print(f"effective {totals['effective']:>12}")
    print(f"free      {totals['free']:>12}")
    free = totals["free"] or 1
    for kind, count in totals["kinds"].items():
        print(f"  {kind:<22} {count:>10}  ({100 * count / free:5.1f}% of free)")
    print(f"violations {totals['violations']:>11}")
    print(f"wall time  {report.wall_time:>10.1f}s")
    return 2 if totals["violations"] else 0


if __name__ == "__main__":
    sys.exit(main())
