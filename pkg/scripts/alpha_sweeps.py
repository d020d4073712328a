"""Mean statistic against the truncation index for every scenario and intensity.

Example: python3 scripts/alpha_sweeps.py --replicates 100 --constant-vol
"""

import argparse
from pathlib import Path

import numpy as np

from jumpactivity.montecarlo import SWEEP_FIELDS, ExperimentGrid, sweep_alpha
from jumpactivity.records import write_csv
from jumpactivity.simulator import SvParams


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--replicates", type=int, default=200)
    ap.add_argument("--alphas", type=float, nargs="+", default=np.arange(2.0, 15.5, 1.0).tolist())
    ap.add_argument("--scenarios", nargs="+", default=["fa_null", "ia_null", "ia_alt", "fa_alt"])
    ap.add_argument("--constant-vol", action="store_true")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/alpha_sweeps.csv"))
    args = ap.parse_args(argv)
    sv = SvParams.constant() if args.constant_vol else SvParams()
    rows = []
    for scenario in args.scenarios:
        grid = ExperimentGrid(
            scenario=scenario, intensities=("none", "low", "medium", "high"), alphas=tuple(args.alphas),
            replicates=args.replicates, base_seed=args.seed, sv=sv, workers=args.workers,
        )
        for intensity in grid.intensities:
            part = sweep_alpha(grid, intensity)
            rows.extend(part)
            print(f"{scenario:8} {intensity:7} " + " ".join(f"{r['mean']:.3f}" for r in part))
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(rows, SWEEP_FIELDS, args.out)
    print(f"written {args.out}")


if __name__ == "__main__":
    main()
