"""Rejection rates and statistic quartiles across sampling intervals at a fixed horizon.

Example: python3 scripts/frequency_sweep.py --scenario noise --replicates 100
"""

import argparse
from pathlib import Path

from jumpactivity.montecarlo import FREQ_FIELDS, SCENARIOS, ExperimentGrid, frequency_sweep
from jumpactivity.pathseries import SECOND
from jumpactivity.records import write_csv


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scenario", choices=sorted(SCENARIOS), default="fa_null")
    ap.add_argument("--statistic", choices=("fa", "ia"), default=None)
    ap.add_argument("--intensity", choices=("none", "low", "medium", "high"), default="medium")
    ap.add_argument("--deltas-seconds", type=float, nargs="+", default=[1, 5, 10, 30, 60, 120, 300])
    ap.add_argument("--alpha", type=float, default=8.0)
    ap.add_argument("--horizon", type=int, default=1)
    ap.add_argument("--replicates", type=int, default=200)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/frequency_sweep.csv"))
    args = ap.parse_args(argv)
    grid = ExperimentGrid(
        scenario=args.scenario, statistic=args.statistic, intensities=(args.intensity,), alphas=(args.alpha,),
        horizon_days=args.horizon, replicates=args.replicates, base_seed=args.seed, workers=args.workers,
    )
    rows = frequency_sweep([d * SECOND for d in args.deltas_seconds], grid)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(rows, FREQ_FIELDS, args.out)
    for r in rows:
        print(f"delta={r['delta_seconds']:>5g}s level={r['level']:.2f} rate={r['rate']:.3f} median={r['median']:.3f}")
    print(f"written {args.out}")


if __name__ == "__main__":
    main()
