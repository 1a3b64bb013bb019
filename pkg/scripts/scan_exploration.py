"""Worst-case scaled loss as a function of the exploration coefficient a.

Prints max_d l_hat(d) for each a on a coarse gap grid; the minimax choice
is the a with the smallest maximum.

    python scripts/scan_exploration.py --horizon 400 --reps 4000
"""

import argparse

import numpy as np

from batch_ucb import SweepConfig, run_sweep
from batch_ucb.mc_harness import default_workers


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--horizon", type=int, default=400)
    p.add_argument("--reps", type=int, default=4000)
    p.add_argument("--seed", type=int, default=3)
    p.add_argument("--a", type=float, nargs="+", default=list(np.round(np.arange(0.1, 0.61, 0.05), 3)) + [2 / 15])
    args = p.parse_args()
    for a in sorted(args.a):
        cfg = SweepConfig(a=a, N=args.horizon, d_min=0.5, d_max=8.0, d_step=0.5, reps=args.reps,
                          master_seed=args.seed, workers=default_workers())
        d, l = run_sweep(cfg).peak()
        print(f"a={a:.4f}  max l_hat={l:.4f} at d={d:g}")


if __name__ == "__main__":
    main()
