"""Scaled-loss curves for N = 100, 400, 1500 (a = 1/3, two arms) and their SVG plot.

    python scripts/reproduce_fig1.py --out-dir results --reps 10000
"""

import argparse
import pathlib

from batch_ucb import SweepConfig, emit_csv, emit_plot, run_sweep
from batch_ucb.mc_harness import default_workers


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--out-dir", default="results")
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--a", type=float, default=1 / 3)
    p.add_argument("--horizons", type=int, nargs="+", default=[100, 400, 1500])
    args = p.parse_args()

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for N in args.horizons:
        cfg = SweepConfig(a=args.a, N=N, d_min=0.0, d_max=8.0, d_step=0.25, reps=args.reps,
                          master_seed=args.seed, workers=default_workers())
        curve = run_sweep(cfg)
        path = out / f"loss_N{N}.csv"
        emit_csv(curve, cfg, path)
        paths.append(path)
        d, l = curve.peak()
        print(f"N={N:5d}  max l_hat = {l:.4f} at d = {d:g}")
    emit_plot(paths, out / "scaled_loss.svg")
    print(f"plot: {out / 'scaled_loss.svg'}")


if __name__ == "__main__":
    main()
