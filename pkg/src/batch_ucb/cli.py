"""Command-line driver.

Exit statuses: 0 success / PASS, 1 coupling FAIL, 2 usage or configuration
error, 3 I/O error.  Arms and batches in CSV traces are numbered from 1.
"""

from __future__ import annotations

import argparse
import csv
import sys

from .bandit_core import DEFAULT_DRIFT_BOUND, BatchGrid, ThetaParams
from .errors import ConfigurationError
from .experiment import CurveParseError, SweepConfig, emit_csv, run_sweep
from .invariant_engine import couple_check, invariant_play
from .mc_harness import DEFAULT_REPS, default_workers
from .rng import Stream, mix_seed
from .svgplot import emit_plot
from .ucb_policy import PolicyConfig, play

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
DEFAULT_SETTINGS = "1:1:0,10:0.25:5,50:4:-3"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _drift_list(text: str) -> list[list[float]]:
    return [_floats(vec) for vec in text.split(";") if vec.strip()]


def _settings(text: str) -> list[tuple[float, ...]]:
    out = []
    for item in text.split(","):
        parts = item.split(":")
        if len(parts) not in (3, 4):
            raise argparse.ArgumentTypeError(f"setting {item!r} is not M:D:m or M:D:m:a")
        try:
            out.append((int(parts[0]),) + tuple(float(p) for p in parts[1:]))
        except ValueError:
            raise argparse.ArgumentTypeError(f"setting {item!r} has a non-numeric field")
    return out


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--a", type=float, default=1.0 / 3.0, help="exploration coefficient a (default 1/3)")
    p.add_argument("--batch-size", "-M", dest="M", type=int, default=1, help="items per batch M (default 1)")
    h = p.add_mutually_exclusive_group()
    h.add_argument("--horizon", "-N", dest="N", type=int, help="total horizon N = M*K (default 1500 if --batches absent)")
    h.add_argument("--batches", "-K", dest="K", type=int, help="number of batches K")
    p.add_argument("--mean", type=float, default=0.0, help="baseline mean m (default 0)")
    p.add_argument("--variance", type=float, default=1.0, help="per-item variance D (default 1)")
    p.add_argument("--drift-bound", type=float, default=DEFAULT_DRIFT_BOUND, help="validation bound C on |d_l| (default 10)")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="batch-ucb", description="Gaussian bandit simulations under the randomized batch UCB rule.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", help="estimate the scaled loss over a grid of drift gaps and write CSV")
    _add_model_flags(sw)
    sw.add_argument("--arms", "-J", dest="J", type=int, default=2, help="number of arms J (default 2)")
    sw.add_argument("--d-min", type=float, help="smallest gap d (gap mode, default 0)")
    sw.add_argument("--d-max", type=float, help="largest gap d (gap mode, default 8)")
    sw.add_argument("--d-step", type=float, help="gap step (gap mode, default 0.25)")
    sw.add_argument("--d-list", type=_drift_list, help="explicit drift vectors, e.g. '1,0,-1;2,0,-2'")
    sw.add_argument("--reps", type=int, default=DEFAULT_REPS, help=f"replications per point (default {DEFAULT_REPS})")
    sw.add_argument("--workers", type=int, default=default_workers(), help="worker threads (default: available CPUs)")
    sw.add_argument("--process", choices=["concrete", "invariant"], default="concrete", help="process to simulate (default concrete)")
    sw.add_argument("--out", required=True, help="output CSV path")

    pl = sub.add_parser("plot", help="render sweep CSVs as one SVG")
    pl.add_argument("csv", nargs="+", help="sweep CSV files, one series each")
    pl.add_argument("--out", required=True, help="output SVG path")

    ep = sub.add_parser("episode", help="trace one replication: chosen arm and all bounds per batch")
    _add_model_flags(ep)
    ep.add_argument("--d", type=_floats, required=True, help="drift vector, e.g. 1.75,-1.75")
    ep.add_argument("--rep", type=int, default=0, help="replication index (stream seed is mix(seed, rep); default 0)")
    ep.add_argument("--invariant", action="store_true", help="trace the unit-horizon invariant process instead")
    ep.add_argument("--out", default="-", help="output CSV path (default stdout)")

    cp = sub.add_parser("couple", help="check concrete and invariant processes coincide on shared draws")
    cp.add_argument("--batches", "-K", dest="K", type=int, default=200, help="number of batches K (default 200)")
    cp.add_argument("--a", type=float, default=1.0 / 3.0, help="exploration coefficient a (default 1/3)")
    cp.add_argument("--d", type=_floats, default=[1.75, -1.75], help="drift vector (default 1.75,-1.75)")
    cp.add_argument("--settings", type=_settings, default=_settings(DEFAULT_SETTINGS),
                    help=f"concrete settings M:D:m[:a], comma-separated (default {DEFAULT_SETTINGS})")
    cp.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    cp.add_argument("--seed-count", type=int, default=1, help="check seeds seed..seed+n-1 (default 1)")
    return parser


def _cmd_sweep(args) -> int:
    gap_given = any(v is not None for v in (args.d_min, args.d_max, args.d_step))
    if args.d_list is None or gap_given:
        d_min = 0.0 if args.d_min is None else args.d_min
        d_max = 8.0 if args.d_max is None else args.d_max
        d_step = 0.25 if args.d_step is None else args.d_step
    else:
        d_min = d_max = d_step = None
    N = args.N if (args.N is not None or args.K is not None) else 1500
    config = SweepConfig(
        a=args.a, J=args.J, M=args.M, N=N, K=args.K, d_min=d_min, d_max=d_max, d_step=d_step,
        d_list=args.d_list, reps=args.reps, master_seed=args.seed, workers=args.workers, out_path=args.out,
        m=args.mean, D=args.variance, C=args.drift_bound, process=args.process,
    )
    curve = run_sweep(config)
    emit_csv(curve, config, args.out)
    d_peak, l_peak = curve.peak()
    print(f"wrote {len(curve.points)} points to {args.out}; peak l_hat={l_peak:.4f} at d={d_peak:g}")
    return EXIT_OK


def _cmd_plot(args) -> int:
    emit_plot(args.csv, args.out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_episode(args) -> int:
    J = len(args.d)
    grid = BatchGrid(J, args.M, args.K) if args.K is not None else BatchGrid.from_horizon(J, args.M, args.N or 1500)
    noise = Stream(mix_seed(args.seed, args.rep))
    if args.invariant:
        records = (rec for rec, _ in invariant_play(args.d, args.a, grid.K, noise))
    else:
        theta = ThetaParams(m=args.mean, D=args.variance, d=args.d, C=args.drift_bound)
        config = PolicyConfig(a=args.a, J=J, M=args.M, D=args.variance)
        records = (rec for rec, _ in play(theta, grid, config, noise))
    fh = sys.stdout if args.out == "-" else open(args.out, "w", encoding="utf-8", newline="")
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["batch", "arm"] + [f"bound_{l + 1}" for l in range(J)])
        for rec in records:
            bounds = [""] * J if rec.bounds is None else [f"{b:.17g}" for b in rec.bounds]
            writer.writerow([rec.batch + 1, rec.arm + 1] + bounds)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def _cmd_couple(args) -> int:
    status = EXIT_OK
    for seed in range(args.seed, args.seed + args.seed_count):
        report = couple_check(args.d, args.a, args.K, args.settings, seed)
        print(report.render())
        if not report.passed:
            status = EXIT_FAIL
    return status


COMMANDS = {"sweep": _cmd_sweep, "plot": _cmd_plot, "episode": _cmd_episode, "couple": _cmd_couple}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigurationError, CurveParseError) as exc:
        print(f"batch-ucb {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"batch-ucb {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
