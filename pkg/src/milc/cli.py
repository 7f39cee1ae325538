"""Command-line entry point: ``milc {train,bounds,gauss-audit,sweep-fig7}``."""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import bounds, gauss
from .errors import MilcError

SWEEP_COLUMNS = ("h_y", "mi", "lb_theorem", "lb_fano_style")


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _cmd_train(args):
    from .harness.config import load_config
    from .harness.train import run_experiment

    config = load_config(args.config)
    if args.output_dir:
        import dataclasses

        config = dataclasses.replace(config, output_dir=args.output_dir)
    _, summary = run_experiment(config, jobs=args.jobs, plots=not args.no_plots)
    json.dump(summary, sys.stdout, indent=2)
    print()


def _cmd_bounds(args):
    report = bounds.error_prob_lower_bound(args.h_y, args.mi, base=args.base)
    json.dump(report.to_dict(), sys.stdout, indent=2)
    print()


def _cmd_gauss_audit(args):
    mu = np.asarray(_floats(args.mu))
    sigma = gauss.covariance_from_values(_floats(args.sigma), mu.size)
    report = gauss.audit(gauss.GaussianBinaryModel(args.q, mu, sigma), args.draws, args.seed)
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)


def sweep_rows(classes, imbalance=None, points=201, base="bits"):
    """``{label: [BoundReport, ...]}`` for the balanced and (optionally) unbalanced label marginals."""
    curves = {"balanced": bounds.sweep_error_bound(bounds.label_distribution(classes), points, base)}
    if imbalance is not None:
        p = bounds.label_distribution(classes, imbalance)
        curves[f"unbalanced ({1 - imbalance:g} on one class)"] = bounds.sweep_error_bound(p, points, base)
    return curves


def _cmd_sweep(args):
    curves = sweep_rows(args.classes, args.imbalance, args.points, args.base)
    lines = [",".join(SWEEP_COLUMNS)]
    for reports in curves.values():
        for r in reports:
            lines.append(",".join(repr(float(getattr(r, c))) for c in SWEEP_COLUMNS))
    text = "\n".join(lines) + "\n"
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        if not args.no_plots:
            from .harness.plotting import plot_error_bound_sweep

            plot_error_bound_sweep(curves, out.with_suffix(".png"))
    else:
        sys.stdout.write(text)


def build_parser():
    parser = argparse.ArgumentParser(prog="milc", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train classifiers from a key = value config file")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir", help="override output_dir from the config")
    p.add_argument("--jobs", type=int, default=1, help="trials to run in parallel processes")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("bounds", help="error-probability lower bound for given H(Y) and I(X;Y)")
    p.add_argument("--h-y", type=float, required=True)
    p.add_argument("--mi", type=float, required=True)
    p.add_argument("--base", choices=("bits", "nats"), default="bits")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("gauss-audit", help="MI bounds vs Monte-Carlo MI for the binary Gaussian model")
    p.add_argument("--q", type=float, required=True, help="P(Y = -1)")
    p.add_argument("--mu", required=True, help="comma-separated mean vector")
    p.add_argument("--sigma", required=True, help="covariance: one variance, n diagonal or n*n row-major values")
    p.add_argument("--draws", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="also write the JSON report here")
    p.set_defaults(func=_cmd_gauss_audit)

    p = sub.add_parser("sweep-fig7", help="error lower bound as MI sweeps from 0 to H(Y)")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--imbalance", type=float, help="mass shared by all but one class, e.g. 0.3")
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--base", choices=("bits", "nats"), default="bits")
    p.add_argument("--out", help="CSV path; a PNG figure is written alongside")
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except (MilcError, ValueError, FileNotFoundError) as exc:
        print(f"milc: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
