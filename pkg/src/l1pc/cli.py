"""Command line front end: one subcommand per experiment.

Examples:

    l1pc lasso-identity --n 20 --target-levels 0,5,10,20 --seed 7
    l1pc tv-signal --n 1024 --snr 7 --lambda-fracs 0.01,0.1,1.0 --seed 3 --out tv.csv
    l1pc balance --dct --n 1024 --c 1.4 --delta-list 1e-3,1e-2,1e-1,1 --seed 11

Every run is deterministic in its flags: the same command produces byte
identical CSV output.  The CSV goes to --out when given, else to stdout.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import (
    DEFAULT_ITERS,
    DEFAULT_N,
    EXPERIMENT_COLUMNS,
    EXPERIMENTS,
    ExperimentConfig,
    rows_to_csv,
    run_sweep,
)

_EXPERIMENT_HELP = {
    "lasso-identity": "identity-design quadratic fit on a seeded random signal; columns "
                      + ",".join(h for h, _ in EXPERIMENT_COLUMNS["lasso-identity"]),
    "image-dwt": "image denoising through a 2-d wavelet transform; columns "
                 + ",".join(h for h, _ in EXPERIMENT_COLUMNS["image-dwt"]),
    "group-lasso": "Doppler signal under an orthogonal wavelet design with dyadic blocks; columns "
                   + ",".join(h for h, _ in EXPERIMENT_COLUMNS["group-lasso"]),
    "tv-signal": "total-variation denoising of the Doppler signal; columns "
                 + ",".join(h for h, _ in EXPERIMENT_COLUMNS["tv-signal"]),
    "svm-square": "kernel machine with the square loss; columns "
                  + ",".join(h for h, _ in EXPERIMENT_COLUMNS["svm-square"]),
    "svm-hinge": "kernel classifier with the hinge loss; columns "
                 + ",".join(h for h, _ in EXPERIMENT_COLUMNS["svm-hinge"]),
    "svm-eps": "kernel regressor with the epsilon-insensitive loss; columns "
               + ",".join(h for h, _ in EXPERIMENT_COLUMNS["svm-eps"]),
    "logistic-check": "algebraic zero-weight bound for logistic regression; columns "
                      + ",".join(h for h, _ in EXPERIMENT_COLUMNS["logistic-check"]),
    "balance": "noise-scaled parameter rule lambda = C * delta over a noise grid; columns "
               + ",".join(h for h, _ in EXPERIMENT_COLUMNS["balance"]),
}


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}") from None


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}") from None


def _wavelet_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected N,L (vanishing moments, levels)")
    return int(parts[0]), int(parts[1])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="l1pc", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=_EXPERIMENT_HELP[name])
        p.add_argument("--n", type=int, default=None,
                       help=f"problem size (default {DEFAULT_N.get(name, 'from input file')})")
        p.add_argument("--lambda-list", type=_float_list, default=None, metavar="V1,V2,...",
                       help="explicit regularization parameters")
        p.add_argument("--target-levels", type=_int_list, default=None, metavar="L1,L2,...",
                       help="sparsity levels; parameters come from the threshold order statistics")
        p.add_argument("--lambda-fracs", type=_float_list, default=None, metavar="F1,F2,...",
                       help="fractions of the model's lambda_max (where a formula exists)")
        p.add_argument("--c", type=float, default=None,
                       help="noise-scaled rule lambda = C * delta (balance experiment)")
        p.add_argument("--sigma", type=float, default=None, help="Gaussian noise standard deviation")
        p.add_argument("--snr", type=float, default=None, help="exact signal-to-noise ratio in dB")
        p.add_argument("--delta-list", type=_float_list, default=None, metavar="D1,D2,...",
                       help="exact noise norms; multiple values drive the balance sweep")
        p.add_argument("--iters", type=int, default=None,
                       help=f"solver iteration budget (default {DEFAULT_ITERS[name]})")
        p.add_argument("--beta", type=float, default=None, help="override the primal step")
        p.add_argument("--rho", type=float, default=None, help="override the dual step")
        p.add_argument("--rel-tol", type=float, default=0.0, help="early-exit relative-change tolerance")
        p.add_argument("--seed", type=int, default=None, help="PRNG seed; required whenever data or noise is drawn")
        p.add_argument("--zero-tol", type=float, default=1e-6, help="relative zero test for sparsity counting")
        p.add_argument("--out", type=str, default=None, help="CSV output path (default: stdout)")
        p.add_argument("--wavelet", type=_wavelet_pair, default=(4, 4), metavar="N,L",
                       help="Daubechies vanishing moments and level count")
        p.add_argument("--dct", action="store_true", help="use the cosine transform design (balance)")
        p.add_argument("--mu", type=float, default=1.0, help="Gaussian kernel width")
        p.add_argument("--eps", type=float, default=1e-4, help="insensitive-tube half width")
        p.add_argument("--image", type=str, default=None, help="input PGM image (image-dwt)")
        p.add_argument("--signal", type=str, default=None,
                       help="input signal file, one value per line (default: Doppler)")
        p.add_argument("--dataset", type=str, default=None, help="training CSV: features then label per row")
        p.add_argument("--test-dataset", type=str, default=None, help="test CSV (defaults to the training data)")
        p.add_argument("--blocks", type=int, default=10, help="dyadic block count (group-lasso)")
        p.add_argument("--separation", type=float, default=3.0, help="class separation of the synthetic data")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    return ExperimentConfig(
        experiment=args.experiment,
        n=args.n,
        image=args.image,
        signal=args.signal,
        dataset=args.dataset,
        test_dataset=args.test_dataset,
        wavelet=args.wavelet,
        use_dct=args.dct,
        mu=args.mu,
        eps=args.eps,
        sigma=args.sigma,
        snr=args.snr,
        delta_list=args.delta_list,
        lambda_list=args.lambda_list,
        target_levels=args.target_levels,
        lambda_fracs=args.lambda_fracs,
        c=args.c,
        iters=args.iters,
        beta=args.beta,
        rho=args.rho,
        rel_tol=args.rel_tol,
        seed=args.seed,
        out=args.out,
        zero_tol=args.zero_tol,
        blocks=args.blocks,
        separation=args.separation,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        rows = run_sweep(cfg)
    except (ValueError, OSError) as exc:
        print(f"l1pc: error: {exc}", file=sys.stderr)
        return 2
    if cfg.out is None:
        sys.stdout.write(rows_to_csv(cfg.experiment, rows))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
