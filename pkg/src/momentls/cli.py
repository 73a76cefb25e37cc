"""Command-line interface.

Subcommands::

    autocov   empirical autocovariance of a chain file -> CSV
    avar      asymptotic variance by any registered method -> JSON
    specden   spectral density on a frequency grid -> CSV
    simulate  seeded synthetic chains -> chain file
    compare   replicated estimator comparison -> JSON (+ optional CSV)

Exit codes: 0 success, 1 usage error, 2 input validation error, 3 numeric
failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io as chain_io
from .chains import Ar1Spec, simulate_ar1
from .estimators import METHODS, SPECTRAL_METHODS, MomentLS, make_estimator
from .harness import ExperimentConfig, run_experiment
from .nnls import NnlsError
from .sequences import empirical_autocov

USAGE_ERROR = 1
VALIDATION_ERROR = 2
NUMERIC_ERROR = 3


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits with the documented usage code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _build_parser() -> _Parser:
    parser = _Parser(prog="momentls", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("autocov", help="empirical autocovariance -> CSV")
    _add_input_flags(p)
    p.add_argument("--max-lag", type=int, default=None,
                   help="number of lags (default: chain length)")
    p.add_argument("--out", default=None, help="output CSV (default: stdout)")

    p = sub.add_parser("avar", help="asymptotic variance -> JSON")
    _add_input_flags(p)
    p.add_argument("--method", required=True, choices=METHODS)
    _add_method_flags(p)

    p = sub.add_parser("specden", help="spectral density -> CSV")
    _add_input_flags(p)
    p.add_argument("--method", required=True, choices=SPECTRAL_METHODS)
    p.add_argument("--freqs", type=int, required=True, metavar="N",
                   help="frequency grid size: omega_j = 2*pi*j/N, j = 0..N//2")
    p.add_argument("--out", default=None, help="output CSV (default: stdout)")
    _add_method_flags(p)

    p = sub.add_parser("simulate", help="generate a seeded chain file")
    kind = p.add_subparsers(dest="kind", required=True)
    ar1 = kind.add_parser("ar1", help="autoregressive chain")
    ar1.add_argument("--rho", type=float, required=True)
    ar1.add_argument("--tau", type=float, default=1.0)
    ar1.add_argument("--length", type=int, required=True)
    ar1.add_argument("--seed", type=int, default=0)
    ar1.add_argument("--init", default="stationary",
                     help="'stationary' or a fixed starting value")
    ar1.add_argument("--out", default=None, help="output file (default: stdout)")

    p = sub.add_parser("compare", help="replicated estimator comparison")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--methods", default="mls-w,mls-uw",
                   help="comma-separated method ids (default: mls-w,mls-uw)")
    p.add_argument("--ise-grid", type=int, default=8192)
    p.add_argument("--grid-size", type=int, default=200)
    p.add_argument("--delta", default="auto")
    p.add_argument("--out", default=None, help="results JSON (default: stdout)")
    p.add_argument("--csv", default=None, help="also write a summary table")
    return parser


def _add_input_flags(p):
    p.add_argument("--input", required=True, help="chain file")
    p.add_argument("--column", default=None, help="CSV column to read")


def _add_method_flags(p):
    p.add_argument("--delta", default="auto", help="margin for mls methods")
    p.add_argument("--grid-size", type=int, default=1000)
    p.add_argument("--bandwidth", type=int, default=None,
                   help="window bandwidth / batch size override")


def _parse_delta(raw):
    if isinstance(raw, str) and raw != "auto":
        try:
            return float(raw)
        except ValueError:
            raise ValueError(f"--delta must be 'auto' or a number, got {raw!r}") from None
    return raw


def cmd_autocov(args) -> int:
    chain = chain_io.read_chain(args.input, args.column)
    r = empirical_autocov(chain, args.max_lag)
    rows = [(int(k), float(v)) for k, v in enumerate(r)]
    chain_io.write_csv(args.out or sys.stdout, ["lag", "value"], rows)
    return 0


def _fit_method(args):
    delta = _parse_delta(args.delta)
    est = make_estimator(args.method, delta=delta, grid_size=args.grid_size,
                         bandwidth=args.bandwidth)
    chain = chain_io.read_chain(args.input, args.column)
    est.fit(chain)
    return est, chain


def cmd_avar(args) -> int:
    est, chain = _fit_method(args)
    report = {
        "method": args.method,
        "avar": float(est.avar_),
        "input": {"length": int(chain.size), "source": args.input,
                  "column": args.column},
        "delta": None,
        "mode": None,
        "support": None,
        "masses": None,
        "objective": None,
        "kkt_residual": None,
        "l1_norm": None,
        "bandwidth": None,
        "flags": [],
    }
    if isinstance(est, MomentLS):
        report.update(est.fit_.to_dict())
    if getattr(est, "bandwidth_", None) is not None:
        report["bandwidth"] = int(est.bandwidth_)
    if getattr(est, "batch_size_", None) is not None:
        report["bandwidth"] = int(est.batch_size_)
    if getattr(est, "negative_estimate_", False):
        report["flags"].append("negative_estimate")
    if getattr(est, "degenerate_", False):
        report["flags"].append("degenerate")
    print(json.dumps(report))
    return 0


def cmd_specden(args) -> int:
    est, _ = _fit_method(args)
    n = args.freqs
    if n < 1:
        raise ValueError(f"--freqs must be positive, got {n}")
    js = np.arange(n // 2 + 1)
    omegas = 2.0 * np.pi * js / n
    values = est.spectral_density(omegas)
    rows = list(zip((float(w) for w in omegas), (float(v) for v in values)))
    chain_io.write_csv(args.out or sys.stdout, ["omega", "value"], rows)
    return 0


def cmd_simulate(args) -> int:
    init = args.init if args.init == "stationary" else float(args.init)
    spec = Ar1Spec(rho=args.rho, tau=args.tau, length=args.length,
                   seed=args.seed, init=init)
    chain = simulate_ar1(spec)
    if args.out:
        chain_io.write_chain(args.out, chain)
    else:
        for v in chain:
            print(chain_io.fmt(v))
    return 0


def cmd_compare(args) -> int:
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    config = ExperimentConfig(
        rho=args.rho, tau=args.tau, length=args.length,
        replications=args.reps, base_seed=args.seed, estimators=methods,
        ise_grid=args.ise_grid, grid_size=args.grid_size,
        delta=_parse_delta(args.delta),
    )
    result = run_experiment(config)
    payload = json.dumps(result.to_dict())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    if args.csv:
        rows = []
        for method in methods:
            s = result.summary(method)
            rows.append([
                method,
                float(s["mse_avar"]) if s["mse_avar"] is not None else "",
                float(s["mse_avar_se"]) if s["mse_avar_se"] is not None else "",
                float(s["mean_ise"]) if s["mean_ise"] is not None else "",
                float(s["ise_se"]) if s["ise_se"] is not None else "",
                s["failures"],
            ])
        chain_io.write_csv(args.csv, ["method", "avar_mse", "avar_mse_se",
                                      "ise_mean", "ise_se", "failures"], rows)
    return 0


_COMMANDS = {
    "autocov": cmd_autocov,
    "avar": cmd_avar,
    "specden": cmd_specden,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        return _COMMANDS[args.command](args)
    except NnlsError as exc:
        print(f"momentls: numeric failure: {exc}", file=sys.stderr)
        return NUMERIC_ERROR
    except (ValueError, OSError) as exc:
        print(f"momentls: {exc}", file=sys.stderr)
        return VALIDATION_ERROR


if __name__ == "__main__":
    sys.exit(main())
