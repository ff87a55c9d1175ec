"""Command-line front end.

Exit status: 0 on success, 1 for invalid input, 2 for numerical failure.
Data goes to ``--out`` (or standard output); diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import figures
from .dof import (
    as_fraction,
    dof_multicell,
    dof_region,
    dof_single,
    dof_single_opt,
    rbf_is_dof_optimal,
)
from .figures import Table, format_number
from .mc import McConfig, simulate_trace, simulate_sumrate
from .model import ConfigError, build_scaling, build_system, db_to_linear, users_at_snr
from .rate import (
    PrecisionError,
    dpc_upper_rate,
    scaling_law,
    sumrate_closed_multicell,
    sumrate_quadrature,
)
from .sinr import SinrDistribution, sinr_cdf
from .specfun import QuadratureError

CLOSED_FORM_DEFAULT_MAX_K = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 1 instead of argparse's 2
        raise UsageError(message)


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _fractions(text: str) -> list[Fraction]:
    try:
        return [Fraction(x.strip()) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    shared = _Parser(add_help=False)
    shared.add_argument("--config", type=Path, help="JSON system configuration")
    shared.add_argument("--out", type=Path, help="output file (default: standard output)")
    shared.add_argument("--format", choices=("csv", "json"), default="csv")
    shared.add_argument("--seed", type=_seed, default=1)
    shared.add_argument("--trials", type=_positive)
    shared.add_argument("--precision", type=_positive, help="closed-form working bits")
    shared.add_argument("--workers", type=_positive, default=1)

    p = _Parser(prog="mcrbf", description="Multi-cell random beamforming analysis")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sinr-cdf", parents=[shared], help="tabulate the per-beam SINR CDF")
    s.add_argument("--cell", type=int, default=0)
    s.add_argument("--smax", type=float)
    s.add_argument("--points", type=_positive, default=101)

    s = sub.add_parser("sumrate", parents=[shared], help="closed-form / quadrature / MC sum rates")
    s.add_argument("--k", type=_ints, help="users per cell (one value or one per cell)")
    s.add_argument("--cell", type=int, help="restrict to one cell")
    s.add_argument("--method", choices=("auto", "closed", "quadrature", "mc", "all"), default="auto")

    s = sub.add_parser("scaling", parents=[shared], help="asymptotic sum-rate law and DPC bound")
    s.add_argument("--k", type=_ints, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--eta-db", type=float, required=True)
    s.add_argument("--nt", type=int, help="also report the DPC upper bound with N_T antennas")

    s = sub.add_parser("simulate", parents=[shared], help="Monte Carlo trace dump")
    s.add_argument("--k", type=_ints)
    s.add_argument("--samples", action="store_true", help="dump raw SINRs of beam 0 instead of rates")

    s = sub.add_parser("dof", parents=[shared], help="single-cell maximum DoF / per-cell DoF")
    s.add_argument("--alpha", type=_fractions, required=True)
    s.add_argument("--nt", type=int, required=True)
    s.add_argument("--m", type=_ints, help="beam assignment for a per-cell DoF query")

    s = sub.add_parser("dof-region", parents=[shared], help="DoF region vertices and hull")
    s.add_argument("--alpha", type=_fractions, required=True)
    s.add_argument("--nt", type=int, required=True)

    s = sub.add_parser("reproduce-fig", parents=[shared], help="data for figure 1..6")
    s.add_argument("n", type=int, choices=range(1, 7))
    s.add_argument("--nt", type=int)
    s.add_argument("--alpha", type=_fractions, action="append",
                   help="alpha pair for fig 6 (repeatable), or alpha for fig 4")
    s.add_argument("--samples", type=_positive, help="fig 1 sample count")
    s.add_argument("--k-values", type=_ints, help="fig 2 MC / fig 3 user counts")
    s.add_argument("--rho-db", type=_floats, help="fig 4 SNR grid")
    return p


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    fd, tmp = tempfile.mkstemp(dir=out.parent, prefix=f".{out.name}.")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _render(table: Table, fmt: str) -> str:
    return table.to_json() + "\n" if fmt == "json" else table.to_csv()


def _need_config(args):
    if args.config is None:
        raise ConfigError("--config is required for this command")
    if not args.config.is_file():
        raise ConfigError(f"config file {args.config} not found")
    raw = args.config.read_text()
    return build_system(raw), build_scaling(raw)


def _users(args, system, scaling) -> list[int]:
    C = system.num_cells
    if getattr(args, "k", None):
        ks = args.k
        if len(ks) == 1:
            ks = ks * C
        if len(ks) != C:
            raise ConfigError(f"--k needs 1 or {C} values")
        return ks
    if scaling.users and all(k is not None for k in scaling.users):
        return [int(k) for k in scaling.users]
    return users_at_snr(scaling, system.snr_total)


def cmd_sinr_cdf(args) -> str:
    system, _ = _need_config(args)
    dist = SinrDistribution(system, args.cell)
    smax = args.smax if args.smax is not None else 10.0 * max(1.0, dist.eta)
    grid = np.linspace(0.0, smax, args.points)
    table = Table("sinr-cdf", ["s", "F_analytic"], meta={"cell": args.cell})
    for s, f in zip(grid, np.asarray(sinr_cdf(dist, grid))):
        table.rows.append([float(s), float(f)])
    return _render(table, args.format)


def cmd_sumrate(args) -> str:
    system, scaling = _need_config(args)
    ks = _users(args, system, scaling)
    cells = [args.cell] if args.cell is not None else range(system.num_cells)
    method = args.method
    table = Table("sumrate", ["cell", "K", "method", "rate", "error_estimate", "precision_bits"])
    mc_rates = None
    if method in ("mc", "all"):
        cfg = McConfig(system, ks, args.trials or 10_000, args.seed, args.workers)
        mc_rates = simulate_sumrate(cfg)
    for c in cells:
        K = ks[c]
        results = []
        if method in ("closed", "all") or (method == "auto" and K <= CLOSED_FORM_DEFAULT_MAX_K):
            results.append(sumrate_closed_multicell(system, c, K, args.precision))
        if method in ("quadrature", "all", "auto"):
            results.append(sumrate_quadrature(system, c, K))
        if mc_rates is not None:
            results.append(mc_rates[c])
        for r in results:
            table.rows.append([c, K, r.method, r.value, r.error_estimate,
                               r.precision_bits if r.precision_bits else ""])
    return _render(table, args.format)


def cmd_scaling(args) -> str:
    eta = db_to_linear(args.eta_db)
    table = Table("scaling", ["K", "R_scaling", "R_quad"] + (["R_dpc_bound"] if args.nt else []))
    from .model import SystemModel  # local: only needed here

    system = SystemModel(args.m, (args.m,), eta * args.m, 1.0)
    for K in args.k:
        row = [K, scaling_law(K, args.m, eta), sumrate_quadrature(system, 0, K).value]
        if args.nt:
            row.append(dpc_upper_rate(K, args.nt, eta).value)
        table.rows.append(row)
    return _render(table, args.format)


def cmd_simulate(args) -> str:
    system, scaling = _need_config(args)
    ks = _users(args, system, scaling)
    cfg = McConfig(system, ks, args.trials or 1000, args.seed, args.workers)
    capture = [(c, 0) for c in range(system.num_cells) if system.beams[c] > 0] if args.samples else []
    trace = simulate_trace(cfg, capture)
    if args.format == "json":
        rates = simulate_sumrate(cfg, trace)
        doc = {
            "schema_version": 1,
            "master_seed": trace.master_seed,
            "trials": trace.trials,
            "users": ks,
            "rates": [{"cell": c, "mean": float(f"{r.value:.12g}"),
                       "stderr": float(f"{r.error_estimate:.12g}")} for c, r in enumerate(rates)],
        }
        return json.dumps(doc, indent=2) + "\n"
    return trace.samples_to_csv() if args.samples else trace.to_csv()


def cmd_dof(args) -> str:
    if args.m:
        if len(args.alpha) not in (1, len(args.m)):
            raise ConfigError("--alpha needs 1 value or one per cell")
        alpha = args.alpha * len(args.m) if len(args.alpha) == 1 else args.alpha
        if any(m > args.nt for m in args.m):
            raise ConfigError("beam counts cannot exceed --nt")
        d = dof_multicell(alpha, args.m)
        if args.format == "json":
            return json.dumps({"schema_version": 1, "m": args.m,
                               "d": [format_number(x) for x in d]}) + "\n"
        return " ".join(f"d{c + 1}={format_number(x)}" for c, x in enumerate(d)) + "\n"
    if len(args.alpha) != 1:
        raise ConfigError("without --m, give a single --alpha")
    d, m = dof_single_opt(args.alpha[0], args.nt)
    cert = rbf_is_dof_optimal(args.alpha[0], 1, args.nt)
    if args.format == "json":
        return json.dumps({"schema_version": 1, "alpha": format_number(args.alpha[0]),
                           "nt": args.nt, "d_star": format_number(d), "m_star": m,
                           "dof_optimal_sufficient": bool(cert)}) + "\n"
    return f"d_star={format_number(d)} m_star={m}\n"


def cmd_dof_region(args) -> str:
    region = dof_region(args.alpha, args.nt)
    return region.to_json() + "\n"


def cmd_reproduce(args) -> str:
    n = args.n
    trials = args.trials
    kw = {"workers": args.workers, "seed": args.seed}
    if n == 1:
        table = figures.fig1(samples=args.samples or 100_000, **kw)
    elif n == 2:
        extra = {"trials": trials} if trials else {}
        if args.k_values:
            extra["k_mc"] = args.k_values
        table = figures.fig2(**extra, **kw)
    elif n == 3:
        extra = {"trials": trials} if trials else {}
        if args.k_values:
            extra["k_values"] = args.k_values
        table = figures.fig3(**extra, **kw)
    elif n == 4:
        extra = {"trials": trials} if trials else {}
        if args.rho_db:
            extra["rho_db"] = args.rho_db
        if args.nt:
            extra["num_antennas"] = args.nt
        if args.alpha:
            extra["alpha"] = float(args.alpha[0][0])
        table = figures.fig4(**extra, **kw)
    elif n == 5:
        table = figures.fig5(num_antennas=args.nt or 4)
    else:
        pairs = None
        if args.alpha:
            pairs = []
            for a in args.alpha:
                if len(a) != 2:
                    raise ConfigError("fig 6 --alpha takes a pair a1,a2")
                pairs.append((a[0], a[1]))
        doc = figures.fig6(**({"alpha_pairs": pairs} if pairs else {}), num_antennas=args.nt or 4)
        return json.dumps(doc, indent=2) + "\n"
    return _render(table, args.format)


COMMANDS = {
    "sinr-cdf": cmd_sinr_cdf,
    "sumrate": cmd_sumrate,
    "scaling": cmd_scaling,
    "simulate": cmd_simulate,
    "dof": cmd_dof,
    "dof-region": cmd_dof_region,
    "reproduce-fig": cmd_reproduce,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.out is not None and not args.out.parent.is_dir():
            raise ConfigError(f"output directory {args.out.parent} does not exist")
        text = COMMANDS[args.command](args)
        _emit(text, args.out)
    except (UsageError, ConfigError, ValueError, IndexError) as exc:
        print(f"mcrbf: error: {exc}", file=sys.stderr)
        return 1
    except (PrecisionError, QuadratureError, ArithmeticError) as exc:
        print(f"mcrbf: numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
