"""Command-line interface: ``eigadm {estimate,risk,tables,selftest}``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .estimator import McConfig, compute_tau, mle, phi_star, psi_star
from .jacobi import eig_sym_desc
from .report import ReportIOError, to_csv, to_dict, write_report
from .risk import ESTIMATORS, TAU_POINTS, RiskReport, RiskRow, Scenario, reproduce_tables, simulate_risk
from .rng import RngStream
from .selftest import run_selftest

EXIT_OK = 0
EXIT_TEST_FAILURE = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NOT_SYMMETRIC = 4
EXIT_BAD_SPECTRUM = 5
EXIT_NU_TOO_SMALL = 6

DEFAULT_SEED = 42


class CliError(Exception):
    def __init__(self, message, code=EXIT_USAGE):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message, EXIT_USAGE)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"cannot parse number list {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file of option defaults; flags override it")
    common.add_argument("--seed", type=int, help=f"root seed (default: $EIGADM_SEED or {DEFAULT_SEED})")
    common.add_argument("--threads", type=int, default=1, help="worker processes, 0 = all cores")
    common.add_argument("-v", "--verbose", action="store_true")

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--out", type=Path, help="output file (default: stdout)")
    out.add_argument("--format", choices=("csv", "json"), default="csv")
    out.add_argument("--timing", action="store_true", help="record wall time in JSON metadata")

    parser = _Parser(prog="eigadm", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("estimate", parents=[common], help="estimate population eigenvalues")
    p.add_argument("--input", type=Path, help="spectrum (one row) or symmetric matrix; text or JSON")
    p.add_argument("--nu", type=float)
    p.add_argument("--n-points", type=int, default=1000)
    p.add_argument("--antithetic", action="store_true")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("risk", parents=[common, out], help="simulate the risk of one estimator")
    p.add_argument("--p", type=int)
    p.add_argument("--nu", type=float)
    p.add_argument("--lambda", dest="lam", type=_floats, help="comma-separated descending values")
    p.add_argument("--estimator", choices=ESTIMATORS, default="psi_star")
    p.add_argument("--n-rep", type=int, default=10000)
    p.add_argument("--n-points", type=int, default=1000)
    p.add_argument("--antithetic", action="store_true")
    p.add_argument("--tau-points", choices=TAU_POINTS, default="fresh")

    p = sub.add_parser("tables", parents=[common, out], help="reproduce the p=2 / p=3 risk tables")
    p.add_argument("--table", type=int, choices=(1, 2))
    p.add_argument("--n-rep", type=int, default=10000)
    p.add_argument("--n-points", type=int, default=1000)
    p.add_argument("--antithetic", action="store_true")
    p.add_argument("--tau-points", choices=TAU_POINTS, default="fresh")
    p.add_argument("--estimators", type=lambda s: tuple(s.split(",")), default=("psi_star", "phi_star"))

    sub.add_parser("selftest", parents=[common], help="run the fast invariant checks")
    return parser


# checked after config merging so a config file can supply them
REQUIRED = {
    "estimate": ("input", "nu"),
    "risk": ("p", "nu", "lam"),
    "tables": ("table",),
    "selftest": (),
}


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        try:
            config = json.loads(args.config.read_text())
        except OSError as exc:
            raise CliError(f"cannot read config {args.config}: {exc}", EXIT_IO)
        except json.JSONDecodeError as exc:
            raise CliError(f"invalid JSON in config {args.config}: {exc}")
        if not isinstance(config, dict):
            raise CliError(f"config {args.config} must hold a JSON object")
        config = {k.replace("-", "_"): v for k, v in config.items()}
        if "lambda" in config:
            lam = config.pop("lambda")
            config["lam"] = _floats(lam) if isinstance(lam, str) else [float(v) for v in lam]
        for key in ("input", "out"):
            if isinstance(config.get(key), str):
                config[key] = Path(config[key])
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**config)
        args = parser.parse_args(argv)
    missing = ["--lambda" if name == "lam" else f"--{name.replace('_', '-')}" for name in REQUIRED[args.command] if getattr(args, name) is None]
    if missing:
        raise CliError(f"the following arguments are required: {', '.join(missing)}")
    if args.seed is None:
        env = os.environ.get("EIGADM_SEED")
        try:
            args.seed = int(env) if env else DEFAULT_SEED
        except ValueError:
            raise CliError(f"EIGADM_SEED must be an integer, got {env!r}")
    if args.threads < 0:
        raise CliError("--threads must be >= 0")
    return args


def read_input(path: Path):
    """Return ``(kind, array)`` with kind ``"spectrum"`` or ``"matrix"``."""
    try:
        text = path.read_text()
    except OSError as exc:
        raise CliError(f"cannot read input {path}: {exc}", EXIT_IO)
    try:
        if path.suffix.lower() == ".json":
            data = np.asarray(json.loads(text), dtype=float)
        else:
            rows = [line.replace(",", " ").split() for line in text.splitlines()]
            rows = [r for r in rows if r and not r[0].startswith("#")]
            data = np.asarray([[float(v) for v in r] for r in rows], dtype=float)
    except (ValueError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot parse input {path}: {exc}", EXIT_BAD_SPECTRUM)
    if data.ndim == 2 and data.shape[0] == 1:
        data = data[0]
    elif data.ndim == 2 and data.shape[1] == 1:
        data = data[:, 0]
    if data.ndim == 1:
        return "spectrum", data
    if data.ndim == 2 and data.shape[0] == data.shape[1]:
        return "matrix", data
    raise CliError(f"input {path} is neither a vector nor a square matrix (shape {data.shape})", EXIT_BAD_SPECTRUM)


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        out.write_text(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}", EXIT_IO)


def _mc(args) -> McConfig:
    try:
        return McConfig(args.n_points, args.antithetic)
    except ValueError as exc:
        raise CliError(str(exc))


def cmd_estimate(args) -> int:
    kind, data = read_input(args.input)
    if kind == "matrix":
        try:
            l = eig_sym_desc(data)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_NOT_SYMMETRIC)
        if np.any(l <= 0):
            raise CliError("matrix is not positive definite", EXIT_BAD_SPECTRUM)
    else:
        l = data
        if not np.all(np.isfinite(l)) or np.any(l <= 0):
            raise CliError("spectrum must be finite and strictly positive", EXIT_BAD_SPECTRUM)
        if np.any(np.diff(l) > 0):
            raise CliError("spectrum must be sorted in descending order", EXIT_BAD_SPECTRUM)
    if not args.nu >= l.size:
        raise CliError(f"nu={args.nu:g} is smaller than p={l.size}", EXIT_NU_TOO_SMALL)
    mc = _mc(args)
    tau = compute_tau(l, args.nu, mc, RngStream(args.seed))
    est = psi_star(l, tau)
    result = {
        "input": kind,
        "nu": args.nu,
        "seed": args.seed,
        "n_points": mc.n_points,
        "l": l.tolist(),
        "tau": tau.entries.tolist(),
        "tau_row_sums": tau.entries.sum(axis=1).tolist(),
        "psi_star": est.psi.tolist(),
        "phi_star": phi_star(l, args.nu).tolist(),
        "mle": mle(l, args.nu).tolist(),
        "ess": tau.ess.tolist(),
    }
    _emit(json.dumps(result, indent=2) + "\n", args.out)
    return EXIT_OK


def _write(report: RiskReport, args):
    if args.out is None:
        if args.format == "csv":
            sys.stdout.write(to_csv(report))
        else:
            sys.stdout.write(json.dumps(to_dict(report, timing=args.timing), indent=2) + "\n")
        return
    try:
        write_report(report, args.out, args.format, timing=args.timing)
    except ReportIOError as exc:
        raise CliError(str(exc), EXIT_IO)


def cmd_risk(args) -> int:
    if len(args.lam) != args.p:
        raise CliError(f"--lambda has {len(args.lam)} values but --p is {args.p}")
    if np.any(np.diff(args.lam) > 0) or min(args.lam) <= 0:
        raise CliError("--lambda must be positive and descending", EXIT_BAD_SPECTRUM)
    if args.nu < args.p:
        raise CliError(f"nu={args.nu:g} is smaller than p={args.p}", EXIT_NU_TOO_SMALL)
    mc = _mc(args)
    try:
        s = Scenario(tuple(args.lam), args.nu, args.estimator, args.n_rep, mc, args.seed, args.tau_points)
    except ValueError as exc:
        raise CliError(str(exc))
    t0 = time.perf_counter()
    est = simulate_risk(s, threads=args.threads)
    meta = {
        "seed": args.seed,
        "n_points": mc.n_points,
        "n_rep": args.n_rep,
        "version": __version__,
        "wall_ms": round(1000 * (time.perf_counter() - t0)),
        "antithetic": mc.antithetic,
        "tau_points": args.tau_points,
    }
    _write(RiskReport([RiskRow(s.lam, args.nu, {args.estimator: est})], meta), args)
    return EXIT_OK


def cmd_tables(args) -> int:
    bad = [e for e in args.estimators if e not in ESTIMATORS]
    if bad:
        raise CliError(f"unknown estimators {bad}; choose from {ESTIMATORS}")
    report = reproduce_tables(
        args.table,
        args.seed,
        args.n_rep,
        _mc(args),
        estimators=args.estimators,
        threads=args.threads,
        tau_points=args.tau_points,
    )
    logging.getLogger(__name__).info("table %d done in %d ms", args.table, report.metadata["wall_ms"])
    _write(report, args)
    return EXIT_OK


def cmd_selftest(args) -> int:
    checks = run_selftest(args.seed)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_TEST_FAILURE if failed else EXIT_OK


COMMANDS = {"estimate": cmd_estimate, "risk": cmd_risk, "tables": cmd_tables, "selftest": cmd_selftest}


def main(argv=None) -> int:
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
