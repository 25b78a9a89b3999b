"""Command-line interface.

Subcommands::

    simulate        run the matrix scheme for one replica, write the path
    rate            evaluate an action functional on a path file
    riccati         solve the backward matrix Riccati equation for a measure
    laplace-check   Monte Carlo endpoint moments vs the closed form
    ldp-scan        tube-probability trend over a decreasing noise schedule
    eigen-contract  two-pipeline largest-eigenvalue comparison

Every subcommand accepts ``--config FILE`` (JSON, or TOML-style ``key =
value``) plus flag overrides; explicit flags win over the file.  Each run
prints a canonical JSON report to stdout and also writes it to ``--out
FILE`` when given.

Exit codes: 0 on PASS or successful completion, 2 on a statistical FAIL,
1 on any input error.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime
import json
import sys

import numpy as np

from . import pathio
from .errors import InputFormatError, WishartLdpError
from .experiments import ExperimentSpec, run_experiment
from .sde import simulate_wishart

_SIM_FLAG_KEYS = ("dim", "delta", "epsilon", "horizon", "steps", "replicas", "seed", "scheme")


class _Parser(argparse.ArgumentParser):
    """Argument parser that raises instead of exiting on bad input."""

    def error(self, message):  # noqa: A002 - argparse API
        raise InputFormatError(message)


def _add_sim_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="JSON or TOML config file; flags override it")
    parser.add_argument("--m", type=int, dest="dim", help="matrix dimension")
    parser.add_argument("--delta", type=float, help="drift dimension parameter (must be > 0)")
    parser.add_argument("--eps", type=float, dest="epsilon", help="noise amplitude")
    parser.add_argument("--horizon", type=float, help="time horizon")
    parser.add_argument("--steps", type=int, help="number of time steps")
    parser.add_argument("--replicas", type=int, help="number of Monte Carlo replicas")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--scheme", choices=("project", "halve"), help="positivity repair scheme")
    parser.add_argument("--out", metavar="FILE", help="also write the JSON report here")


def _sim_from_args(args: argparse.Namespace):
    file_values = pathio.load_config_file(args.config) if args.config else {}
    overrides = {}
    for key in _SIM_FLAG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    return pathio.build_sim_config(file_values, **overrides)


def _read_matrix_file(filename: str) -> np.ndarray:
    try:
        with open(filename) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputFormatError(f"{filename}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{filename}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InputFormatError(f"{filename}: expected a square matrix, got shape {arr.shape}")
    return arr


def _emit(report: dict, out: str | None) -> None:
    sys.stdout.write(pathio.canonical_json(report))
    if out:
        pathio.write_report(report, out)


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _sim_from_args(args)
    x0 = _read_matrix_file(args.x0_file) if args.x0_file else None
    path = simulate_wishart(cfg, x0, replica=args.replica)
    if args.path_out:
        pathio.write_matrix_path(path, args.path_out)
    final = path.values[-1]
    eigs = np.linalg.eigvalsh(final)
    report = {
        "kind": "simulate",
        "config": pathio.jsonify(dataclasses.asdict(cfg)),
        "payload": {"replica": args.replica, "path_out": args.path_out},
        "results": {
            "final": final.tolist(),
            "final_trace": float(np.trace(final)),
            "final_eigenvalues": eigs.tolist(),
            "min_eigenvalue_over_path": path.min_eigenvalue(),
            "stats": pathio.jsonify(path.stats),
        },
        "passed": None,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    _emit(report, args.out)
    return 0


def _cmd_rate(args: argparse.Namespace) -> int:
    cfg = _sim_from_args(args)
    functional = "max_eigenvalue" if args.functional == "max-eigenvalue" else "path"
    spec = ExperimentSpec(
        kind="rate_eval",
        sim=cfg,
        payload={"path_file": args.path, "functional": functional},
        output_path=args.out or "",
    )
    report = run_experiment(spec)
    _emit(report, args.out)
    return 0


def _cmd_riccati(args: argparse.Namespace) -> int:
    cfg = _sim_from_args(args)
    payload: dict = {"measure_file": args.measure}
    if args.x_file:
        payload["x"] = _read_matrix_file(args.x_file).tolist()
    spec = ExperimentSpec(kind="riccati_eval", sim=cfg, payload=payload, output_path=args.out or "")
    report = run_experiment(spec)
    _emit(report, args.out)
    return 0


def _cmd_laplace_check(args: argparse.Namespace) -> int:
    cfg = _sim_from_args(args)
    payload: dict = {"z_max": args.z_max}
    if args.x0_file:
        payload["x0"] = _read_matrix_file(args.x0_file).tolist()
    spec = ExperimentSpec(kind="laplace_check", sim=cfg, payload=payload, output_path=args.out or "")
    report = run_experiment(spec)
    _emit(report, args.out)
    return 0 if report["passed"] else 2


def _parse_epsilons(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise InputFormatError(f"bad --epsilons list {text!r}: {exc}") from exc
    if not values:
        raise InputFormatError("--epsilons must contain at least one value")
    return values


def _write_scan_csv(entries: list[dict], filename: str) -> None:
    lines = ["epsilon,hits,replicas,p_hat,ci_low,ci_high,log_prob,scaled_log_prob"]
    for e in entries:
        log_p = e["log_prob"] if e["log_prob"] is not None else float("nan")
        scaled = e["scaled_log_prob"] if e["scaled_log_prob"] is not None else float("nan")
        lines.append(
            ",".join(
                repr(float(v))
                for v in (
                    e["epsilon"],
                    e["hits"],
                    e["replicas"],
                    e["p_hat"],
                    e["wilson_ci"][0],
                    e["wilson_ci"][1],
                    log_p,
                    scaled,
                )
            )
        )
    with open(filename, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _cmd_ldp_scan(args: argparse.Namespace) -> int:
    cfg = _sim_from_args(args)
    payload: dict = {"radius": args.radius, "epsilons": _parse_epsilons(args.epsilons)}
    if args.target_path:
        payload["target"] = {"path_file": args.target_path}
    elif args.target_curvature is not None:
        payload["target"] = {"scalar_quadratic": {"curvature": args.target_curvature}}
    spec = ExperimentSpec(kind="ldp_scan", sim=cfg, payload=payload, output_path=args.out or "")
    report = run_experiment(spec)
    if args.csv_out:
        _write_scan_csv(report["results"]["entries"], args.csv_out)
    _emit(report, args.out)
    return 0


def _cmd_eigen_contract(args: argparse.Namespace) -> int:
    cfg = _sim_from_args(args)
    spec = ExperimentSpec(
        kind="eigen_contract",
        sim=cfg,
        payload={"ks_max": args.ks_max},
        output_path=args.out or "",
    )
    report = run_experiment(spec)
    _emit(report, args.out)
    return 0 if report["passed"] else 2


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wishart-ldp", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run the matrix scheme for one replica")
    _add_sim_flags(p)
    p.add_argument("--replica", type=int, default=0, help="replica index (default 0)")
    p.add_argument("--x0-file", metavar="FILE", help="JSON file with the initial matrix")
    p.add_argument(
        "--path-out",
        metavar="FILE",
        help="write the full path (.csv: columns t then row-major upper-triangle entries; .json)",
    )
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("rate", help="evaluate an action functional on a path file")
    _add_sim_flags(p)
    p.add_argument("--path", required=True, metavar="FILE", help="path file (.csv or .json)")
    p.add_argument(
        "--functional",
        choices=("path", "max-eigenvalue"),
        default="path",
        help="which functional to evaluate (max-eigenvalue reads a scalar CSV: columns t,value)",
    )
    p.set_defaults(handler=_cmd_rate)

    p = sub.add_parser("riccati", help="solve the backward matrix Riccati equation")
    _add_sim_flags(p)
    p.add_argument("--measure", required=True, metavar="FILE", help="measure JSON file")
    p.add_argument("--x-file", metavar="FILE", help="initial matrix for the transform value")
    p.set_defaults(handler=_cmd_riccati)

    p = sub.add_parser("laplace-check", help="Monte Carlo endpoint moments vs the closed form")
    _add_sim_flags(p)
    p.add_argument("--z-max", type=float, default=3.0, help="z-score bound for PASS (default 3)")
    p.add_argument("--x0-file", metavar="FILE", help="JSON file with the initial matrix")
    p.set_defaults(handler=_cmd_laplace_check)

    p = sub.add_parser("ldp-scan", help="tube-probability trend over decreasing noise levels")
    _add_sim_flags(p)
    p.add_argument("--radius", type=float, default=0.5, help="tube radius in grid sup operator norm")
    p.add_argument(
        "--epsilons",
        default="0.5,0.35,0.25",
        help="comma-separated strictly decreasing noise levels",
    )
    p.add_argument("--target-path", metavar="FILE", help="target path file sampled on the run grid")
    p.add_argument(
        "--target-curvature",
        type=float,
        help="scalar target delta*t + c*t^2 with this curvature (dim 1 only)",
    )
    p.add_argument(
        "--csv-out",
        metavar="FILE",
        help="write the scan series as CSV (columns epsilon,hits,replicas,p_hat,"
        "ci_low,ci_high,log_prob,scaled_log_prob)",
    )
    p.set_defaults(handler=_cmd_ldp_scan)

    p = sub.add_parser("eigen-contract", help="two-pipeline largest-eigenvalue comparison")
    _add_sim_flags(p)
    p.add_argument("--ks-max", type=float, default=0.05, help="KS distance bound for PASS")
    p.set_defaults(handler=_cmd_eigen_contract)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except SystemExit as exc:  # --help and friends
        code = exc.code
        return int(code) if isinstance(code, int) else 0
    except (InputFormatError, WishartLdpError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main_entry() -> None:
    sys.exit(main())
