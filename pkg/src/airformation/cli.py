"""Command line: run a simulation, certify a matrix, or sweep seeds.

Exit codes: 0 success/converged, 2 configuration or input error,
3 simulation finished without reaching the convergence tolerance.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path

import numpy as np

from . import config_io, engine
from .analysis import certify
from .model import ConfigError
from .topology import sample_round

__all__ = ["main", "EXIT_OK", "EXIT_CONFIG", "EXIT_NOT_CONVERGED"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NOT_CONVERGED = 3

OUT_DIR_ENV = "AIRFORMATION_OUT"


def _load_config(args) -> "config_io.SimConfig":
    if args.preset and args.config:
        raise ConfigError(["give either --preset or --config, not both"])
    if args.preset:
        config = config_io.preset(args.preset)
    elif args.config:
        config = config_io.parse_config(args.config)
    else:
        raise ConfigError(["one of --preset or --config is required"])
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    return config


def _out_dir(args, default: str) -> Path:
    if args.out:
        return Path(args.out)
    env = os.environ.get(OUT_DIR_ENV)
    if env:
        return Path(env)
    return Path(default)


def _execute(config) -> tuple:
    trace = engine.run(config)
    rounds = [sample_round(config, k) for k in range(trace.rounds_executed())]
    return trace, engine.account_costs(rounds)


def _cmd_run(args) -> int:
    config = _load_config(args)
    trace, report = _execute(config)
    paths = config_io.emit_outputs(trace, report, config, _out_dir(args, "airformation_out"))
    if trace.converged_round is not None:
        err = trace.round_summaries[-1].formation_error
        print(
            f"converged at round {trace.converged_round} "
            f"(t = {trace.round_summaries[-1].t_k + trace.round_summaries[-1].delta:g} s, "
            f"formation error {err:.3e})"
        )
    else:
        err = trace.round_summaries[-1].formation_error if trace.round_summaries else float("nan")
        print(
            f"not converged after {trace.rounds_executed()} rounds "
            f"(formation error {err:.3e})"
        )
    print(
        f"transmissions: broadcast {report.cumulative_broadcast}, "
        f"orthogonal baseline {report.cumulative_orthogonal}"
    )
    for name, path in paths.items():
        print(f"{name}: {path}")
    return EXIT_OK if trace.converged_round is not None else EXIT_NOT_CONVERGED


def _read_matrix(path: Path) -> np.ndarray:
    text = path.read_text()
    delimiter = "," if "," in text else None
    return np.atleast_2d(np.loadtxt(path, delimiter=delimiter))


def _cmd_certify(args) -> int:
    path = Path(args.matrix)
    if not path.exists():
        print(f"matrix file not found: {path}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        matrix = _read_matrix(path)
        cert = certify(matrix, tol=args.tol)
    except ValueError as exc:
        print(f"cannot certify {path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = config_io.dump_json(cert.as_dict())
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    out = _out_dir(args, "airformation_sweep")
    results = []
    for seed in range(args.first_seed, args.first_seed + args.seeds):
        cfg = dataclasses.replace(config, seed=seed)
        trace, report = _execute(cfg)
        config_io.emit_outputs(trace, report, cfg, out / f"seed_{seed:05d}")
        results.append(
            {
                "seed": seed,
                "converged_round": trace.converged_round,
                "rounds_executed": trace.rounds_executed(),
                "final_formation_error": trace.round_summaries[-1].formation_error,
            }
        )
    converged = [r["converged_round"] for r in results if r["converged_round"] is not None]
    summary = {
        "seeds": args.seeds,
        "first_seed": args.first_seed,
        "n_converged": len(converged),
        "median_converged_round": None if not converged else float(np.median(converged)),
        "results": results,
    }
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep_summary.json").write_text(config_io.dump_json(summary))
    print(
        f"{len(converged)}/{args.seeds} seeds converged; "
        f"median converged round: {summary['median_converged_round']}"
    )
    print(f"summary: {out / 'sweep_summary.json'}")
    return EXIT_OK if len(converged) == args.seeds else EXIT_NOT_CONVERGED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="airformation",
        description="Formation-control-over-broadcast simulator and matrix analyzer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute one simulation and write its outputs")
    run_p.add_argument("--preset", help="named preset (e.g. hexagon6)")
    run_p.add_argument("--config", help="config file path or inline JSON")
    run_p.add_argument("--seed", type=int, help="override the config seed")
    run_p.add_argument("--out", help=f"output directory (default ${OUT_DIR_ENV} or ./airformation_out)")
    run_p.set_defaults(func=_cmd_run)

    cert_p = sub.add_parser("certify", help="certify a matrix from a CSV/whitespace file")
    cert_p.add_argument("matrix", help="path to the matrix file")
    cert_p.add_argument("--tol", type=float, default=1e-12, help="row-sum tolerance")
    cert_p.add_argument("--out", help="also write the certificate JSON here")
    cert_p.set_defaults(func=_cmd_certify)

    sweep_p = sub.add_parser("sweep", help="run a battery of seeds and summarize convergence")
    sweep_p.add_argument("--preset", help="named preset (e.g. hexagon6)")
    sweep_p.add_argument("--config", help="config file path or inline JSON")
    sweep_p.add_argument("--seed", type=int, help="override the config seed (base config only)")
    sweep_p.add_argument("--seeds", type=int, required=True, help="number of seeds to run")
    sweep_p.add_argument("--first-seed", type=int, default=0, help="first seed value")
    sweep_p.add_argument("--out", help=f"output directory (default ${OUT_DIR_ENV} or ./airformation_sweep)")
    sweep_p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
