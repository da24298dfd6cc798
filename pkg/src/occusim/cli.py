"""Occupant door-behaviour and office CO2 co-simulation.

Exit codes: 0 success, 1 validation failure, 2 usage or config error,
3 runtime error. Set OCCUSIM_LOG (e.g. DEBUG, INFO) for log output.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .bn import FormatError, NetworkSpec, TwoSliceSpec, learn_cpts, load_network, network_errors, two_slice_errors
from .bn.errors import BNError, LabelOutOfDomain
from .bn.io import dump_network
from .cosim import SimulationError, run_ensemble, run_simulation, summarize
from .io import (
    ColumnMismatch,
    ConfigError,
    load_config,
    manifest,
    parse_trace,
    read_observations,
    read_summary,
    summary_plot_data,
    trace_plot_data,
    write_json,
    write_summary,
    write_trace,
)
from .occupant import parse_calendar

log = logging.getLogger("occusim")

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _validate_one(path: Path) -> list:
    """Problems found in one file; empty when valid."""
    if not path.exists():
        return [f"FileNotFound: {path}"]
    try:
        if path.suffix.lower() == ".csv":
            parse_calendar(path.read_text(encoding="utf-8"))
            return []
        doc = json.loads(path.read_text(encoding="utf-8"))
        if isinstance(doc, dict) and "variables" in doc:
            model = load_network(path)
            errs = two_slice_errors(model) if isinstance(model, TwoSliceSpec) else network_errors(model)
            return [str(e) for e in errs]
        load_config(path)
        return []
    except FileNotFoundError as e:
        return [f"FileNotFound: {e.filename or e}"]
    except (ValueError, BNError) as e:
        return [str(e)]


def cmd_validate(args) -> int:
    status = EXIT_OK
    for p in args.paths:
        problems = _validate_one(Path(p))
        if problems:
            status = EXIT_INVALID
            print(f"INVALID {p}")
            for msg in problems:
                for line in msg.splitlines():
                    print(f"  {line}")
        else:
            print(f"OK {p}")
    return status


def _load(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def cmd_simulate(args) -> int:
    cfg = _load(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    trace_path, manifest_path = out / "trace.csv", out / "manifest.json"
    doc = manifest(cfg, _now(), [str(trace_path)], config_path=str(args.config))
    write_json(doc, manifest_path)
    records = run_simulation(cfg)
    write_trace(records, trace_path)
    doc["finished_at"] = _now()
    write_json(doc, manifest_path)
    print(f"wrote {len(records)} steps to {trace_path}")
    return EXIT_OK


def cmd_mc(args) -> int:
    cfg = _load(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary_path, manifest_path = out / "summary.json", out / "manifest.json"
    outputs = [str(summary_path)]
    if args.traces:
        outputs.append(str(out / "traces"))
    doc = manifest(cfg, _now(), outputs, config_path=str(args.config), runs=args.runs, workers=args.workers)
    write_json(doc, manifest_path)
    traces = run_ensemble(cfg, args.runs, args.workers)
    if args.traces:
        (out / "traces").mkdir(exist_ok=True)
        for i, t in enumerate(traces):
            write_trace(t, out / "traces" / f"run_{i:04d}.csv")
    write_summary(summarize(traces), summary_path)
    doc["finished_at"] = _now()
    write_json(doc, manifest_path)
    print(f"wrote summary of {args.runs} runs to {summary_path}")
    return EXIT_OK


def cmd_learn(args) -> int:
    structure = load_network(args.structure, require_rows=False)
    if not isinstance(structure, NetworkSpec):
        raise ConfigError("learn expects a single-slice network structure")
    try:
        records = read_observations(args.observations, structure.names)
        learned = learn_cpts(structure, records, args.prior)
    except LabelOutOfDomain as e:
        # record index -> CSV line number (header is line 1)
        raise ConfigError(f"line {e.record + 2}: label {e.label!r} not in domain of {e.name!r}") from None
    dump_network(learned, args.out)
    print(f"learned {len(structure.names)} CPTs from {len(records)} records -> {args.out}")
    return EXIT_OK


def cmd_plot_data(args) -> int:
    path = Path(args.input)
    try:
        if path.suffix.lower() == ".json":
            text = summary_plot_data(read_summary(path))
        else:
            text = trace_plot_data(parse_trace(path.read_text(encoding="utf-8")))
    except (ValueError, KeyError, TypeError) as e:
        raise ConfigError(f"{path}: malformed input ({e})") from None
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _positive_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="occusim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"occusim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check network, calendar and scenario files")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="run one seeded co-simulation and write trace.csv")
    p.add_argument("config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("mc", help="run a Monte Carlo ensemble and write summary.json")
    p.add_argument("config")
    p.add_argument("--runs", type=_positive_int, default=100)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default=".")
    p.add_argument("--traces", action="store_true", help="also write every run's trace")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("learn", help="estimate CPTs from a CSV of complete observations")
    p.add_argument("structure")
    p.add_argument("observations")
    p.add_argument("--prior", type=float, default=1.0, help="pseudo-count per cell")
    p.add_argument("--out", default="learned.json")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("plot-data", help="emit whitespace-separated columns from a summary or trace")
    p.add_argument("input")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot_data)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("OCCUSIM_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    if args.command == "learn" and args.prior < 0:
        print("error: --prior must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except SimulationError as e:
        print(f"runtime error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except FileNotFoundError as e:
        print(f"error: file not found: {e.filename or e}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, ColumnMismatch, FormatError, BNError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"runtime error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
