"""Command-line entry point.

    relsemcom run             --config C --profile P --out DIR [--seed N] [--horizon N]
    relsemcom sweep           --config C --profile P --out DIR [--horizon N] [--workers K]
    relsemcom stitch-profile  --config C --out DIR
    relsemcom validate-config --config C [--profile P]

Exit codes: 0 ok, 1 usage, 2 invalid config/profile, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .config import ConfigError, SimConfig, load_config, with_overrides
from .profiles import build_profile, load_profile, profile_csv_text, space_to_table
from .simulator import run, summarize, summary_csv_text, sweep, sweep_csv_text, timeseries_export

log = logging.getLogger("relsemcom")

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="relsemcom", description="Dynamic relative-representation semantic communication simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, profile=True, out=True):
        p.add_argument("--config", type=Path, help="INI configuration file (defaults if omitted)")
        if profile:
            p.add_argument("--profile", type=Path, help="encoder/accuracy profile CSV (overrides [simulation] profile)")
        if out:
            p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--seed", type=int, help="run seed (overrides config)")
        p.add_argument("--horizon", type=int, help="number of slots (overrides config)")

    common(sub.add_parser("run", help="simulate one configuration, write slots.csv"))
    p = sub.add_parser("sweep", help="L_bar x G_bar x seed sweep, write sweep.csv and sweep_summary.csv")
    common(p)
    p.add_argument("--workers", type=int, default=1)
    common(sub.add_parser("stitch-profile", help="build the accuracy profile from the stitching study"), profile=False)
    common(sub.add_parser("validate-config", help="check a configuration (and profile) and exit"), out=False)
    return parser


def resolve_config(args) -> SimConfig:
    cfg = load_config(args.config) if args.config else SimConfig()
    cfg = with_overrides(cfg, seed=args.seed, horizon=args.horizon)
    profile = getattr(args, "profile", None)
    if profile is not None:
        cfg = dataclasses.replace(cfg, profile=str(profile))
    return cfg


def _profile_path(cfg: SimConfig, args) -> Path:
    if not cfg.profile:
        raise ConfigError("no profile given (use --profile or [simulation] profile)")
    path = Path(cfg.profile)
    # relative profile paths in a config file are taken relative to that file
    if not path.is_absolute() and getattr(args, "profile", None) is None and args.config is not None:
        path = args.config.parent / path
    return path


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage() + "relsemcom: error: a subcommand is required")
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")

    try:
        cfg = resolve_config(args)
        space = None
        if args.command in ("run", "sweep") or (args.command == "validate-config" and cfg.profile):
            space = load_profile(_profile_path(cfg, args))
            cfg.validate_against(space)
    except (ConfigError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "validate-config":
            print("ok")
        elif args.command == "run":
            rec = run(cfg, space)
            if len(rec):
                args.out.mkdir(parents=True, exist_ok=True)
                path = timeseries_export(rec, args.out / "slots.csv")
                log.info("wrote %s", path)
                print(f"avg_power={rec.avg_power!r} avg_latency={rec.avg_latency!r} "
                      f"avg_accuracy={rec.avg_accuracy!r} violation_freq={rec.violation_freq!r}")
            else:
                print("horizon is 0: nothing simulated")
        elif args.command == "sweep":
            grid = cfg.sweep if args.horizon is None else dataclasses.replace(cfg.sweep, horizon=args.horizon)
            rows = sweep(grid, cfg, space, workers=args.workers)
            _write(args.out, "sweep.csv", sweep_csv_text(rows))
            _write(args.out, "sweep_summary.csv", summary_csv_text(summarize(rows)))
            print(f"{len(rows)} sweep rows written to {args.out}")
        elif args.command == "stitch-profile":
            space = build_profile(cfg.stitching)
            path = _write(args.out, "profile.csv", profile_csv_text(space.encoders, space_to_table(space)))
            print(f"profile written to {path}")
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - surfaced as exit code 3
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
