"""Command line: ``lismodes {link,sweep,preset,validate-config}``."""

from __future__ import annotations

import argparse
import logging
import sys

from lismodes.config import ConfigError, load_config
from lismodes.experiment import PRESETS, PointError, _emit, columns, run_link, run_preset, run_sweep


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="PATH", help="CSV output path (default: stdout)")
    common.add_argument("--seed", type=int, metavar="N", help="seed for the randomized SVD")
    common.add_argument("--workers", type=int, metavar="N", help="parallel sweep workers")
    common.add_argument("--mesh-lambda-frac", type=float, metavar="F", help="mesh spacing in wavelengths")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    p = argparse.ArgumentParser(prog="lismodes", description=__doc__)
    sub = p.add_subparsers(dest="verb", required=True)
    for verb, help_ in (("link", "analyse one geometry point"), ("sweep", "run a parameter sweep")):
        sp = sub.add_parser(verb, parents=[common], help=help_)
        sp.add_argument("--config", required=True, metavar="PATH")
    sp = sub.add_parser("preset", parents=[common], help="reproduce a figure as CSV")
    sp.add_argument("name", nargs="?", help="preset name; omit to list presets")
    sp = sub.add_parser("validate-config", help="check a config file and exit")
    sp.add_argument("--config", required=True, metavar="PATH")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (PointError, ValueError, RuntimeError, MemoryError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    if args.verb == "validate-config":
        cfg = load_config(args.config)
        print(f"ok: {len(cfg.sweep_points())} point(s), analysis={cfg.analysis}")
        return 0

    if args.verb == "preset":
        if args.name is None:
            for name, preset in PRESETS.items():
                print(f"{name:34s} {preset.description}")
            return 0
        if args.name not in PRESETS:
            print(f"unknown preset {args.name!r}; choose from {', '.join(PRESETS)}", file=sys.stderr)
            return 2
        run_preset(args.name, args.out, args.seed, args.workers, args.mesh_lambda_frac)
        return 0

    cfg = load_config(args.config).with_overrides(
        seed=args.seed, workers=args.workers, mesh_lambda_frac=args.mesh_lambda_frac
    )
    out = args.out or cfg.output
    if args.verb == "link":
        rows = run_link(cfg)
        _emit(out, columns(cfg), rows)
    else:
        run_sweep(cfg, out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
