"""Command-line entry point ``ddeit``.

Exit codes: 0 success, 2 configuration error, 3 computation error,
4 partial result (some grid points failed and are flagged in the CSV).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import presets
from .config import ConfigError, ScenarioConfig
from .model import InvalidParams, ModelError, validate
from .runs import RUNNERS

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_PARTIAL = 0, 2, 3, 4

COMMANDS = ["spectrum", "widths", "slopes", "group-velocity", "boundaries", "populations",
            "dressed", "check-conditions"]


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="flat YAML file with parameter and grid keys")
    p.add_argument("--out", help="output directory (default: out)")
    p.add_argument("--threads", type=int, help="worker threads for grid points")
    p.add_argument("--suppress-i2", action="store_true", help="drop the I2 term of the Lorentzian average")
    p.add_argument("--clamp-populations", action="store_true",
                   help="fix populations at (1/2, 0, 1/2, 0) in master-equation runs")
    p.add_argument("--temperature", type=float, metavar="K", help="cell temperature in kelvin")
    p.add_argument("--wl", type=float, metavar="MHz", help="Doppler width W_L, overrides temperature")
    p.add_argument("--svg", action="store_true", help="also render SVG plots (needs matplotlib)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ddeit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--preset", help="start from a named scenario")
    sp = sub.add_parser("preset", parents=[common], help="run a named figure scenario")
    sp.add_argument("name", nargs="?", help="preset name, e.g. fig2 or fig12a")
    sp.add_argument("--list", action="store_true", help="list preset names and exit")
    return parser


def _overrides(args) -> dict:
    ov = {}
    if args.out:
        ov["out"] = args.out
    if args.threads is not None:
        ov["threads"] = args.threads
    if args.suppress_i2:
        ov["suppress_i2"] = True
    if args.clamp_populations:
        ov["population_mode"] = "clamped"
    if args.temperature is not None:
        ov.update(temperature=[args.temperature], W_L=None)
    if args.wl is not None:
        ov.update(W_L=[args.wl], temperature=None)
    if args.svg:
        ov["svg"] = True
    return ov


def _configs(args) -> list[tuple[str, dict]]:
    """(command, mapping) pairs after merging preset, file and flags."""
    if args.command == "preset":
        if not args.name:
            raise ConfigError("preset needs a name; use --list to see them")
        runs = [(cmd, cfg) for _, cmd, cfg in presets.resolve(args.name)]
    elif args.preset:
        runs = [(args.command, cfg) for _, _, cfg in presets.resolve(args.preset)]
    else:
        runs = [(args.command, {})]
    out = []
    for cmd, base in runs:
        if args.config:
            merged = ScenarioConfig.from_file(args.config, base).as_mapping()
        else:
            merged = dict(base)
        merged.update(_overrides(args))
        out.append((cmd, merged))
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "preset" and args.list:
        for name in presets.names():
            print(f"{name}\t{presets.PRESETS[name][0]}")
        return EXIT_OK
    try:
        jobs = [(cmd, ScenarioConfig.from_mapping(m)) for cmd, m in _configs(args)]
    except (ConfigError, InvalidParams) as exc:
        print(f"ddeit: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    failures = 0
    for cmd, cfg in jobs:
        if cmd != "lineshapes":
            for w in validate(cfg.params):
                print(f"ddeit: {w}", file=sys.stderr)
        try:
            with np.errstate(all="ignore"):
                result = RUNNERS[cmd](cfg, Path(cfg.out))
        except ModelError as exc:
            print(f"ddeit: computation error: {exc}", file=sys.stderr)
            return EXIT_COMPUTE
        except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
            print(f"ddeit: computation error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_COMPUTE
        except ImportError as exc:
            print(f"ddeit: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        for f in result.files:
            print(f)
        failures += result.failures
    if failures:
        print(f"ddeit: {failures} point(s) failed, see the error column", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
