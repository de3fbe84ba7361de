"""Command-line runner.

One subcommand per experiment kind plus `presets`. Every run reads a YAML
config (a file path or `preset:<name>`), applies --set overrides, validates,
computes, and writes CSV tables plus a JSON manifest under the output
prefix. Exit codes: 0 success, 2 config error, 3 numerical-domain error;
partially written outputs are removed on failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import yaml

from .config import ConfigError, apply_overrides, load_config_file, validate_config
from .errors import NumericalDomainError
from .manifest import write_manifest, write_table
from .presets import (PRESETS, preset_config, preset_description, preset_names,
                      required_overrides)
from .runner import run_experiment


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sshqed",
        description="Simulate multi-node emitters coupled to a dimerized "
                    "photonic waveguide (energies in units of the mean hopping, "
                    "times in its inverse).")
    sub = parser.add_subparsers(dest="command", required=True)

    kinds = ("spectrum", "boundstate", "sw-couplings", "markov-scan",
             "evolve", "photon-map", "transfer", "run")
    for kind in kinds:
        sp = sub.add_parser(kind, help=f"run a {kind} experiment"
                            if kind != "run" else "run whatever kind the config declares")
        sp.add_argument("--config", required=True,
                        help="YAML config path, or preset:<name>")
        sp.add_argument("--out", default=None, help="output path prefix")
        sp.add_argument("--jobs", type=int, default=1,
                        help="worker processes for sweep points")
        sp.add_argument("--seed", type=int, default=None,
                        help="override disorder.seed")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config leaf (repeatable)")

    lp = sub.add_parser("presets", help="list built-in experiment recipes")
    lp.add_argument("--show", default=None, metavar="NAME",
                    help="print the named recipe as YAML")
    return parser


def _load_raw(spec: str) -> dict:
    if spec.startswith("preset:"):
        name = spec.split(":", 1)[1]
        try:
            return preset_config(name)
        except KeyError as exc:
            raise ConfigError("--config", str(exc)) from exc
    if not os.path.exists(spec):
        raise ConfigError("--config", f"no such file: {spec}")
    return load_config_file(spec)


def _run(args, kind_hint):
    started = time.time()
    raw = _load_raw(args.config)
    raw = apply_overrides(raw, args.set)
    if args.seed is not None:
        disorder = raw.get("disorder")
        if isinstance(disorder, dict):
            disorder["seed"] = args.seed
        else:
            raw["disorder"] = {"strength": 0.0, "seed": args.seed}
    cfg = validate_config(raw, kind_hint)
    prefix = args.out or (raw.get("output", {}) or {}).get("prefix") or cfg.kind
    result = run_experiment(cfg, jobs=max(1, args.jobs))
    written = []
    try:
        for table in result.tables:
            written.append(write_table(table, prefix))
        manifest = write_manifest(prefix, raw, written, time.time() - started,
                                  result.warnings, result.metrics)
        written.append(manifest)
    except BaseException:
        for path in written:
            try:
                os.unlink(path)
            except OSError:
                pass
        raise
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    for path in written:
        print(path)
    return 0


def _show_presets(args) -> int:
    if args.show:
        if args.show not in PRESETS:
            print(f"unknown preset {args.show!r}", file=sys.stderr)
            return 2
        print(yaml.safe_dump(preset_config(args.show), sort_keys=False), end="")
        return 0
    for name in preset_names():
        needed = required_overrides(name)
        extra = f"  [requires --set {', '.join(needed)}]" if needed else ""
        print(f"{name}: {preset_description(name)}{extra}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "presets":
        return _show_presets(args)
    kind_hint = None if args.command == "run" else args.command
    try:
        return _run(args, kind_hint)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalDomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
