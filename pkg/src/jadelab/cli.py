"""Command line entry point.

    jadelab run <config.json | preset> [--out DIR] [--force] [--seed N]
    jadelab sweep <config.json | preset> --ns 20,40,60 [--out FILE] [--seed N]
    jadelab attack <preset> [--seed N] [--no-control] [--out FILE]
    jadelab audit <run-dir>
    jadelab presets [NAME]

Exit codes: 0 success, 1 configuration error, 2 audit failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .adversary import audit_masks
from .config import ExperimentConfig
from .exceptions import ConfigError, TraceError
from .experiments import run_attack, sweep, timed_run
from .outputs import load_run_dir, prepare_dir, write_run
from .presets import PRESETS, get_preset

EXIT_OK, EXIT_CONFIG, EXIT_AUDIT, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("jadelab")


def load_config(ref: str) -> ExperimentConfig:
    """A config file path, or the name of a preset."""
    path = Path(ref)
    if path.is_file():
        return ExperimentConfig.load(path)
    if ref in PRESETS:
        return PRESETS[ref].config
    if path.suffix == ".json" or "/" in ref:
        raise FileNotFoundError(f"{ref}: no such config file")
    return get_preset(ref).config


def _with_seed(cfg: ExperimentConfig, seed) -> ExperimentConfig:
    return cfg if seed is None else replace(cfg, seed=seed)


def cmd_run(args) -> int:
    cfg = _with_seed(load_config(args.config), args.seed)
    out = prepare_dir(Path(args.out) if args.out else Path("out") / cfg.name, args.force)
    trace, elapsed = timed_run(cfg)
    summary = write_run(trace, out, runtime_s=elapsed)
    print(json.dumps({"out": str(out), "competitiveness": summary["competitiveness"],
                      "mean_T_last10pct": summary["mean_T_last10pct"],
                      "runtime_s": round(elapsed, 3), "seed": cfg.seed}))
    return EXIT_OK


def _parse_ns(text: str) -> list[int]:
    try:
        ns = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"ns: expected comma-separated integers, got {text!r}") from None
    if not ns or min(ns) < 1:
        raise ConfigError("ns: need at least one size, all >= 1")
    return ns


def cmd_sweep(args) -> int:
    cfg = _with_seed(load_config(args.config), args.seed)
    rows = sweep(cfg, _parse_ns(args.ns))
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(["n", "competitiveness", "mean_T", "runtime_ms"])
        for r in rows:
            w.writerow([r["n"], repr(r["competitiveness"]), repr(r["mean_T"]), r["runtime_ms"]])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_attack(args) -> int:
    preset = get_preset(args.preset)
    report = run_attack(preset, seed=args.seed, control=not args.no_control)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return EXIT_OK


def cmd_audit(args) -> int:
    cfg, topo, masks = load_run_dir(Path(args.dir))
    report = audit_masks(masks, cfg.budget, topo)
    d = report.as_dict()
    d["worst_window_per_node"] = report.worst_window.tolist()
    if report.open_fraction is not None:
        d["open_fraction_per_node"] = [None if x != x else float(x) for x in report.open_fraction]
    print(json.dumps(d, indent=2, sort_keys=True))
    if not report.passed:
        print(f"budget violated at node(s) {report.violators}: more than "
              f"{report.allowed} of {report.T} rounds jammed", file=sys.stderr)
        return EXIT_AUDIT
    return EXIT_OK


def cmd_presets(args) -> int:
    if args.name:
        p = get_preset(args.name)
        print(p.config.to_json())
    else:
        for name, p in PRESETS.items():
            print(f"{name:26s} {p.description}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jadelab", description=__doc__.split("\n\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    seed = argparse.ArgumentParser(add_help=False)
    seed.add_argument("--seed", type=int, default=None, help="override the master seed")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", parents=[seed], help="run one experiment")
    p.add_argument("config", help="config JSON path or preset name")
    p.add_argument("--out", help="output directory (default out/<name>)")
    p.add_argument("--force", action="store_true", help="overwrite an existing output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", parents=[seed], help="run one experiment per network size")
    p.add_argument("config")
    p.add_argument("--ns", required=True, help="comma-separated node counts")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("attack", parents=[seed], help="run an attack preset with a no-jam control")
    p.add_argument("preset")
    p.add_argument("--no-control", action="store_true")
    p.add_argument("--out", help="also write the JSON report here")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("audit", help="check a run directory's jam history against its budget")
    p.add_argument("dir")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("presets", help="list presets or print one as JSON")
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_presets)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, TraceError) as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
