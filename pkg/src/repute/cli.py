"""Command line front end: ``repute run | tables | validate``."""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import tables as tables_mod
from .config import ConfigError, load_config
from .market import run_scenario
from .report import write_run

OUT_ENV = "REPUTE_OUT_DIR"
DEFAULT_OUT = "repute_out"


def _default_out() -> str:
    return os.environ.get(OUT_ENV, DEFAULT_OUT)


def _run_one(job):
    cfg_path, seed, out_dir = job
    cfg = load_config(cfg_path)
    result = run_scenario(cfg, seed)
    write_run(result, out_dir, cfg.name)
    return str(out_dir), len(result.transcript)


def cmd_run(args) -> int:
    seeds = args.seed or [None]
    jobs = []
    for path in args.config:
        try:
            cfg = load_config(path)
        except ConfigError as exc:
            for e in exc.errors:
                print(e, file=sys.stderr)
            return 2
        for seed in seeds:
            s = cfg.seed if seed is None else seed
            out = Path(args.out)
            if len(args.config) > 1 or len(seeds) > 1:
                out = out / f"{cfg.name}_seed{s}"
            jobs.append((path, s, out))
    try:
        if args.jobs > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                done = list(pool.map(_run_one, jobs))
        else:
            done = [_run_one(j) for j in jobs]
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return 3
    for out, n in done:
        print(f"{out}: {n} transactions")
    return 0


def cmd_tables(args) -> int:
    status = 0
    out_dir = Path(args.out)
    keys = sorted(tables_mod.TABLES) if "all" in args.which else args.which
    for which in keys:
        key = tables_mod.ALIASES.get(which, which)
        cells = tables_mod.compute(key)
        print(f"== {key} ==")
        print(tables_mod.format_table(key, cells))
        failed = [c for c in cells if not c.ok]
        if failed:
            print(f"{len(failed)} cell(s) outside tolerance")
            if args.check:
                status = 1
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            with open(out_dir / f"{key}.csv", "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["row", "column", "ours", "published", "diff", "tolerance", "checked", "ok"])
                for c in cells:
                    w.writerow([c.row, c.column, repr(float(c.ours)), repr(float(c.published)),
                                repr(float(c.error)), c.tolerance, int(c.checked), int(c.ok)])
        except OSError as exc:
            print(f"cannot write output: {exc}", file=sys.stderr)
            return 3
    return status


def cmd_validate(args) -> int:
    status = 0
    for path in args.config:
        try:
            cfg = load_config(path)
        except ConfigError as exc:
            for e in exc.errors:
                print(e)
            status = 1
            continue
        print(f"{path}: ok ({len(cfg.buyers)} buyers, {len(cfg.sellers)} sellers, "
              f"{len(cfg.goods)} goods, {cfg.steps} steps)")
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="repute",
                                description="Dynamic reputation e-market simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run scenario configs and write CSV metrics")
    run.add_argument("config", nargs="+")
    run.add_argument("--seed", type=int, action="append",
                     help="seed (repeatable); defaults to the config's seed")
    run.add_argument("--out", default=None, help=f"output directory (env {OUT_ENV})")
    run.add_argument("--jobs", type=int, default=1, help="parallel independent runs")
    run.set_defaults(func=cmd_run)

    tab = sub.add_parser("tables", help="recompute the published tables")
    tab.add_argument("which", nargs="+",
                     choices=sorted(tables_mod.TABLES) + sorted(tables_mod.ALIASES) + ["all"])
    tab.add_argument("--check", action="store_true",
                     help="exit non-zero if any cell is outside tolerance")
    tab.add_argument("--out", default=None, help=f"directory for CSV output (env {OUT_ENV})")
    tab.set_defaults(func=cmd_tables)

    val = sub.add_parser("validate", help="validate scenario configs")
    val.add_argument("config", nargs="+")
    val.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "out", "unset") is None:
        args.out = _default_out()
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
