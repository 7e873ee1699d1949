"""Command-line experiment runner: ``run``, ``sweep`` and ``verify``.

Resolution order for every config field: built-in defaults, then the flat
JSON ``--config`` file, then explicit flags.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import metrics, oracle, rng
from .antijam import ConfigError
from .engine import SNAPSHOT_HEADER, Protocol, SimConfig, Simulator

log = logging.getLogger("antijam_sim")

EXIT_OK, EXIT_ERROR, EXIT_CONFIG, EXIT_VERIFY = 0, 1, 2, 3

DEFAULTS = {
    "n": 1000,
    "steps": 100_000,
    "seed": 0,
    "protocol": "antijam",
    "T": 100,
    "epsilon": 0.5,
    "strategy": "busy-det",
    "gamma": 0.1,
    "p_hat": 1 / 24,
    "cw_min": 15,
    "cw_max": 1023,
}

# flag dest -> config field
_FLAG_FIELDS = {
    "n": "n", "steps": "steps", "seed": "seed", "protocol": "protocol",
    "strategy": "strategy", "epsilon": "epsilon", "window_T": "T", "gamma": "gamma",
    "p_hat": "p_hat", "cw_min": "cw_min", "cw_max": "cw_max",
}
_ANTIJAM_ONLY = ("gamma", "p_hat", "initial_p", "initial_T")
_DCF_ONLY = ("cw_min", "cw_max")

SWEEP_AXES = {"n": int, "epsilon": float, "gamma": float, "p_hat": float, "strategy": str}


def resolve_config(fields: dict) -> SimConfig:
    """Build a ``SimConfig`` from a flat dict, dropping fields of the other protocol."""
    d = dict(fields)
    drop = _DCF_ONLY if str(d.get("protocol", "antijam")).lower() == "antijam" else _ANTIJAM_ONLY
    for k in drop:
        d.pop(k, None)
    return SimConfig.from_dict(d)


def load_config_file(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a flat JSON object")
    return data


def config_from_args(args) -> SimConfig:
    fields = dict(DEFAULTS)
    if args.config:
        fields.update(load_config_file(args.config))
    for dest, name in _FLAG_FIELDS.items():
        value = getattr(args, dest, None)
        if value is not None:
            fields[name] = value
    return resolve_config(fields)


def run_single(config: SimConfig, out_dir, snapshot_every: Optional[int] = None) -> tuple[Path, Path]:
    """Simulate one config; write ``trace.csv`` and ``report.json`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sim = Simulator(config)
    if snapshot_every and config.protocol is Protocol.ANTIJAM:
        with open(out / "snapshots.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SNAPSHOT_HEADER)
            while sim.remaining:
                sim.write_snapshot(w)
                sim.step(snapshot_every)
    trace = sim.run()
    trace_path = out / "trace.csv"
    report_path = out / "report.json"
    trace.to_csv(trace_path)
    report_path.write_text(metrics.report(trace, config).to_json())
    return trace_path, report_path


@dataclass(frozen=True)
class SweepSpec:
    base: SimConfig
    axis: str
    values: tuple
    repetitions: int = 10
    seed_base: int = 0

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ConfigError(f"axis must be one of {sorted(SWEEP_AXES)}, got {self.axis!r}")
        if not self.values:
            raise ConfigError("sweep needs at least one value")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        object.__setattr__(self, "values", tuple(SWEEP_AXES[self.axis](v) for v in self.values))

    def row_seed(self, value_index: int, repetition: int) -> int:
        return rng.derive_seed(self.seed_base, value_index, repetition)

    def configs(self) -> list[tuple[int, int, SimConfig]]:
        rows = []
        for i, value in enumerate(self.values):
            for r in range(self.repetitions):
                d = self.base.to_dict()
                d[self.axis] = value
                d["seed"] = self.row_seed(i, r)
                rows.append((i, r, resolve_config(d)))
        return rows


def _sweep_row(config: SimConfig) -> dict:
    trace = Simulator(config).run()
    return metrics.report(trace, config).scalars()


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def run_sweep(spec: SweepSpec, out_path=None, workers: int = 1) -> list[dict]:
    """One row per (value, repetition), ordered by (value index, repetition)."""
    jobs = spec.configs()
    cfgs = [c for _, _, c in jobs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_row, cfgs))
    else:
        results = []
        for k, c in enumerate(cfgs):
            log.info("sweep row %d/%d", k + 1, len(cfgs))
            results.append(_sweep_row(c))
    rows = []
    for (i, r, cfg), res in zip(jobs, results):
        row = {"axis": spec.axis, "value": spec.values[i], "value_index": i, "repetition": r}
        row.update(cfg.to_dict())
        row.update(res)
        rows.append(row)
    if out_path is not None:
        write_rows(rows, out_path)
    return rows


def write_rows(rows: Sequence[dict], path) -> None:
    columns: list[str] = []
    for row in rows:
        for k in row:
            if k not in columns:
                columns.append(k)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row.get(c)) for c in columns])


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat JSON config file")
    p.add_argument("--n", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--protocol", choices=["antijam", "dcf"])
    p.add_argument("--strategy", choices=["busy-prob", "busy-det", "idle-det", "none"])
    p.add_argument("--epsilon", type=float)
    p.add_argument("--window-T", dest="window_T", type=int, help="jamming window T")
    p.add_argument("--gamma", type=float)
    p.add_argument("--p-hat", dest="p_hat", type=float)
    p.add_argument("--cw-min", dest="cw_min", type=int)
    p.add_argument("--cw-max", dest="cw_max", type=int)
    p.add_argument("--out", default="out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="antijam-sim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one configuration")
    _add_config_flags(p_run)
    p_run.add_argument("--snapshot-every", type=int, default=None,
                       help="also write per-node state every K slots (AntiJam)")

    p_sweep = sub.add_parser("sweep", help="sweep one parameter")
    _add_config_flags(p_sweep)
    p_sweep.add_argument("--axis", required=True, choices=sorted(SWEEP_AXES))
    p_sweep.add_argument("--values", required=True, help="comma-separated axis values")
    p_sweep.add_argument("--reps", type=int, default=10)
    p_sweep.add_argument("--workers", type=int, default=1)

    p_verify = sub.add_parser("verify", help="run the property suite")
    p_verify.add_argument("--quick", action="store_true")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")

    if args.command == "verify":
        results = oracle.verify_suite(quick=args.quick)
        for r in results:
            print(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.detail}")
        return EXIT_OK if all(r.ok for r in results) else EXIT_VERIFY

    try:
        config = config_from_args(args)
        if args.command == "run":
            trace_path, report_path = run_single(config, args.out, args.snapshot_every)
            print(trace_path)
            print(report_path)
        else:
            spec = SweepSpec(config, args.axis, tuple(v for v in args.values.split(",") if v),
                             repetitions=args.reps, seed_base=config.seed)
            os.makedirs(args.out, exist_ok=True)
            path = Path(args.out) / "sweep.csv"
            run_sweep(spec, path, workers=args.workers)
            print(path)
    except ValueError as exc:  # ConfigError included
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
