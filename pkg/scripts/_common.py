import argparse
import csv
import logging
from collections import defaultdict
from pathlib import Path

import numpy as np


def parser(description, steps=1_000_000, reps=10):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--steps", type=int, default=steps)
    p.add_argument("--reps", type=int, default=reps)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("out"))
    return p


def setup(args):
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args.out.mkdir(parents=True, exist_ok=True)


def summarize(rows, group, field="throughput"):
    """Mean and sample std of ``field`` per value of ``group`` (insertion order)."""
    acc = defaultdict(list)
    for r in rows:
        acc[r[group]].append(r[field])
    return {k: (float(np.mean(v)), float(np.std(v, ddof=1)) if len(v) > 1 else 0.0) for k, v in acc.items()}


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(path)
