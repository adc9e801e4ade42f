"""Plain-text persistence: distributions, samples, audit trails, reports.

Floats are written with ``repr`` so files round-trip exactly and do not
depend on the locale.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable

from .outcomes import COLLISION, format_outcome, parse_outcome

__all__ = [
    "write_distribution",
    "read_distribution",
    "write_samples",
    "write_audit",
    "write_json",
    "write_table",
]


def _sorted_items(dist: dict):
    # Outcomes first in lexicographic order, the collision symbol last.
    keys = sorted((k for k in dist if k != COLLISION), key=lambda k: tuple(k))
    if COLLISION in dist:
        keys.append(COLLISION)
    return [(k, dist[k]) for k in keys]


def write_distribution(path, dist: dict, fmt: str | None = None) -> None:
    """CSV ``outcome,value`` or a JSON object of the same pairs (chosen by ``fmt`` or suffix)."""
    path = Path(path)
    fmt = fmt or ("json" if path.suffix == ".json" else "csv")
    items = _sorted_items(dist)
    if fmt == "json":
        obj = {format_outcome(k): float(v) for k, v in items}
        path.write_text(json.dumps(obj, indent=1) + "\n", encoding="utf-8")
    elif fmt == "csv":
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["outcome", "value"])
            for k, v in items:
                writer.writerow([format_outcome(k), repr(float(v))])
    else:
        raise ValueError(f"unknown distribution format {fmt!r}")


def read_distribution(path) -> dict:
    path = Path(path)
    if path.suffix == ".json":
        raw = json.loads(path.read_text(encoding="utf-8"))
        items = raw.items()
    else:
        with path.open(newline="", encoding="utf-8") as fh:
            items = [(row["outcome"], row["value"]) for row in csv.DictReader(fh)]
    return {(COLLISION if k == COLLISION else parse_outcome(k)): float(v) for k, v in items}


def write_samples(fh, records: Iterable) -> None:
    """``sample_id,outcome`` rows; the outcome is the sorted mode list or ``c``."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["sample_id", "outcome"])
    for i, rec in enumerate(records):
        writer.writerow([i, format_outcome(rec.ordered)])


def write_audit(fh, records: Iterable) -> None:
    """One JSON line per sampling step, tagged with its sample id."""
    for i, rec in enumerate(records):
        for step in rec.steps:
            fh.write(json.dumps({"sample_id": i, **step}, sort_keys=True) + "\n")


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def write_table(path, rows: list[dict]) -> None:
    if not rows:
        Path(path).write_text("", encoding="utf-8")
        return
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
