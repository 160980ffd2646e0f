"""Deterministic artifact serialization.

Every number is written through Python's shortest round-trip float repr,
dict keys keep insertion order, and no timestamps or environment details
leak into the files, so re-running a command with the same config yields
byte-identical artifacts.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SCHEMA_VERSION = "1"


def jsonable(obj):
    """Recursively convert numpy scalars/arrays for the json encoder."""
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(path: Path, obj: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(jsonable(obj), indent=2, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")


def write_csv(path: Path, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    """Column-oriented CSV with full-precision floats."""
    if len(header) != len(columns):
        raise ValueError("one header entry per column")
    n = len(columns[0])
    if any(len(c) != n for c in columns):
        raise ValueError("columns must have equal length")
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    cols = [np.asarray(c, dtype=np.float64) for c in columns]
    for i in range(n):
        lines.append(",".join(repr(float(c[i])) for c in cols))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_csv_columns(path: Path, expected_header: Sequence[str]) -> list[np.ndarray]:
    """Read back a CSV written by write_csv, enforcing the header."""
    text = path.read_text(encoding="utf-8").strip().split("\n")
    header = text[0].split(",")
    if header != list(expected_header):
        raise ValueError(f"{path}: expected header {','.join(expected_header)}, got {text[0]}")
    rows = [line.split(",") for line in text[1:]]
    cols = []
    for j in range(len(header)):
        cols.append(np.asarray([float(r[j]) for r in rows], dtype=np.float64))
    return cols
