"""Deterministic CSV tables and the JSON run manifest."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence

from . import __version__


@dataclass
class Table:
    """One result table: column names plus rows of scalars."""

    name: str
    columns: List[str]
    rows: List[Sequence[Any]] = field(default_factory=list)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row width {len(values)} != {len(self.columns)}")
        self.rows.append(values)


def format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    # shortest representation that round-trips, '.' decimal separator
    return "%.17g" % float(value)


def write_table(table: Table, prefix: str) -> str:
    path = f"{prefix}_{table.name}.csv"
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(table.columns) + "\n")
        for row in table.rows:
            fh.write(",".join(format_cell(v) for v in row) + "\n")
    return path


def sha256_of(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(prefix: str, config_echo: dict, outputs: List[str],
                   duration: float, warnings: List[str],
                   metrics: Dict[str, Any]) -> str:
    path = f"{prefix}_manifest.json"
    payload = {
        "tool": {"name": "sshqed", "version": __version__},
        "config": config_echo,
        "outputs": [{"path": os.path.basename(p), "sha256": sha256_of(p)}
                    for p in sorted(outputs)],
        "duration_seconds": round(duration, 6),
        "warnings": list(warnings),
        "metrics": metrics,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
