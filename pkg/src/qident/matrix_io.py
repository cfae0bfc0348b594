"""CSV and JSON input/output.

Matrix CSV files are headerless: one row per line, comma-separated values.
Design matrices must contain integer 0/1 entries only.  Model bundles are
JSON objects with keys ``theta``, ``a``, ``q`` (row-major arrays of arrays)
and optional ``bound_c``; emitted bundles always carry the resolved
``bound_c``.
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .design_matrix import DesignMatrix
from .factor_model import FactorModel

__all__ = [
    "read_matrix_csv",
    "read_design_csv",
    "format_matrix_csv",
    "load_bundle",
    "parse_bundle",
    "bundle_dict",
    "format_bundle",
]


def read_matrix_csv(path) -> np.ndarray:
    """Read a real matrix from a headerless CSV file."""
    rows: list[list[float]] = []
    with open(path, newline="") as handle:
        for lineno, row in enumerate(csv.reader(handle), start=1):
            if not row:
                continue
            try:
                rows.append([float(cell) for cell in row])
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
    if not rows:
        raise ValueError(f"{path}: no data rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"{path}: rows have inconsistent lengths")
    return np.array(rows, dtype=float)


def read_design_csv(path) -> DesignMatrix:
    """Read a 0/1 design matrix from a headerless CSV file."""
    rows: list[list[int]] = []
    with open(path, newline="") as handle:
        for lineno, row in enumerate(csv.reader(handle), start=1):
            if not row:
                continue
            parsed = []
            for cell in row:
                cell = cell.strip()
                if cell not in ("0", "1"):
                    raise ValueError(f"{path}: line {lineno}: expected 0 or 1, got {cell!r}")
                parsed.append(int(cell))
            rows.append(parsed)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"{path}: rows have inconsistent lengths")
    return DesignMatrix(rows)


def format_matrix_csv(arr) -> str:
    """Render a matrix as headerless CSV, one row per line."""
    arr = np.asarray(arr)
    lines = []
    for row in np.atleast_2d(arr):
        lines.append(",".join(_format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _format_cell(value) -> str:
    value = float(value)
    if math.isnan(value):
        return "nan"
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def parse_bundle(payload: dict) -> FactorModel:
    """Build a model from a decoded bundle dict."""
    if not isinstance(payload, dict):
        raise ValueError("bundle must be a JSON object")
    missing = [key for key in ("theta", "a", "q") if key not in payload]
    if missing:
        raise ValueError(f"bundle is missing keys: {', '.join(missing)}")
    return FactorModel(
        payload["theta"], payload["a"], DesignMatrix(payload["q"]),
        bound_c=payload.get("bound_c"),
    )


def load_bundle(path) -> FactorModel:
    """Read a model bundle from a JSON file."""
    with open(path) as handle:
        try:
            payload = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON: {exc}") from exc
    try:
        return parse_bundle(payload)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def bundle_dict(model: FactorModel) -> dict:
    """JSON-ready bundle with fixed key order."""
    return {
        "theta": model.theta.tolist(),
        "a": model.a.tolist(),
        "q": model.q.entries.tolist(),
        "bound_c": model.bound_c,
    }


def format_bundle(model: FactorModel) -> str:
    return json.dumps(bundle_dict(model), indent=2)
