"""Deterministic artifact writers: CSV with '\\n' line endings and a
mandatory header, JSON with sorted keys and shortest round-trip floats.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np


def jsonable(obj):
    """Recursively convert numpy scalars/arrays so json can emit them."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def format_cell(value) -> str:
    """CSV cell text; floats use repr for lossless, stable round-trips."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    lines = [",".join(header)]
    lines.extend(",".join(format_cell(cell) for cell in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(
        json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return path


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    digest.update(Path(path).read_bytes())
    return digest.hexdigest()
