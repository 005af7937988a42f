"""Run manifests: config snapshot, machine descriptor, seeds, timings,
and a digest inventory of every file a command wrote.

Files flagged deterministic must hash identically across reruns with
the same config; timing-bearing files (train report, cost ledger, the
manifest itself) are expected to differ.
"""

from __future__ import annotations

import os
import platform
import sys
from pathlib import Path

import numpy as np

from .fileio import read_json, sha256_file, write_json

MANIFEST_NAME = "manifest.json"
TOOL_NAME = "poissonlab"
TOOL_VERSION = "0.1.0"


def machine_descriptor() -> dict:
    return {
        "platform": platform.platform(),
        "machine": platform.machine(),
        "processor": platform.processor(),
        "cpu_count": os.cpu_count(),
        "python": sys.version.split()[0],
        "numpy": np.__version__,
    }


def file_entry(out_dir: Path, name: str, deterministic: bool) -> dict:
    path = Path(out_dir) / name
    return {
        "name": name,
        "bytes": path.stat().st_size,
        "sha256": sha256_file(path),
        "deterministic": deterministic,
    }


def write_manifest(out_dir, config_doc: dict, seeds: dict, timings: dict, files: list) -> Path:
    """files is a list of (name, deterministic) pairs already on disk."""
    out_dir = Path(out_dir)
    doc = {
        "tool": {"name": TOOL_NAME, "version": TOOL_VERSION},
        "machine": machine_descriptor(),
        "config": config_doc,
        "seeds": seeds,
        "timings": timings,
        "files": [file_entry(out_dir, name, det) for name, det in files],
    }
    return write_json(out_dir / MANIFEST_NAME, doc)


def load_manifest(run_dir) -> dict:
    path = Path(run_dir) / MANIFEST_NAME
    if not path.exists():
        raise FileNotFoundError(f"no {MANIFEST_NAME} in {run_dir}")
    return read_json(path)
