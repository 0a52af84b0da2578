"""Deterministic artifact writers: JSON reports, contour CSV and the run manifest."""
from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Iterable, List

import numpy as np

from . import __version__
from .sigma import SigmaGrid

CONTOUR_HEADER = ("q1", "q2", "member", "lhs", "rhs")


def jsonable(obj):
    """Plain-JSON copy of ``obj``: numpy scalars/arrays unwrapped, non-finite floats as strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_contour(grid: SigmaGrid, path) -> Path:
    """CSV q1,q2,member,lhs,rhs in row-major grid order (q1 slowest)."""
    if grid.points.shape[1] != 2:
        raise ValueError("contour emission needs a 2-d scan")
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CONTOUR_HEADER)
        for (q1, q2), m, lhs, rhs in zip(grid.points, grid.member, grid.lhs, grid.rhs):
            w.writerow((_fmt(q1), _fmt(q2), int(bool(m)), _fmt(lhs), _fmt(rhs)))
    return path


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def config_hash(config: dict) -> str:
    blob = json.dumps(jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def write_manifest(out_dir, config: dict, seed: int, artifacts: Iterable, status: str,
                   exit_code: int) -> Path:
    """manifest.json listing every artifact with its sha256; no timestamps, so reruns match."""
    out_dir = Path(out_dir)
    entries: List[dict] = []
    for p in sorted(Path(a) for a in artifacts):
        entries.append({"path": p.relative_to(out_dir).as_posix(), "sha256": sha256_file(p)})
    doc = {"version": __version__, "config": config, "config_hash": config_hash(config),
           "seed": seed, "artifacts": entries, "status": status, "exit_code": exit_code}
    return write_json(out_dir / "manifest.json", doc)
