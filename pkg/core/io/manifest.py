"""Result documents: {command, params, results, manifest} as deterministic JSON.

The manifest records what a rerun needs to reproduce a result: input hashes,
the parsed flags, the seed, package versions, hashes of every artifact
written and, when two inputs cover different years, the trim applied. It
carries no timestamp, so identical runs give byte-identical documents.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import platform

import numpy as np
import pandas as pd
import scipy
import statsmodels

from core import __version__
from core.logkit import get_logger

log = get_logger(__name__)

SIG_DIGITS = 15


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _round(x: float) -> float | None:
    if not np.isfinite(x):
        return None
    return float(f"{x:.{SIG_DIGITS}g}")


def to_jsonable(obj):
    """Plain JSON types; floats at 15 significant digits, NaN/inf as null."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def versions() -> dict[str, str]:
    return {
        "recon": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "statsmodels": statsmodels.__version__,
    }


def build_manifest(inputs: list[str], seed: int, artifacts: list[str], flags: dict | None = None,
                   alignment: dict | None = None) -> dict:
    manifest = {
        "inputs": [{"path": p, "sha256": sha256_file(p)} for p in inputs],
        "flags": dict(flags or {}),
        "seed": int(seed),
        "versions": versions(),
        "artifacts": [{"path": p, "sha256": sha256_file(p)} for p in artifacts],
    }
    if alignment is not None:
        manifest["alignment"] = alignment
    return manifest


def result_document(command: str, params: dict, results: dict, manifest: dict) -> dict:
    return {
        "command": command,
        "params": to_jsonable(params),
        "results": to_jsonable(results),
        "manifest": to_jsonable(manifest),
    }


def dumps(document: dict) -> str:
    return json.dumps(document, indent=2, allow_nan=False) + "\n"


def write_document(path: str, document: dict) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(document))
    log.ok("Wrote %s", path)
    return path
