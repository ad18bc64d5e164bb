"""Checkpoint serialization: JSON with base64-encoded float64 tensors.

The raw little-endian bytes round-trip exactly, so a reloaded model
reproduces bit-identical forward passes.
"""
from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict

import numpy as np

FORMAT_NAME = "symstory-checkpoint"
FORMAT_VERSION = 1


@dataclass
class CheckpointData:
    kind: str
    hyper: dict
    params: Dict[str, np.ndarray]
    meta: dict = field(default_factory=dict)


def _encode(arr: np.ndarray) -> dict:
    arr = np.ascontiguousarray(arr, dtype="<f8")
    return {
        "shape": list(arr.shape),
        "dtype": "<f8",
        "data": base64.b64encode(arr.tobytes()).decode("ascii"),
    }


def _decode(entry: dict) -> np.ndarray:
    raw = base64.b64decode(entry["data"])
    arr = np.frombuffer(raw, dtype=entry["dtype"]).copy()
    return arr.reshape(entry["shape"])


def save_checkpoint(path, ckpt: CheckpointData):
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": ckpt.kind,
        "hyper": ckpt.hyper,
        "meta": ckpt.meta,
        "params": {name: _encode(arr) for name, arr in ckpt.params.items()},
    }
    Path(path).write_text(json.dumps(doc))


def load_checkpoint(path) -> CheckpointData:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != FORMAT_NAME:
        raise ValueError(f"not a {FORMAT_NAME} file: {path}")
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint version {doc.get('version')}")
    return CheckpointData(
        kind=doc["kind"],
        hyper=doc["hyper"],
        params={name: _decode(entry) for name, entry in doc["params"].items()},
        meta=doc.get("meta", {}),
    )
