"""Two-character motion corpus: loading, validation, subsampling, splits.

Corpus container format (one JSON document per corpus)::

    {"instances": [{"label": "hug", "active_char": 0, "fps": 50,
                    "frames": [[x0, y0, r0, x1, y1, r1], ...]}, ...]}

Coordinates are rescaled into [0, 1]^2 scene units at ingestion when the
corpus strays outside them; rotations pass through untouched.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence

from .actions import BASE_ACTION_TERMS
from .motion import Trajectory, make_trajectory, trajectory_rows

MAX_DURATION_SECONDS = 60.0


class CorpusError(ValueError):
    pass


@dataclass
class MotionInstance:
    trajectory: Trajectory
    action_label: str
    active_char: int

    def __post_init__(self):
        if self.action_label not in BASE_ACTION_TERMS:
            raise CorpusError(f"unknown action label {self.action_label!r}")
        if self.active_char not in (0, 1):
            raise CorpusError(f"active_char must be 0 or 1, got {self.active_char}")
        if self.trajectory.duration_seconds() > MAX_DURATION_SECONDS:
            raise CorpusError(
                f"instance duration {self.trajectory.duration_seconds():.2f}s exceeds "
                f"{MAX_DURATION_SECONDS:.0f}s"
            )


@dataclass
class DatasetSplit:
    train: List[MotionInstance]
    test: List[MotionInstance]


def _corpus_xy_range(raw_instances) -> tuple:
    lo, hi = math.inf, -math.inf
    for inst in raw_instances:
        for row in inst["frames"]:
            for v in (row[0], row[1], row[3], row[4]):
                lo = min(lo, v)
                hi = max(hi, v)
    return lo, hi


def load_charades(path, normalize: bool = True) -> List[MotionInstance]:
    """Load and validate a corpus file.

    Validation failures name the offending instance index. When any x/y
    coordinate falls outside [0, 1], all positions are shifted/scaled by one
    corpus-wide affine map into the unit scene (shape-preserving).
    """
    doc = json.loads(Path(path).read_text())
    raw = doc.get("instances")
    if not isinstance(raw, list):
        raise CorpusError("corpus must contain an 'instances' list")

    for idx, inst in enumerate(raw):
        frames = inst.get("frames")
        if not isinstance(frames, list) or not frames:
            raise CorpusError(f"instance {idx}: missing or empty frames")
        for t, row in enumerate(frames):
            if len(row) != 6:
                raise CorpusError(
                    f"instance {idx}: frame {t} has {len(row)} values; exactly two "
                    "characters (6 values) are required"
                )
            if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in row):
                raise CorpusError(f"instance {idx}: frame {t} has non-finite values")
        if inst.get("label") not in BASE_ACTION_TERMS:
            raise CorpusError(f"instance {idx}: unknown action label {inst.get('label')!r}")
        if inst.get("active_char") not in (0, 1):
            raise CorpusError(f"instance {idx}: active_char must be 0 or 1")
        fps = inst.get("fps")
        if not isinstance(fps, int) or fps <= 0:
            raise CorpusError(f"instance {idx}: fps must be a positive integer")

    offset, scale = 0.0, 1.0
    if normalize and raw:
        lo, hi = _corpus_xy_range(raw)
        if lo < 0.0 or hi > 1.0:
            offset = lo
            scale = 1.0 / max(hi - lo, 1e-12)

    out = []
    for idx, inst in enumerate(raw):
        rows = [
            [
                (row[0] - offset) * scale,
                (row[1] - offset) * scale,
                row[2],
                (row[3] - offset) * scale,
                (row[4] - offset) * scale,
                row[5],
            ]
            for row in inst["frames"]
        ]
        try:
            out.append(
                MotionInstance(
                    trajectory=make_trajectory(rows, inst["fps"]),
                    action_label=inst["label"],
                    active_char=inst["active_char"],
                )
            )
        except (CorpusError, ValueError) as exc:
            raise CorpusError(f"instance {idx}: {exc}") from exc
    return out


def save_charades(path, instances: Sequence[MotionInstance]):
    doc = {
        "instances": [
            {
                "label": inst.action_label,
                "active_char": inst.active_char,
                "fps": inst.trajectory.fps,
                "frames": trajectory_rows(inst.trajectory),
            }
            for inst in instances
        ]
    }
    Path(path).write_text(json.dumps(doc))


def subsample(instance: MotionInstance, src_fps: int = 50, dst_fps: int = 10) -> MotionInstance:
    """Keep every (src/dst)-th frame starting at 0; labels carry over."""
    if instance.trajectory.fps != src_fps:
        raise CorpusError(
            f"instance is at {instance.trajectory.fps} fps, expected {src_fps}"
        )
    if src_fps % dst_fps != 0:
        raise CorpusError(f"{src_fps} fps is not divisible by {dst_fps} fps")
    stride = src_fps // dst_fps
    rows = trajectory_rows(instance.trajectory)[::stride]
    return MotionInstance(
        trajectory=make_trajectory(rows, dst_fps),
        action_label=instance.action_label,
        active_char=instance.active_char,
    )


def split(
    instances: Sequence[MotionInstance], seed: int, n_train: int, n_test: int
) -> DatasetSplit:
    """Seeded random disjoint split; deterministic for a fixed seed."""
    if n_train < 0 or n_test < 0:
        raise ValueError("split sizes must be non-negative")
    if n_train + n_test > len(instances):
        raise ValueError(
            f"cannot draw {n_train}+{n_test} instances from {len(instances)}"
        )
    order = list(range(len(instances)))
    random.Random(seed).shuffle(order)
    train = [instances[i] for i in order[:n_train]]
    test = [instances[i] for i in order[n_train : n_train + n_test]]
    return DatasetSplit(train=train, test=test)


def corpus_stats(instances: Sequence[MotionInstance]) -> dict:
    """Descriptive statistics used by the data tooling and reports."""
    if not instances:
        return {"count": 0, "mean_duration_s": 0.0, "labels": {}}
    durations = [inst.trajectory.duration_seconds() for inst in instances]
    labels: dict = {}
    for inst in instances:
        labels[inst.action_label] = labels.get(inst.action_label, 0) + 1
    return {
        "count": len(instances),
        "mean_duration_s": sum(durations) / len(durations),
        "max_duration_s": max(durations),
        "labels": labels,
    }
