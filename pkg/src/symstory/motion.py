"""Motion data model and kinematic pre/post-processing.

Two triangular character symbols move on a 2D playground. A pose is
(x, y, rotation); positions live in normalized [0, 1]^2 scene units and
rotations are radians, stored unwrapped. All functions here are pure and
reentrant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

SCENE_MIN = 0.0
SCENE_MAX = 1.0


@dataclass(frozen=True)
class Pose:
    """Position and rotation of one character symbol."""

    x: float
    y: float
    r: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.r)):
            raise ValueError(f"non-finite pose ({self.x}, {self.y}, {self.r})")

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.x, self.y, self.r)


@dataclass(frozen=True)
class Frame:
    """One timeline sample: exactly two poses, indexed by character id."""

    poses: Tuple[Pose, Pose]
    t: int

    def __post_init__(self):
        if len(self.poses) != 2:
            raise ValueError(f"frame must hold exactly two poses, got {len(self.poses)}")
        if self.t < 0:
            raise ValueError(f"negative frame index {self.t}")


@dataclass
class Trajectory:
    """Ordered frames at a fixed frame rate. Runtime pipelines use fps=10."""

    frames: list
    fps: int

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        for i, f in enumerate(self.frames):
            if f.t != i:
                raise ValueError(f"frame indices must be consecutive from 0; frame {i} has t={f.t}")

    def __len__(self) -> int:
        return len(self.frames)

    def duration_seconds(self) -> float:
        return len(self.frames) / self.fps


@dataclass(frozen=True)
class KinematicFeatures:
    """The six-feature input vector for the motion generators.

    Order is fixed: (dx, dy, xdist, ydist, r0, r1). dx/dy are the moving
    character's per-step deltas, xdist/ydist the signed inter-character
    distances, r0/r1 both rotations.
    """

    dx: float
    dy: float
    xdist: float
    ydist: float
    r0: float
    r1: float

    def as_vector(self) -> np.ndarray:
        return np.array([self.dx, self.dy, self.xdist, self.ydist, self.r0, self.r1], dtype=np.float64)


def delta(curr: Pose, prev: Pose) -> Tuple[float, float]:
    """Per-step position delta of one character between consecutive frames."""
    return (curr.x - prev.x, curr.y - prev.y)


def pair_distance(a: Pose, b: Pose) -> Tuple[float, float]:
    """Signed inter-character distance (a - b), componentwise. Not Euclidean."""
    return (a.x - b.x, a.y - b.y)


def _check_consecutive(frame_t: Frame, frame_prev: Optional[Frame]):
    if frame_prev is None:
        return
    if frame_t.t != frame_prev.t + 1:
        raise ValueError(
            f"frames must be consecutive: got t={frame_t.t} after t={frame_prev.t}"
        )


def proactive_features(frame_t: Frame, frame_prev: Optional[Frame]) -> KinematicFeatures:
    """Features for the sym0 generator: sym1's deltas, sym1 - sym0 distance.

    The first frame of a segment has no predecessor; its deltas are 0.
    """
    _check_consecutive(frame_t, frame_prev)
    p0, p1 = frame_t.poses
    if frame_prev is None:
        dx, dy = 0.0, 0.0
    else:
        dx, dy = delta(p1, frame_prev.poses[1])
    xdist, ydist = pair_distance(p1, p0)
    return KinematicFeatures(dx, dy, xdist, ydist, p0.r, p1.r)


def reactive_features(frame_t: Frame, frame_prev: Optional[Frame]) -> KinematicFeatures:
    """Features for the sym1 generator: sym0's deltas, sym0 - sym1 distance."""
    _check_consecutive(frame_t, frame_prev)
    p0, p1 = frame_t.poses
    if frame_prev is None:
        dx, dy = 0.0, 0.0
    else:
        dx, dy = delta(p0, frame_prev.poses[0])
    xdist, ydist = pair_distance(p0, p1)
    return KinematicFeatures(dx, dy, xdist, ydist, p0.r, p1.r)


def apply_motion_delta(curr: Pose, out: Tuple[float, float, float]) -> Pose:
    """Integrate a generator output (dx, dy, r_next) into the next pose.

    Position is integrated; rotation is replaced outright (the generators
    emit absolute next-frame rotation, not a rotation delta).
    """
    dx, dy, r_next = out
    return Pose(curr.x + dx, curr.y + dy, r_next)


@dataclass(frozen=True)
class SceneBounds:
    """Axis-aligned playground rectangle."""

    x_min: float = SCENE_MIN
    y_min: float = SCENE_MIN
    x_max: float = SCENE_MAX
    y_max: float = SCENE_MAX

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("degenerate scene bounds")


UNIT_BOUNDS = SceneBounds()


def clamp_to_scene(p: Pose, bounds: SceneBounds = UNIT_BOUNDS) -> Pose:
    """Clamp position into the playground; rotation passes through."""
    x = min(max(p.x, bounds.x_min), bounds.x_max)
    y = min(max(p.y, bounds.y_min), bounds.y_max)
    return Pose(x, y, p.r)


def frame_coordinates(frame: Frame) -> np.ndarray:
    """Raw per-frame recognizer input: (x0, y0, r0, x1, y1, r1)."""
    p0, p1 = frame.poses
    return np.array([p0.x, p0.y, p0.r, p1.x, p1.y, p1.r], dtype=np.float64)


def make_trajectory(rows: Sequence[Sequence[float]], fps: int) -> Trajectory:
    """Build a trajectory from rows of (x0, y0, r0, x1, y1, r1)."""
    frames = []
    for i, row in enumerate(rows):
        if len(row) != 6:
            raise ValueError(f"frame row {i} must have 6 values, got {len(row)}")
        frames.append(
            Frame(
                poses=(
                    Pose(float(row[0]), float(row[1]), float(row[2])),
                    Pose(float(row[3]), float(row[4]), float(row[5])),
                ),
                t=i,
            )
        )
    return Trajectory(frames=frames, fps=fps)


def trajectory_rows(traj: Trajectory) -> list:
    """Inverse of make_trajectory: rows of (x0, y0, r0, x1, y1, r1)."""
    out = []
    for f in traj.frames:
        p0, p1 = f.poses
        out.append([p0.x, p0.y, p0.r, p1.x, p1.y, p1.r])
    return out
