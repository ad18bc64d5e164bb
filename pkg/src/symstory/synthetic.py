"""Synthetic two-character motion generation.

Produces deterministic, label-distinctive motion instances for desk-scale
training, fixtures, and demos. A handful of action terms get hand-shaped
motion patterns; the remaining lexicon terms fall back to a parametric
family whose parameters derive from the term, so every label still yields
a distinct, repeatable motion.
"""
from __future__ import annotations

import hashlib
import math
from typing import List, Optional, Sequence

import numpy as np

from .actions import BASE_ACTION_TERMS
from .dataset import MotionInstance
from .motion import make_trajectory

TARGET_MEAN_DURATION_S = 6.45


def _label_seed(label: str, seed: int) -> int:
    h = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    return int.from_bytes(h[:8], "big")


def _unwrap(angles: np.ndarray) -> np.ndarray:
    return np.unwrap(angles)


def _facing(from_xy: np.ndarray, to_xy: np.ndarray) -> np.ndarray:
    d = to_xy - from_xy
    return np.arctan2(d[:, 1], d[:, 0])


def _agent_target_paths(label: str, n: int, rng: np.random.Generator):
    """Return (agent_xy, target_xy) arrays of shape (n, 2) in scene units."""
    t = np.linspace(0.0, 1.0, n)
    ax = np.zeros((n, 2))
    bx = np.zeros((n, 2))

    if label == "approach":
        b = np.array([0.75, 0.5])
        start = np.array([0.15, 0.45])
        end = b + np.array([-0.1, 0.0])
        ax[:] = start + (end - start) * t[:, None]
        bx[:] = b
    elif label == "escape":
        b0 = np.array([0.6, 0.5])
        a0 = np.array([0.45, 0.5])
        ax[:, 0] = a0[0] - 0.38 * t
        ax[:, 1] = a0[1] + 0.08 * np.sin(2 * math.pi * t)
        bx[:, 0] = b0[0] - 0.15 * t
        bx[:, 1] = b0[1]
    elif label == "chase":
        lag = max(2, n // 6)
        path_x = 0.2 + 0.6 * t
        path_y = 0.5 + 0.18 * np.sin(3 * math.pi * t)
        bx[:, 0] = path_x
        bx[:, 1] = path_y
        ax[lag:] = bx[:-lag]
        ax[:lag] = bx[0] - np.array([0.12, 0.0])
    elif label == "encircle":
        center = np.array([0.5, 0.5])
        # back-and-forth arc keeps rotations from winding up
        ang = 1.5 * math.pi * np.sin(math.pi * t)
        ax[:, 0] = center[0] + 0.24 * np.cos(ang)
        ax[:, 1] = center[1] + 0.24 * np.sin(ang)
        bx[:] = center
    elif label == "hug":
        b = np.array([0.62, 0.5])
        contact = 0.55
        approach = np.clip(t / contact, 0.0, 1.0)
        start = np.array([0.25, 0.52])
        end = b + np.array([-0.06, 0.0])
        ax[:] = start + (end - start) * approach[:, None]
        wob = 0.008 * np.sin(10 * math.pi * np.clip((t - contact) / (1 - contact), 0, 1))
        ax[:, 0] += np.where(t > contact, wob, 0.0)
        bx[:] = b
    elif label == "push":
        contact = 0.4
        b0 = np.array([0.5, 0.5])
        a_start = np.array([0.2, 0.5])
        pre = np.clip(t / contact, 0, 1)
        post = np.clip((t - contact) / (1 - contact), 0, 1)
        shove = 0.3 * post
        ax[:] = a_start + (b0 - np.array([0.07, 0.0]) - a_start) * pre[:, None]
        ax[:, 0] += shove
        bx[:] = b0
        bx[:, 0] += shove
    elif label == "follow":
        lag = max(3, n // 4)
        bx[:, 0] = 0.25 + 0.55 * t
        bx[:, 1] = 0.4 + 0.2 * t
        ax[lag:] = bx[:-lag]
        ax[:lag] = bx[0] - np.array([0.1, 0.05])
    elif label == "avoid":
        b0 = np.array([0.3, 0.5])
        a0 = np.array([0.6, 0.5])
        bx[:] = b0 + (a0 - b0 + np.array([0.05, 0.0])) * t[:, None]
        ax[:, 0] = a0[0] + 0.15 * t
        ax[:, 1] = a0[1] + 0.3 * np.sin(0.5 * math.pi * t)
    elif label == "hit":
        strike = 0.5
        b0 = np.array([0.6, 0.5])
        a_start = np.array([0.25, 0.5])
        pre = np.clip(t / strike, 0, 1) ** 2  # accelerating wind-up
        post = np.clip((t - strike) / (1 - strike), 0, 1)
        ax[:] = a_start + (b0 - np.array([0.06, 0.0]) - a_start) * pre[:, None]
        ax[:, 0] -= 0.08 * post  # recoil
        bx[:] = b0
        bx[:, 0] += np.where(t > strike, 0.18 * post, 0.0)  # knocked back
    elif label == "kiss":
        mid = np.array([0.5, 0.5])
        ax[:] = np.array([0.3, 0.5]) + (mid - np.array([0.33, 0.0]) - np.array([0.3, 0.5])) * t[:, None]
        bx[:] = np.array([0.7, 0.5]) + (mid + np.array([0.33, 0.0]) - np.array([0.7, 0.5])) * t[:, None]
        # converge to adjacency, not overlap
        ax[:, 0] = np.minimum(ax[:, 0], mid[0] - 0.045)
        bx[:, 0] = np.maximum(bx[:, 0], mid[0] + 0.045)
    elif label == "pull":
        grab = 0.35
        b0 = np.array([0.62, 0.5])
        pre = np.clip(t / grab, 0, 1)
        post = np.clip((t - grab) / (1 - grab), 0, 1)
        ax[:] = np.array([0.35, 0.5]) + (b0 - np.array([0.07, 0.0]) - np.array([0.35, 0.5])) * pre[:, None]
        ax[:, 0] -= 0.3 * post
        bx[:] = b0
        bx[:, 0] -= np.where(t > grab, 0.3 * post, 0.0)
    elif label == "lead":
        lag = max(3, n // 5)
        ax[:, 0] = 0.3 + 0.5 * t
        ax[:, 1] = 0.55 - 0.15 * t
        bx[lag:] = ax[:-lag]
        bx[:lag] = ax[0] - np.array([0.1, 0.0])
    else:
        # parametric fallback: term-specific orbit/approach mixture
        lrng = np.random.default_rng(_label_seed(label, 0))
        fa = lrng.uniform(0.5, 2.5)
        fb = lrng.uniform(0.2, 1.5)
        pha = lrng.uniform(0, 2 * math.pi)
        rad = lrng.uniform(0.08, 0.3)
        pull = lrng.uniform(-0.25, 0.45)
        center = np.array([0.5, 0.5])
        ax[:, 0] = center[0] - 0.25 + pull * t + rad * np.sin(2 * math.pi * fa * t + pha)
        ax[:, 1] = center[1] + rad * np.cos(2 * math.pi * fa * t * 0.5 + pha)
        bx[:, 0] = center[0] + 0.2 - 0.1 * np.sin(2 * math.pi * fb * t)
        bx[:, 1] = center[1] + 0.1 * np.cos(2 * math.pi * fb * t)

    jitter = rng.normal(0.0, 0.004, size=(2, n, 2))
    return np.clip(ax + jitter[0], 0.02, 0.98), np.clip(bx + jitter[1], 0.02, 0.98)


def synthesize_instance(
    label: str,
    seed: int = 0,
    fps: int = 10,
    duration_s: float = 3.0,
    active_char: Optional[int] = None,
) -> MotionInstance:
    """One deterministic motion instance for an action term."""
    if label not in BASE_ACTION_TERMS:
        raise ValueError(f"unknown action label {label!r}")
    n = max(2, round(duration_s * fps))
    rng = np.random.default_rng(_label_seed(label, seed))
    agent_xy, target_xy = _agent_target_paths(label, n, rng)

    away = label in ("escape", "avoid", "leave", "ignore")
    ra = _facing(agent_xy, target_xy)
    if away:
        ra = ra + math.pi
    rb = _facing(target_xy, agent_xy)
    ra = _unwrap(ra)
    rb = _unwrap(rb)

    active = int(rng.integers(0, 2)) if active_char is None else active_char
    rows: List[List[float]] = []
    for i in range(n):
        a = [float(agent_xy[i, 0]), float(agent_xy[i, 1]), float(ra[i])]
        b = [float(target_xy[i, 0]), float(target_xy[i, 1]), float(rb[i])]
        rows.append(a + b if active == 0 else b + a)
    return MotionInstance(
        trajectory=make_trajectory(rows, fps),
        action_label=label,
        active_char=active,
    )


# labels with hand-shaped motion patterns; overfit fixtures draw from these
PATTERNED_LABELS = (
    "approach",
    "escape",
    "chase",
    "encircle",
    "hug",
    "push",
    "follow",
    "avoid",
    "hit",
    "kiss",
    "pull",
    "lead",
)


def overfit_instances(count: int = 8, seed: int = 0, fps: int = 10) -> List[MotionInstance]:
    """Distinct-label instances for memorization checks; alternating agents."""
    labels = PATTERNED_LABELS[:count]
    return [
        synthesize_instance(label, seed=seed, fps=fps, duration_s=2.6, active_char=i % 2)
        for i, label in enumerate(labels)
    ]


def make_corpus(
    count: int,
    seed: int = 0,
    fps: int = 50,
    labels: Sequence[str] = BASE_ACTION_TERMS,
    mean_duration_s: float = TARGET_MEAN_DURATION_S,
) -> List[MotionInstance]:
    """A corpus of `count` instances whose mean duration hits the target.

    Durations are sampled uniformly and then rescaled so the sample mean is
    exact, mirroring the source dataset's headline statistic.
    """
    rng = np.random.default_rng(seed)
    durations = rng.uniform(0.55 * mean_duration_s, 1.45 * mean_duration_s, size=count)
    durations *= mean_duration_s / durations.mean()
    out = []
    for i in range(count):
        label = labels[int(rng.integers(0, len(labels)))]
        out.append(
            synthesize_instance(
                label,
                seed=int(rng.integers(0, 2**31)),
                fps=fps,
                duration_s=float(durations[i]),
            )
        )
    return out
