"""Technical-evaluation harness: recognition quality, weight concentration,
diversity of generated text embeddings, and per-frame latency.
"""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .actions import (
    ActionEmbedding,
    ActionInfo,
    ActiveCharacter,
    BaseActionLexicon,
    LEXICON_SIZE,
    rank_actions,
)
from .dataset import MotionInstance
from .models import (
    SequenceModel,
    motion2action_step,
    motion2char_step,
    proactive_motion_step,
    reactive_motion_step,
    recognize_action,
    recognize_active,
)
from .motion import Frame, Pose

# Reference weighting-concentration figures from the full-scale system,
# kept for context in recognition reports; desk-scale runs do not
# reproduce them.
FULL_SCALE_REFERENCE_GINI = {
    "action_weighting": 0.12,
    "hosted_baseline_vision": 0.51,
    "hosted_baseline_coords": 0.60,
}


def gini(weights: Sequence[float]) -> float:
    """Mean-absolute-difference concentration of a non-negative vector.

    Computed through the sorted-rank identity; equals
    sum_ij |w_i - w_j| / (2 n sum(w)).
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a non-empty vector")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    total = w.sum()
    if total == 0.0:
        raise ValueError("weights must not be all zero")
    n = w.size
    sorted_w = np.sort(w)
    ranks = np.arange(1, n + 1)
    return float(((2 * ranks - n - 1) * sorted_w).sum() / (n * total))


def cosine_distance_matrix(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1)
    if np.any(norms == 0):
        raise ValueError("zero vector has no cosine distance")
    unit = vectors / norms[:, None]
    sim = np.clip(unit @ unit.T, -1.0, 1.0)
    return 1.0 - sim


def minimum_spanning_tree(dist: np.ndarray) -> List[Tuple[int, int, float]]:
    """Prim's algorithm over a dense symmetric distance matrix."""
    n = dist.shape[0]
    if n < 2:
        return []
    in_tree = [0]
    best_cost = dist[0].copy()
    best_from = np.zeros(n, dtype=int)
    visited = np.zeros(n, dtype=bool)
    visited[0] = True
    edges = []
    for _ in range(n - 1):
        masked = np.where(visited, np.inf, best_cost)
        j = int(np.argmin(masked))
        edges.append((int(best_from[j]), j, float(best_cost[j])))
        visited[j] = True
        closer = dist[j] < best_cost
        best_cost = np.where(closer, dist[j], best_cost)
        best_from = np.where(closer, j, best_from)
    return edges


@dataclass
class DiversityReport:
    count: int
    dispersion_mean: float
    dispersion_sum: float
    edges: List[Tuple[int, int, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "dispersion_mean": self.dispersion_mean,
            "dispersion_sum": self.dispersion_sum,
            "edges": [[i, j, w] for i, j, w in self.edges],
        }


def mst_dispersion(vectors: Sequence[Sequence[float]]) -> DiversityReport:
    """Spread of a vector set: statistics of its cosine-distance MST.

    A single point has zero dispersion. Both the mean and the sum of edge
    weights are reported; the mean is the headline number.
    """
    mat = np.asarray(vectors, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] < 1:
        raise ValueError("need at least one vector")
    if mat.shape[0] == 1:
        return DiversityReport(count=1, dispersion_mean=0.0, dispersion_sum=0.0)
    edges = minimum_spanning_tree(cosine_distance_matrix(mat))
    weights = [w for _, _, w in edges]
    return DiversityReport(
        count=mat.shape[0],
        dispersion_mean=float(np.mean(weights)),
        dispersion_sum=float(np.sum(weights)),
        edges=edges,
    )


def full_lexicon_weights(query: ActionEmbedding, lexicon: BaseActionLexicon) -> Dict[str, float]:
    """Clamped, L1-normalized similarity weights over all 31 terms."""
    ranked = rank_actions(query, lexicon)
    clamped = {t: max(0.0, s) for t, s in ranked}
    total = sum(clamped.values())
    if total == 0.0:
        return {t: 0.0 for t, _ in ranked}
    return {t: v / total for t, v in clamped.items()}


def _mean_ci(values: Sequence[float]) -> Tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return math.nan, math.nan
    mean = float(arr.mean())
    if arr.size == 1:
        return mean, 0.0
    half = 1.96 * float(arr.std(ddof=1)) / math.sqrt(arr.size)
    return mean, half


@dataclass
class InstanceRecognition:
    label: str
    gold_rank: int
    weight_ratio: float
    gini: float
    char_correct: bool
    action_latency_s: float
    char_latency_s: float


@dataclass
class RecognitionReport:
    instances: List[InstanceRecognition]

    def aggregates(self) -> dict:
        ranks = [i.gold_rank for i in self.instances]
        ratios = [i.weight_ratio for i in self.instances]
        ginis = [i.gini for i in self.instances]
        alat = [i.action_latency_s for i in self.instances]
        clat = [i.char_latency_s for i in self.instances]
        acc = (
            sum(i.char_correct for i in self.instances) / len(self.instances)
            if self.instances
            else math.nan
        )
        out = {}
        for name, vals in (
            ("gold_rank", ranks),
            ("weight_ratio", ratios),
            ("gini", ginis),
            ("action_latency_s", alat),
            ("char_latency_s", clat),
        ):
            mean, ci = _mean_ci(vals)
            out[name] = {"mean": mean, "ci95": ci}
        out["char_accuracy"] = acc
        out["count"] = len(self.instances)
        return out

    def to_dict(self) -> dict:
        return {
            "aggregates": self.aggregates(),
            "full_scale_reference_gini": FULL_SCALE_REFERENCE_GINI,
            "instances": [vars(i) for i in self.instances],
        }

    def write_json(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                [
                    "label",
                    "gold_rank",
                    "weight_ratio",
                    "gini",
                    "char_correct",
                    "action_latency_s",
                    "char_latency_s",
                ]
            )
            for i in self.instances:
                writer.writerow(
                    [
                        i.label,
                        i.gold_rank,
                        f"{i.weight_ratio:.6f}",
                        f"{i.gini:.6f}",
                        int(i.char_correct),
                        f"{i.action_latency_s:.6f}",
                        f"{i.char_latency_s:.6f}",
                    ]
                )


def eval_recognition(
    m2a: SequenceModel,
    m2c: SequenceModel,
    test_set: Sequence[MotionInstance],
    lexicon: BaseActionLexicon,
) -> RecognitionReport:
    """Score the recognizers against gold labels, instance by instance.

    The active-character model is conditioned on the gold action embedding,
    isolating its own accuracy from the action recognizer's.
    """
    m2a.expect_kind("motion2action")
    m2c.expect_kind("motion2char")
    if not test_set:
        raise ValueError("test set is empty")
    rows = []
    for inst in test_set:
        t0 = time.perf_counter()
        emb = recognize_action(m2a, inst.trajectory)
        action_latency = time.perf_counter() - t0
        ranked = rank_actions(emb, lexicon)
        gold_rank = next(i + 1 for i, (t, _) in enumerate(ranked) if t == inst.action_label)
        weights = full_lexicon_weights(emb, lexicon)
        top_term = ranked[0][0]
        if weights[top_term] == 0.0:
            ratio = 1.0 if gold_rank == 1 else 0.0
        else:
            ratio = weights[inst.action_label] / weights[top_term]
        weight_values = list(weights.values())
        concentration = gini(weight_values) if sum(weight_values) > 0 else 0.0

        gold_emb = lexicon.embedding_of(inst.action_label)
        t0 = time.perf_counter()
        who = recognize_active(m2c, inst.trajectory, gold_emb)
        char_latency = time.perf_counter() - t0
        rows.append(
            InstanceRecognition(
                label=inst.action_label,
                gold_rank=gold_rank,
                weight_ratio=ratio,
                gini=concentration,
                char_correct=who.indicator == inst.active_char,
                action_latency_s=action_latency,
                char_latency_s=char_latency,
            )
        )
    return RecognitionReport(rows)


@dataclass
class LatencyReport:
    per_frame_s: List[float]

    def stats(self) -> dict:
        arr = np.asarray(self.per_frame_s)
        return {
            "frames": len(self.per_frame_s),
            "mean_s": float(arr.mean()),
            "p50_s": float(np.percentile(arr, 50)),
            "p95_s": float(np.percentile(arr, 95)),
            "max_s": float(arr.max()),
        }

    def to_dict(self) -> dict:
        return {"stats": self.stats(), "per_frame_s": self.per_frame_s}

    def write_json(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["frame", "seconds"])
            for i, s in enumerate(self.per_frame_s):
                writer.writerow([i, f"{s:.9f}"])


def latency_bench(
    models: Dict[str, SequenceModel],
    lexicon: BaseActionLexicon,
    n_frames: int = 200,
    warmup: int = 20,
    seed: int = 0,
) -> LatencyReport:
    """Wall-clock the full per-tick pipeline over a synthetic live session.

    Each tick runs the proactive and reactive generators, appends the frame,
    and updates both recognizers, exactly like the live loop with the
    machine driving both characters. Hidden states thread without resets so
    late frames exercise the O(1) stepping claim.
    """
    rng = np.random.default_rng(seed)
    info = ActionInfo(
        ActionEmbedding(rng.standard_normal(lexicon.dimension)), ActiveCharacter(0)
    )
    states = {k: m.fresh_state() for k, m in models.items()}
    prev: Optional[Frame] = None
    frame = Frame(poses=(Pose(0.35, 0.5, 0.0), Pose(0.65, 0.5, 0.0)), t=0)
    times = []
    for i in range(warmup + n_frames):
        t0 = time.perf_counter()
        pose0, states["proactive"], raw0 = proactive_motion_step(
            models["proactive"], states["proactive"], info, frame, prev
        )
        sym0_next = (pose0.x - frame.poses[0].x, pose0.y - frame.poses[0].y, pose0.r)
        pose1, states["reactive"], _ = reactive_motion_step(
            models["reactive"], states["reactive"], info, frame, prev, sym0_next
        )
        new_frame = Frame(poses=(pose0, pose1), t=frame.t + 1)
        emb, states["motion2action"] = motion2action_step(
            models["motion2action"], states["motion2action"], new_frame, frame
        )
        _, states["motion2char"] = motion2char_step(
            models["motion2char"], states["motion2char"], new_frame, frame, emb
        )
        elapsed = time.perf_counter() - t0
        if i >= warmup:
            times.append(elapsed)
        prev, frame = frame, new_frame
    return LatencyReport(times)
