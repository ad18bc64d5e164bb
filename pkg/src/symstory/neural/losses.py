"""Training losses with analytic gradients w.r.t. predictions.

All losses mean-reduce over every element (rows and columns alike), so a
(T, D) prediction block divides by T*D. Cross-entropy expects integer class
targets and mean-reduces over rows.
"""
from __future__ import annotations

from typing import Tuple

import numpy as np

LOSS_KINDS = ("mae", "mse", "cross_entropy")


def mae(pred: np.ndarray, target: np.ndarray) -> Tuple[float, np.ndarray]:
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch {pred.shape} vs {target.shape}")
    diff = pred - target
    n = diff.size
    return float(np.abs(diff).sum() / n), np.sign(diff) / n


def mse(pred: np.ndarray, target: np.ndarray) -> Tuple[float, np.ndarray]:
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch {pred.shape} vs {target.shape}")
    diff = pred - target
    n = diff.size
    return float((diff * diff).sum() / n), 2.0 * diff / n


def log_softmax(logits: np.ndarray) -> np.ndarray:
    m = logits.max(axis=-1, keepdims=True)
    shifted = logits - m
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def cross_entropy(logits: np.ndarray, targets) -> Tuple[float, np.ndarray]:
    """Mean negative log-likelihood of integer targets under softmax logits."""
    logits = np.asarray(logits, dtype=np.float64)
    squeeze = logits.ndim == 1
    if squeeze:
        logits = logits[None, :]
        targets = np.asarray([targets])
    else:
        targets = np.asarray(targets)
    if targets.shape != (logits.shape[0],):
        raise ValueError(f"need one class index per row, got {targets.shape} for {logits.shape}")
    if np.any(targets < 0) or np.any(targets >= logits.shape[1]):
        raise ValueError("class index out of range")
    rows = logits.shape[0]
    lsm = log_softmax(logits)
    loss = float(-lsm[np.arange(rows), targets].sum() / rows)
    dlogits = np.exp(lsm)
    dlogits[np.arange(rows), targets] -= 1.0
    dlogits /= rows
    return loss, (dlogits[0] if squeeze else dlogits)


def compute_loss(kind: str, pred: np.ndarray, target) -> Tuple[float, np.ndarray]:
    if kind == "mae":
        return mae(pred, target)
    if kind == "mse":
        return mse(pred, target)
    if kind == "cross_entropy":
        return cross_entropy(pred, target)
    raise ValueError(f"unknown loss kind {kind!r}; expected one of {LOSS_KINDS}")
