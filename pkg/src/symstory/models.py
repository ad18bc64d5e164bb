"""The four trainable sequence models and their training recipes.

Every model is a recurrent stack feeding a feedforward head:

* ``motion2action``  — raw coordinates -> action embedding, per frame;
* ``motion2char``    — raw coordinates + action embedding -> active character;
* ``proactive``      — kinematic features + action info -> sym0's next motion;
* ``reactive``       — kinematic features + action info + sym0's next motion
  -> sym1's next motion.

Recognizer inputs are the raw per-frame coordinates (x0, y0, r0, x1, y1, r1);
generator inputs are the six kinematic features. Generator outputs are
(dx, dy, r_next) with the rotation absolute, integrated by
``apply_motion_delta`` and clamped to the scene.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .actions import ActionEmbedding, ActionInfo, ActiveCharacter
from .motion import (
    Frame,
    Pose,
    SceneBounds,
    Trajectory,
    UNIT_BOUNDS,
    apply_motion_delta,
    clamp_to_scene,
    frame_coordinates,
    proactive_features,
    reactive_features,
)
from .neural.checkpoint import CheckpointData
from .neural.heads import FeedforwardHead
from .neural.losses import compute_loss
from .neural.lstm import HiddenState, RecurrentStack
from .neural.optim import Adam, clip_grad_norm
from .neural.teacher_forcing import step_features

log = logging.getLogger(__name__)

MODEL_KINDS = ("motion2action", "motion2char", "proactive", "reactive")

COORD_DIM = 6  # (x0, y0, r0, x1, y1, r1), also the kinematic feature width


class KindMismatch(ValueError):
    pass


class TrainingDiverged(RuntimeError):
    pass


@dataclass(frozen=True)
class ModelHyper:
    """Architecture knobs for one model kind."""

    kind: str
    hidden: int
    layers: int
    ff_hidden: int
    embed_dim: int

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if min(self.hidden, self.layers, self.ff_hidden, self.embed_dim) < 1:
            raise ValueError("all dimensions must be positive")

    @property
    def input_dim(self) -> int:
        return COORD_DIM

    @property
    def head_input_dim(self) -> int:
        if self.kind == "motion2action":
            return self.hidden
        if self.kind == "motion2char":
            return self.hidden + self.embed_dim
        if self.kind == "proactive":
            return self.hidden + self.embed_dim + 1
        return self.hidden + self.embed_dim + 1 + 3  # reactive: + sym0 next motion

    @property
    def output_dim(self) -> int:
        if self.kind == "motion2action":
            return self.embed_dim
        if self.kind == "motion2char":
            return 2
        return 3

    @property
    def loss_kind(self) -> str:
        if self.kind == "motion2action":
            return "mae"
        if self.kind == "motion2char":
            return "cross_entropy"
        return "mse"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "hidden": self.hidden,
            "layers": self.layers,
            "ff_hidden": self.ff_hidden,
            "embed_dim": self.embed_dim,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelHyper":
        return cls(
            kind=d["kind"],
            hidden=int(d["hidden"]),
            layers=int(d["layers"]),
            ff_hidden=int(d["ff_hidden"]),
            embed_dim=int(d["embed_dim"]),
        )


class SequenceModel:
    """A recurrent stack plus head, owning its parameters and gradients."""

    def __init__(self, hyper: ModelHyper, seed: int = 0):
        self.hyper = hyper
        rng = np.random.default_rng(seed)
        self.stack = RecurrentStack(hyper.input_dim, hyper.hidden, hyper.layers, rng)
        self.head = FeedforwardHead(hyper.head_input_dim, hyper.ff_hidden, hyper.output_dim, rng)

    @property
    def kind(self) -> str:
        return self.hyper.kind

    def expect_kind(self, kind: str):
        if self.kind != kind:
            raise KindMismatch(f"model kind is {self.kind!r}, expected {kind!r}")

    def fresh_state(self) -> HiddenState:
        return self.stack.fresh_state()

    def parameters(self) -> Dict[str, np.ndarray]:
        out = {f"stack.{k}": v for k, v in self.stack.parameters().items()}
        out.update({f"head.{k}": v for k, v in self.head.parameters().items()})
        return out

    def grads(self) -> Dict[str, np.ndarray]:
        out = {f"stack.{k}": v for k, v in self.stack.grads_by_param().items()}
        out.update({f"head.{k}": v for k, v in self.head.grads_by_param().items()})
        return out

    def zero_grad(self):
        self.stack.zero_grad()
        self.head.zero_grad()

    def snapshot(self) -> Dict[str, np.ndarray]:
        return {k: v.copy() for k, v in self.parameters().items()}

    def load_parameters(self, params: Dict[str, np.ndarray]):
        self.stack.set_parameters(
            {k[len("stack."):]: v for k, v in params.items() if k.startswith("stack.")}
        )
        self.head.set_parameters(
            {k[len("head."):]: v for k, v in params.items() if k.startswith("head.")}
        )

    def to_checkpoint(self, meta: Optional[dict] = None) -> CheckpointData:
        return CheckpointData(
            kind=self.kind,
            hyper=self.hyper.to_dict(),
            params=self.snapshot(),
            meta=meta or {},
        )

    @classmethod
    def from_checkpoint(cls, ckpt: CheckpointData) -> "SequenceModel":
        model = cls(ModelHyper.from_dict(ckpt.hyper), seed=0)
        model.load_parameters(ckpt.params)
        return model


def _check_consecutive(frame_t: Frame, frame_prev: Optional[Frame]):
    if frame_prev is not None and frame_t.t != frame_prev.t + 1:
        raise ValueError(f"frames not consecutive: t={frame_t.t} after t={frame_prev.t}")


def _char_indicator(active: ActiveCharacter) -> float:
    return float(active.indicator)


def proactive_ff_input(h: np.ndarray, info: ActionInfo) -> np.ndarray:
    return np.concatenate([h, info.embedding.vector, [_char_indicator(info.active)]])


def reactive_ff_input(
    h: np.ndarray, info: ActionInfo, sym0_next: Tuple[float, float, float]
) -> np.ndarray:
    # indicator swapped relative to the proactive model: this head reasons
    # about the other character
    swapped = 1.0 - _char_indicator(info.active)
    return np.concatenate([h, info.embedding.vector, [swapped], list(sym0_next)])


def motion2action_step(
    model: SequenceModel, state: HiddenState, frame: Frame, frame_prev: Optional[Frame]
) -> Tuple[ActionEmbedding, HiddenState]:
    """Advance the action recognizer by one frame."""
    model.expect_kind("motion2action")
    _check_consecutive(frame, frame_prev)
    h, state2 = model.stack.step(frame_coordinates(frame), state)
    return ActionEmbedding(model.head.forward(h)), state2


def motion2char_step(
    model: SequenceModel,
    state: HiddenState,
    frame: Frame,
    frame_prev: Optional[Frame],
    action: ActionEmbedding,
) -> Tuple[ActiveCharacter, HiddenState]:
    """Advance the active-character recognizer by one frame."""
    model.expect_kind("motion2char")
    _check_consecutive(frame, frame_prev)
    h, state2 = model.stack.step(frame_coordinates(frame), state)
    logits = model.head.forward(np.concatenate([h, action.vector]))
    # tie breaks toward character 0
    return ActiveCharacter(1 if logits[1] > logits[0] else 0), state2


def proactive_motion_step(
    model: SequenceModel,
    state: HiddenState,
    info: ActionInfo,
    frame: Frame,
    frame_prev: Optional[Frame],
    bounds: SceneBounds = UNIT_BOUNDS,
) -> Tuple[Pose, HiddenState, np.ndarray]:
    """Generate sym0's next pose. Returns (pose, state, raw (dx, dy, r))."""
    model.expect_kind("proactive")
    _check_consecutive(frame, frame_prev)
    feats = proactive_features(frame, frame_prev)
    h, state2 = model.stack.step(feats.as_vector(), state)
    out = model.head.forward(proactive_ff_input(h, info))
    pose = clamp_to_scene(apply_motion_delta(frame.poses[0], (out[0], out[1], out[2])), bounds)
    return pose, state2, out


def reactive_motion_step(
    model: SequenceModel,
    state: HiddenState,
    info: ActionInfo,
    frame: Frame,
    frame_prev: Optional[Frame],
    sym0_next: Tuple[float, float, float],
    bounds: SceneBounds = UNIT_BOUNDS,
) -> Tuple[Pose, HiddenState, np.ndarray]:
    """Generate sym1's next pose given sym0's next-frame motion (dx, dy, r)."""
    model.expect_kind("reactive")
    _check_consecutive(frame, frame_prev)
    if sym0_next is None:
        raise ValueError("reactive step requires sym0's next-frame motion")
    feats = reactive_features(frame, frame_prev)
    h, state2 = model.stack.step(feats.as_vector(), state)
    out = model.head.forward(reactive_ff_input(h, info, sym0_next))
    pose = clamp_to_scene(apply_motion_delta(frame.poses[1], (out[0], out[1], out[2])), bounds)
    return pose, state2, out


@dataclass
class TrainConfig:
    learning_rate: float
    batch_size: int
    epochs: int
    grad_clip_norm: float = 5.0
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size < 1 or self.epochs < 1:
            raise ValueError("learning_rate, batch_size, and epochs must be positive")
        if self.grad_clip_norm <= 0:
            raise ValueError("grad_clip_norm must be positive")


def _instance_pass(model: SequenceModel, instance, gold_emb: np.ndarray, with_grads: bool):
    """Forward (and optionally backward) over one motion instance.

    Returns the instance loss. Gradients accumulate into the model when
    with_grads is set.
    """
    kind = model.kind
    frames = instance.trajectory.frames
    info = ActionInfo(ActionEmbedding(gold_emb), ActiveCharacter(instance.active_char))

    if kind in ("motion2action", "motion2char"):
        xs = [frame_coordinates(f) for f in frames]
        run = model.stack.begin_run()
        hs = [run.step(x) for x in xs]
        ff_caches = []
        preds = []
        for h in hs:
            ff_in = h if kind == "motion2action" else np.concatenate([h, gold_emb])
            out, cache = model.head.forward_cached(ff_in)
            preds.append(out)
            ff_caches.append(cache)
        preds = np.stack(preds)
        if kind == "motion2action":
            target = np.tile(gold_emb, (len(frames), 1))
            loss, dpreds = compute_loss("mae", preds, target)
        else:
            target = np.full(len(frames), instance.active_char, dtype=np.int64)
            loss, dpreds = compute_loss("cross_entropy", preds, target)
        if with_grads:
            dhs = []
            for t in range(len(frames)):
                dff = model.head.backward(dpreds[t], ff_caches[t])
                dhs.append(dff[: model.hyper.hidden])
            model.stack.backward_sequence(run.caches, np.stack(dhs))
        return loss

    # motion generators: sequential pass with teacher-forced features
    observed = 1 if kind == "proactive" else 0
    generated = 1 - observed
    if len(frames) < 2:
        return 0.0
    run = model.stack.begin_run()
    ff_caches = []
    preds = []
    targets = []
    prev = None
    gen_delta: Optional[Tuple[float, float]] = None
    for t in range(len(frames) - 1):
        feats = step_features(frames[t], prev, observed, gen_delta)
        h = run.step(feats.as_vector())
        nxt = frames[t + 1].poses
        cur = frames[t].poses
        if kind == "proactive":
            ff_in = proactive_ff_input(h, info)
        else:
            sym0_next = (
                nxt[0].x - cur[0].x,
                nxt[0].y - cur[0].y,
                nxt[0].r,
            )
            ff_in = reactive_ff_input(h, info, sym0_next)
        out, cache = model.head.forward_cached(ff_in)
        preds.append(out)
        ff_caches.append(cache)
        targets.append(
            [
                nxt[generated].x - cur[generated].x,
                nxt[generated].y - cur[generated].y,
                nxt[generated].r,
            ]
        )
        gen_delta = (float(out[0]), float(out[1]))
        prev = frames[t]
    loss, dpreds = compute_loss("mse", np.stack(preds), np.asarray(targets))
    if with_grads:
        dhs = []
        for t in range(len(preds)):
            dff = model.head.backward(dpreds[t], ff_caches[t])
            dhs.append(dff[: model.hyper.hidden])
        model.stack.backward_sequence(run.caches, np.stack(dhs))
    return loss


def dataset_loss(model: SequenceModel, instances, gold_embeddings: Dict[str, np.ndarray]) -> float:
    if not instances:
        return math.nan
    total = 0.0
    for inst in instances:
        total += _instance_pass(model, inst, gold_embeddings[inst.action_label], with_grads=False)
    return total / len(instances)


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    test_loss: float


@dataclass
class TrainResult:
    checkpoint: CheckpointData
    model: SequenceModel
    curve: List[EpochStats] = field(default_factory=list)


def train(
    hyper: ModelHyper,
    train_set,
    test_set,
    config: TrainConfig,
    gold_embeddings: Dict[str, np.ndarray],
) -> TrainResult:
    """Train one model, returning the checkpoint with the lowest test loss.

    Batching is gradient accumulation over whole sequences (no padding).
    When the test set is empty the train loss selects the checkpoint.
    """
    if not train_set:
        raise ValueError("training set is empty")
    for inst in train_set:
        if inst.action_label not in gold_embeddings:
            raise ValueError(f"no gold embedding for label {inst.action_label!r}")
    model = SequenceModel(hyper, seed=config.seed)
    opt = Adam(lr=config.learning_rate)
    rng = np.random.default_rng(config.seed)
    best_loss = math.inf
    best_params = model.snapshot()
    best_epoch = -1
    curve: List[EpochStats] = []
    for epoch in range(config.epochs):
        order = rng.permutation(len(train_set))
        epoch_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = [train_set[i] for i in order[start : start + config.batch_size]]
            model.zero_grad()
            for inst in batch:
                loss = _instance_pass(
                    model, inst, gold_embeddings[inst.action_label], with_grads=True
                )
                if not math.isfinite(loss):
                    raise TrainingDiverged(
                        f"{hyper.kind}: non-finite loss at epoch {epoch}"
                    )
                epoch_loss += loss
            grads = model.grads()
            for g in grads.values():
                g /= len(batch)
            clip_grad_norm(grads, config.grad_clip_norm)
            opt.step(model.parameters(), grads)
        train_loss = epoch_loss / len(train_set)
        test_loss = dataset_loss(model, test_set, gold_embeddings) if test_set else train_loss
        if not math.isfinite(test_loss):
            raise TrainingDiverged(f"{hyper.kind}: non-finite test loss at epoch {epoch}")
        curve.append(EpochStats(epoch, train_loss, test_loss))
        if test_loss < best_loss:
            best_loss = test_loss
            best_params = model.snapshot()
            best_epoch = epoch
        log.debug("%s epoch %d train %.6f test %.6f", hyper.kind, epoch, train_loss, test_loss)
    model.load_parameters(best_params)
    meta = {
        "epoch": best_epoch,
        "test_loss": best_loss,
        "seed": config.seed,
        "curve": [[s.epoch, s.train_loss, s.test_loss] for s in curve],
    }
    return TrainResult(checkpoint=model.to_checkpoint(meta), model=model, curve=curve)


def recognize_action(model: SequenceModel, trajectory: Trajectory) -> ActionEmbedding:
    """Run motion2action over a whole trajectory; return the final embedding."""
    state = model.fresh_state()
    prev = None
    emb = None
    for frame in trajectory.frames:
        emb, state = motion2action_step(model, state, frame, prev)
        prev = frame
    if emb is None:
        raise ValueError("empty trajectory")
    return emb


def recognize_active(
    model: SequenceModel, trajectory: Trajectory, action: ActionEmbedding
) -> ActiveCharacter:
    """Run motion2char over a whole trajectory; return the final decision."""
    state = model.fresh_state()
    prev = None
    who = None
    for frame in trajectory.frames:
        who, state = motion2char_step(model, state, frame, prev, action)
        prev = frame
    if who is None:
        raise ValueError("empty trajectory")
    return who


def replay_proactive(
    model: SequenceModel,
    trajectory: Trajectory,
    info: ActionInfo,
    bounds: SceneBounds = UNIT_BOUNDS,
) -> List[Pose]:
    """Regenerate sym0's motion against ground-truth sym1 motion.

    sym0 starts from its ground-truth first pose and then follows the model;
    the features at each step measure against the *generated* sym0 position,
    mirroring how the model was trained.
    """
    frames = trajectory.frames
    if not frames:
        raise ValueError("empty trajectory")
    state = model.fresh_state()
    gen = [frames[0].poses[0]]
    prev_mixed: Optional[Frame] = None
    for t in range(len(frames) - 1):
        mixed = Frame(poses=(gen[t], frames[t].poses[1]), t=t)
        pose, state, _ = proactive_motion_step(model, state, info, mixed, prev_mixed, bounds)
        gen.append(pose)
        prev_mixed = mixed
    return gen
