"""Trainable sequence-model substrate: LSTM stacks, heads, losses, Adam."""
from .checkpoint import CheckpointData, load_checkpoint, save_checkpoint
from .heads import FeedforwardHead
from .losses import compute_loss, cross_entropy, mae, mse
from .lstm import HiddenState, LstmLayer, RecurrentStack, StackRun, sigmoid
from .optim import Adam, clip_grad_norm, global_grad_norm
from .teacher_forcing import step_features, teacher_forced_distance, teacher_forcing_features

__all__ = [
    "Adam",
    "CheckpointData",
    "FeedforwardHead",
    "HiddenState",
    "LstmLayer",
    "RecurrentStack",
    "StackRun",
    "clip_grad_norm",
    "compute_loss",
    "cross_entropy",
    "global_grad_norm",
    "load_checkpoint",
    "mae",
    "mse",
    "save_checkpoint",
    "sigmoid",
    "step_features",
    "teacher_forced_distance",
    "teacher_forcing_features",
]
