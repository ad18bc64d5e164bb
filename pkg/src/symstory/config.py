"""Presets and runtime configuration.

Two architecture presets ship: ``paper`` mirrors the full-scale system
(4096-wide stacks, 384-dim sentence embeddings) and ``desk`` is a
64-wide/2-layer variant sized so training and the acceptance suite run in
minutes on a laptop CPU. Runtime settings load from a TOML or JSON file.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Optional

from .models import ModelHyper, TrainConfig

PRESETS = ("desk", "paper")

RUNTIME_FPS = 10
STOP_WINDOW_MS_DEFAULT = 500
DEFAULT_SEGMENT_FRAMES = 20
TOPK_MOTION_TO_TEXT = 4   # blending width when text follows motion
TOPK_TEXT_TO_ACTION = 2   # blending width when motion follows text
TEMPERATURE_STORY = 0.7
TEMPERATURE_CHAR = 0.0


def model_hyper(kind: str, preset: str = "desk") -> ModelHyper:
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}")
    if preset == "paper":
        dims = {
            "motion2action": dict(hidden=4096, layers=8, ff_hidden=4096),
            "motion2char": dict(hidden=512, layers=4, ff_hidden=512),
            "proactive": dict(hidden=4096, layers=6, ff_hidden=4096),
            "reactive": dict(hidden=4096, layers=6, ff_hidden=4096),
        }[kind]
        return ModelHyper(kind=kind, embed_dim=384, **dims)
    return ModelHyper(kind=kind, hidden=64, layers=2, ff_hidden=64, embed_dim=32)


def train_config(kind: str, preset: str = "desk", seed: int = 0) -> TrainConfig:
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}")
    if preset == "paper":
        recipe = {
            "motion2action": dict(learning_rate=1e-5, batch_size=8, epochs=50),
            "motion2char": dict(learning_rate=3e-5, batch_size=8, epochs=200),
            "proactive": dict(learning_rate=1e-5, batch_size=32, epochs=200),
            "reactive": dict(learning_rate=1e-4, batch_size=32, epochs=200),
        }[kind]
    else:
        # tuned for fast memorization of small synthetic sets
        recipe = {
            "motion2action": dict(learning_rate=3e-3, batch_size=8, epochs=150),
            "motion2char": dict(learning_rate=3e-3, batch_size=8, epochs=60),
            "proactive": dict(learning_rate=3e-3, batch_size=8, epochs=200),
            "reactive": dict(learning_rate=3e-3, batch_size=8, epochs=200),
        }[kind]
    return TrainConfig(grad_clip_norm=5.0, seed=seed, **recipe)


def embedding_dimension(preset: str) -> int:
    return 384 if preset == "paper" else 32


@dataclass
class ServiceConfig:
    """Everything the session service needs to come up."""

    preset: str = "desk"
    fps: int = RUNTIME_FPS
    stop_window_ms: int = STOP_WINDOW_MS_DEFAULT
    default_segment_frames: int = DEFAULT_SEGMENT_FRAMES
    seed: int = 0
    # provider endpoints; pseudo/stub providers are used when unset
    embed_url: Optional[str] = None
    token_url: Optional[str] = None
    generate_url: Optional[str] = None
    # checkpoint paths per model kind; seeded-untrained models when unset
    checkpoints: Dict[str, str] = field(default_factory=dict)

    @property
    def stop_window_ticks(self) -> int:
        return max(1, round(self.stop_window_ms * self.fps / 1000))

    @classmethod
    def from_dict(cls, raw: dict) -> "ServiceConfig":
        providers = raw.get("providers", {})
        cfg = cls(
            preset=raw.get("preset", "desk"),
            fps=int(raw.get("fps", RUNTIME_FPS)),
            stop_window_ms=int(raw.get("stop_window_ms", STOP_WINDOW_MS_DEFAULT)),
            default_segment_frames=int(
                raw.get("default_segment_frames", DEFAULT_SEGMENT_FRAMES)
            ),
            seed=int(raw.get("seed", 0)),
            embed_url=providers.get("embed_url"),
            token_url=providers.get("token_url"),
            generate_url=providers.get("generate_url"),
            checkpoints=dict(raw.get("checkpoints", {})),
        )
        if cfg.preset not in PRESETS:
            raise ValueError(f"unknown preset {cfg.preset!r}")
        if cfg.fps <= 0:
            raise ValueError("fps must be positive")
        return cfg

    @classmethod
    def load(cls, path) -> "ServiceConfig":
        path = Path(path)
        text = path.read_text()
        if path.suffix == ".toml":
            import tomli

            raw = tomli.loads(text)
        else:
            raw = json.loads(text)
        return cls.from_dict(raw)
