"""Story prompt assembly.

Prompts sent to the text generator are sequences of segments: literal text,
or blocks of raw input-embedding vectors (the "soft" action slot). Every
vectors block is exactly PAD_TOKENS rows so differently-tokenized action
terms stay interchangeable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np

from .actions import EVASIVE_ACTION_TERMS

# All action terms are padded to this many tokens before blending.
PAD_TOKENS = 5


@dataclass(frozen=True)
class TextSegment:
    value: str


@dataclass(frozen=True)
class VectorsSegment:
    """A PAD_TOKENS x dim block of raw token-embedding vectors.

    fallback_text carries the top-ranked action term so text-only generator
    backends can degrade gracefully.
    """

    rows: np.ndarray
    fallback_text: str = ""

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[0] != PAD_TOKENS:
            raise ValueError(f"vectors block must be {PAD_TOKENS} x dim, got shape {rows.shape}")
        object.__setattr__(self, "rows", rows)


Segment = Union[TextSegment, VectorsSegment]


@dataclass
class SoftPrompt:
    segments: List[Segment] = field(default_factory=list)

    def text(self, s: str) -> "SoftPrompt":
        self.segments.append(TextSegment(s))
        return self

    def vectors(self, rows: np.ndarray, fallback_text: str = "") -> "SoftPrompt":
        self.segments.append(VectorsSegment(rows, fallback_text))
        return self

    def render_text(self, vectors_as: Optional[str] = None) -> str:
        """Flatten to plain text.

        Vectors blocks render as their fallback term, or as `vectors_as`
        when given (used for template golden-file comparison).
        """
        parts = []
        for seg in self.segments:
            if isinstance(seg, TextSegment):
                parts.append(seg.value)
            else:
                parts.append(vectors_as if vectors_as is not None else seg.fallback_text)
        return "".join(parts)

    def to_wire(self) -> list:
        """JSON-serializable segment list for the generator protocol."""
        out = []
        for seg in self.segments:
            if isinstance(seg, TextSegment):
                out.append({"type": "text", "value": seg.value})
            else:
                out.append({"type": "vectors", "rows": seg.rows.tolist()})
        return out


@dataclass(frozen=True)
class StorySettings:
    """Names, descriptions, and scene set up before play begins."""

    name0: str
    name1: str
    description0: str = ""
    description1: str = ""
    scene: str = ""
    portrait0: Optional[str] = None
    portrait1: Optional[str] = None

    def __post_init__(self):
        if not self.name0 or not self.name1:
            raise ValueError("character names must be non-empty")
        if self.name0 == self.name1:
            raise ValueError("character names must be distinct")

    def name(self, char: int) -> str:
        return self.name0 if char == 0 else self.name1

    def to_dict(self) -> dict:
        return {
            "name0": self.name0,
            "name1": self.name1,
            "description0": self.description0,
            "description1": self.description1,
            "scene": self.scene,
            "portrait0": self.portrait0,
            "portrait1": self.portrait1,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StorySettings":
        return cls(
            name0=d["name0"],
            name1=d["name1"],
            description0=d.get("description0", ""),
            description1=d.get("description1", ""),
            scene=d.get("scene", ""),
            portrait0=d.get("portrait0"),
            portrait1=d.get("portrait1"),
        )


def story_sentence_prompt(
    settings: StorySettings,
    active: int,
    action_block: VectorsSegment,
    history: Sequence[str] = (),
    following: Sequence[str] = (),
    top_terms: Sequence[str] = (),
    user_prompt: Optional[str] = None,
) -> SoftPrompt:
    """Assemble the sentence-writing prompt.

    The active character's name fills the agent slot. The evasive-action
    clause appears only when one of the top-k terms is in
    EVASIVE_ACTION_TERMS; the history, following, and instruction blocks
    appear only when their content exists.
    """
    agent = settings.name(active)
    other = settings.name(1 - active)
    p = SoftPrompt()
    p.text(
        "My story has the following characters:\n"
        f"- {settings.name0}: {settings.description0}\n"
        f"- {settings.name1}: {settings.description1}\n"
        "\n"
        "The overall description of the scene is given below:\n"
        f"{settings.scene}\n"
    )
    if history:
        p.text("\nThe previous story look like below: " + " ".join(history) + "\n")
    if following:
        p.text(
            "\nNote that after the sentence you are going to write, below sentences "
            "will follow. That is, your sentence will come before the following "
            "sentences: " + " ".join(following) + "\n"
        )
    p.text(
        "\n-----\n"
        "Task:\n"
        "Without preamble, write a story sentence that continues the previous "
        "story into an interesting way. The sentence should be fewer than 30 "
        f"words. In the story sentence to write, {agent} should actively do the "
        f"below action, while {other} usually being the subject of {agent}'s "
        f"action (e.g., for 'throw', {agent} throws {other}, for 'approach', "
        f"{agent} approaches {other}).\n"
    )
    if any(t in EVASIVE_ACTION_TERMS for t in top_terms):
        p.text(
            "Only if the action is close to [escape, leave, avoid, ignore], "
            f"{other} should cause {agent} to take the action, like chasing or "
            f"bothering {agent}.\n"
        )
    p.text("Action: ")
    p.segments.append(action_block)
    if user_prompt:
        p.text(
            "\n\nTry to consider following instruction also when writing the "
            "sentence (but prioritize the action that characters should take): "
            + user_prompt
        )
    return p


def active_character_prompt(
    settings: StorySettings,
    sentence: str,
    action_block: VectorsSegment,
) -> SoftPrompt:
    """Assemble the which-character-is-active question for a story sentence."""
    p = SoftPrompt()
    p.text(
        "My story has the following characters:\n"
        f"- character_0: {settings.name0}\n"
        f"- character_1: {settings.name1}\n"
        f"Consider this sentence: {sentence}\n"
        "\n"
        "Regarding this sentence, which character is taking the following action?\n"
        "Action: "
    )
    p.segments.append(action_block)
    p.text("\n\nAnswer with a number 0 or 1, without any preamble.")
    return p


def parse_character_reply(reply: str) -> int:
    """Strict parse of the generator's 0-or-1 answer."""
    stripped = reply.strip()
    if stripped == "0":
        return 0
    if stripped == "1":
        return 1
    raise ValueError(f"unparseable active-character reply: {reply!r}")
