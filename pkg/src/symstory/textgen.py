"""Action-conditioned text generation and text-derived action recognition.

The action slot of a story prompt is a soft block: the top-k base action
terms' padded token-embedding matrices, blended with the same clamped
cosine weights used for ranking. Going the other way, a user sentence is
embedded, snapped onto the lexicon's top-k blend, and the active character
is asked of the generator as a 0/1 question.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .actions import (
    ActionEmbedding,
    ActionInfo,
    ActiveCharacter,
    BaseActionLexicon,
    topk_weights,
)
from .config import (
    TEMPERATURE_CHAR,
    TEMPERATURE_STORY,
    TOPK_MOTION_TO_TEXT,
    TOPK_TEXT_TO_ACTION,
)
from .embeddings import EmbeddingProvider, TextGenerator, TokenEmbeddingProvider
from .prompts import (
    PAD_TOKENS,
    SoftPrompt,
    StorySettings,
    VectorsSegment,
    active_character_prompt,
    parse_character_reply,
    story_sentence_prompt,
)


def build_soft_prompt(
    action: ActionEmbedding,
    lexicon: BaseActionLexicon,
    token_provider: TokenEmbeddingProvider,
    k: int = TOPK_MOTION_TO_TEXT,
) -> Tuple[VectorsSegment, List[Tuple[str, float]]]:
    """Blend the top-k terms' token-embedding blocks into one vectors block.

    Returns the block plus the (term, weight) pairs that produced it; the
    top term doubles as the block's text fallback.
    """
    pairs = topk_weights(action, lexicon, k)
    rows = np.zeros((PAD_TOKENS, token_provider.dimension))
    for term, weight in pairs:
        block = token_provider.token_embeddings(term, pad_to=PAD_TOKENS)
        if block.shape != (PAD_TOKENS, token_provider.dimension):
            raise ValueError(f"token block for {term!r} has shape {block.shape}")
        rows += weight * block
    return VectorsSegment(rows, fallback_text=pairs[0][0]), pairs


def build_story_prompt(
    settings: StorySettings,
    info: ActionInfo,
    lexicon: BaseActionLexicon,
    token_provider: TokenEmbeddingProvider,
    history: Sequence[str] = (),
    following: Sequence[str] = (),
    user_prompt: Optional[str] = None,
    k: int = TOPK_MOTION_TO_TEXT,
) -> SoftPrompt:
    """Full sentence-writing prompt for the current action info."""
    block, pairs = build_soft_prompt(info.embedding, lexicon, token_provider, k)
    return story_sentence_prompt(
        settings,
        active=info.active.indicator,
        action_block=block,
        history=history,
        following=following,
        top_terms=[t for t, _ in pairs],
        user_prompt=user_prompt,
    )


def generate_sentence(
    generator: TextGenerator,
    prompt: SoftPrompt,
    temperature: float = TEMPERATURE_STORY,
) -> str:
    """One story sentence; whitespace-trimmed, guaranteed non-empty."""
    text = generator.generate(prompt, temperature).strip()
    if not text:
        raise ValueError("generator returned an empty sentence")
    return text


def text2action(
    sentence: str,
    provider: EmbeddingProvider,
    lexicon: BaseActionLexicon,
    k: int = TOPK_TEXT_TO_ACTION,
) -> ActionEmbedding:
    """Project a story sentence onto the lexicon's top-k blend."""
    if not sentence.strip():
        raise ValueError("sentence must be non-empty")
    query = provider.embed(sentence)
    pairs = topk_weights(query, lexicon, k)
    out = np.zeros(lexicon.dimension)
    for term, weight in pairs:
        out += weight * lexicon.embedding_of(term).vector
    return ActionEmbedding(out)


def text2char(
    sentence: str,
    action: ActionEmbedding,
    settings: StorySettings,
    generator: TextGenerator,
    lexicon: BaseActionLexicon,
    token_provider: TokenEmbeddingProvider,
    k: int = TOPK_TEXT_TO_ACTION,
) -> ActiveCharacter:
    """Ask the generator which character acts; raises on an unparseable reply."""
    block, _ = build_soft_prompt(action, lexicon, token_provider, k)
    prompt = active_character_prompt(settings, sentence, block)
    reply = generator.generate(prompt, TEMPERATURE_CHAR)
    return ActiveCharacter(parse_character_reply(reply))


def text2action_info(
    sentence: str,
    provider: EmbeddingProvider,
    settings: StorySettings,
    generator: TextGenerator,
    lexicon: BaseActionLexicon,
    token_provider: TokenEmbeddingProvider,
) -> ActionInfo:
    """The full text-first path: sentence -> (action embedding, active character)."""
    emb = text2action(sentence, provider, lexicon)
    who = text2char(sentence, emb, settings, generator, lexicon, token_provider)
    return ActionInfo(emb, who)
