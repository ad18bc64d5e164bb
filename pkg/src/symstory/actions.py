"""The translational action layer.

Character actions are represented as vectors in a sentence-embedding space.
A fixed lexicon of 31 two-character action terms anchors that space: queries
are ranked against the lexicon by cosine similarity, and the top-k terms are
blended into a single action vector by clamped, L1-normalized weights.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

# The 31 base two-character action terms, in canonical order. Ties in
# similarity are broken by this order.
BASE_ACTION_TERMS: Tuple[str, ...] = (
    "accompany",
    "approach",
    "argue with",
    "avoid",
    "bother",
    "capture",
    "chase",
    "creep up on",
    "encircle",
    "escape",
    "examine",
    "fight",
    "flirt with",
    "follow",
    "herd",
    "hit",
    "huddle with",
    "hug",
    "ignore",
    "kiss",
    "lead",
    "leave",
    "mimic",
    "play with",
    "poke",
    "pull",
    "push",
    "scratch",
    "talk to",
    "throw",
    "tickle",
)

LEXICON_SIZE = len(BASE_ACTION_TERMS)
assert LEXICON_SIZE == 31

# Terms whose agent is driven to act by the other character; story prompts
# add an extra clause when any of these reach the top-k.
EVASIVE_ACTION_TERMS = frozenset({"avoid", "escape", "ignore", "leave"})


@dataclass(frozen=True)
class ActionEmbedding:
    """A point in the action-embedding space."""

    vector: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError(f"embedding must be 1-D, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("embedding has non-finite entries")
        object.__setattr__(self, "vector", v)

    @property
    def dimension(self) -> int:
        return self.vector.shape[0]


@dataclass(frozen=True)
class ActiveCharacter:
    """Which character (0 or 1) is the agent of the current action."""

    indicator: int

    def __post_init__(self):
        if self.indicator not in (0, 1):
            raise ValueError(f"active character must be 0 or 1, got {self.indicator}")

    def swapped(self) -> "ActiveCharacter":
        return ActiveCharacter(1 - self.indicator)


@dataclass(frozen=True)
class ActionInfo:
    """The full translational-layer value: what is happening and who leads."""

    embedding: ActionEmbedding
    active: ActiveCharacter


class BaseActionLexicon:
    """The 31 ordered (term, embedding) pairs anchoring the action space."""

    def __init__(self, terms: Sequence[str], embeddings: Sequence[ActionEmbedding]):
        if len(terms) != LEXICON_SIZE:
            raise ValueError(f"lexicon must have exactly {LEXICON_SIZE} terms, got {len(terms)}")
        if tuple(terms) != BASE_ACTION_TERMS:
            raise ValueError("lexicon terms must match the canonical base action terms")
        if len(embeddings) != len(terms):
            raise ValueError("one embedding per term required")
        dims = {e.dimension for e in embeddings}
        if len(dims) != 1:
            raise ValueError(f"inconsistent embedding dimensions {dims}")
        self.terms: Tuple[str, ...] = tuple(terms)
        self.embeddings: Tuple[ActionEmbedding, ...] = tuple(embeddings)
        self.dimension: int = dims.pop()
        self._index = {t: i for i, t in enumerate(self.terms)}
        self._matrix = np.stack([e.vector for e in self.embeddings])

    @classmethod
    def from_provider(cls, provider) -> "BaseActionLexicon":
        return cls(BASE_ACTION_TERMS, [provider.embed(t) for t in BASE_ACTION_TERMS])

    def index_of(self, term: str) -> int:
        try:
            return self._index[term]
        except KeyError:
            raise KeyError(f"unknown action term {term!r}") from None

    def embedding_of(self, term: str) -> ActionEmbedding:
        return self.embeddings[self.index_of(term)]

    def matrix(self) -> np.ndarray:
        """(31, dim) matrix of base embeddings, row order = term order."""
        return self._matrix


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Standard cosine similarity; raises on zero vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity undefined for zero vectors")
    return float(np.dot(a, b) / (na * nb))


def rank_actions(query: ActionEmbedding, lexicon: BaseActionLexicon) -> List[Tuple[str, float]]:
    """All 31 terms sorted by descending cosine similarity to the query.

    Ties keep lexicon order (the sort is stable over the canonical order).
    """
    if query.dimension != lexicon.dimension:
        raise ValueError(f"dimension mismatch: query {query.dimension}, lexicon {lexicon.dimension}")
    sims = [cosine_similarity(query.vector, e.vector) for e in lexicon.embeddings]
    order = sorted(range(LEXICON_SIZE), key=lambda i: -sims[i])
    return [(lexicon.terms[i], sims[i]) for i in order]


def topk_weights(
    query: ActionEmbedding, lexicon: BaseActionLexicon, k: int
) -> List[Tuple[str, float]]:
    """Blend weights over the k most similar base actions.

    Raw cosine similarities are clamped at zero and L1-normalized over the
    top-k. If every clamped similarity is zero the weights fall back to
    uniform 1/k.
    """
    if not (1 <= k <= LEXICON_SIZE):
        raise ValueError(f"k must be in [1, {LEXICON_SIZE}], got {k}")
    ranked = rank_actions(query, lexicon)[:k]
    clamped = [max(0.0, s) for _, s in ranked]
    total = sum(clamped)
    if total == 0.0:
        return [(term, 1.0 / k) for term, _ in ranked]
    return [(term, c / total) for (term, _), c in zip(ranked, clamped)]


def interpolate(weights: Sequence[float], vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Convex combination of vectors; weights must sum to 1."""
    if len(weights) != len(vectors):
        raise ValueError("one weight per vector required")
    if len(weights) == 0:
        raise ValueError("nothing to interpolate")
    if abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError(f"weights must sum to 1, got {sum(weights)}")
    mats = [np.asarray(v, dtype=np.float64) for v in vectors]
    shape = mats[0].shape
    for m in mats[1:]:
        if m.shape != shape:
            raise ValueError(f"shape mismatch {m.shape} vs {shape}")
    out = np.zeros(shape, dtype=np.float64)
    for w, m in zip(weights, mats):
        out += w * m
    return out


def blend_topk(query: ActionEmbedding, lexicon: BaseActionLexicon, k: int) -> ActionEmbedding:
    """topk_weights followed by interpolation over the base embeddings."""
    pairs = topk_weights(query, lexicon, k)
    weights = [w for _, w in pairs]
    vectors = [lexicon.embedding_of(t).vector for t, _ in pairs]
    return ActionEmbedding(interpolate(weights, vectors))
