"""Embedding and text-generation providers.

The engine never hosts a language or sentence-embedding model itself; it
talks to providers behind small interfaces. Three families ship:

* pseudo providers — seeded hash-to-vector stand-ins, fully deterministic,
  used by tests and the desk preset;
* table providers — precomputed vectors loaded from a JSON file;
* remote providers — thin HTTP clients for external embedding/generation
  services.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Dict, List, Optional, Protocol, Sequence

import httpx
import numpy as np

from .actions import ActionEmbedding
from .prompts import PAD_TOKENS, SoftPrompt


class ProviderError(RuntimeError):
    """A provider failed to produce a result."""


class GeneratorUnavailable(ProviderError):
    """The text generator could not be reached; the call may be retried."""


def _stable_seed(*parts: str) -> int:
    h = hashlib.sha256("\x1f".join(parts).encode("utf-8")).digest()
    return int.from_bytes(h[:8], "big")


class EmbeddingProvider(Protocol):
    dimension: int

    def embed(self, text: str) -> ActionEmbedding: ...


class PseudoEmbeddingProvider:
    """Deterministic hash-seeded unit vectors; no model behind it.

    Distinct texts map to near-orthogonal directions in high dimensions,
    which is all the ranking/blending machinery needs for tests.
    """

    def __init__(self, dimension: int = 384, seed: int = 0):
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self.seed = seed

    def embed(self, text: str) -> ActionEmbedding:
        rng = np.random.default_rng(_stable_seed("embed", str(self.seed), text))
        v = rng.standard_normal(self.dimension)
        return ActionEmbedding(v / np.linalg.norm(v))


class TableEmbeddingProvider:
    """Reads {"dimension": D, "entries": {text: [floats]}} from a JSON file."""

    def __init__(self, path):
        raw = json.loads(Path(path).read_text())
        self.dimension = int(raw["dimension"])
        self._entries: Dict[str, np.ndarray] = {}
        for term, vec in raw["entries"].items():
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (self.dimension,):
                raise ProviderError(
                    f"entry {term!r} has dimension {arr.shape}, expected ({self.dimension},)"
                )
            self._entries[term] = arr

    def embed(self, text: str) -> ActionEmbedding:
        try:
            return ActionEmbedding(self._entries[text])
        except KeyError:
            raise ProviderError(f"no precomputed embedding for {text!r}") from None


def write_embedding_table(path, dimension: int, entries: Dict[str, Sequence[float]]):
    payload = {"dimension": dimension, "entries": {k: list(map(float, v)) for k, v in entries.items()}}
    Path(path).write_text(json.dumps(payload))


class RemoteEmbeddingProvider:
    """POST {base}/embed {"texts": [...]} -> {"dimension": D, "vectors": [[...]]}."""

    def __init__(self, base_url: str, client: Optional[httpx.Client] = None, timeout: float = 10.0):
        self._client = client or httpx.Client(base_url=base_url, timeout=timeout)
        self._base = "" if client is not None else ""
        self._prefix = base_url if client is not None else ""
        probe = self._post("/embed", {"texts": ["probe"]})
        self.dimension = int(probe["dimension"])

    def _post(self, path: str, payload: dict) -> dict:
        try:
            resp = self._client.post(self._prefix + path, json=payload)
            resp.raise_for_status()
            return resp.json()
        except httpx.HTTPError as exc:
            raise ProviderError(f"embedding service failure: {exc}") from exc

    def embed(self, text: str) -> ActionEmbedding:
        data = self._post("/embed", {"texts": [text]})
        vectors = data["vectors"]
        if len(vectors) != 1:
            raise ProviderError(f"expected 1 vector, got {len(vectors)}")
        return ActionEmbedding(np.asarray(vectors[0], dtype=np.float64))


class TokenEmbeddingProvider(Protocol):
    dimension: int

    def token_embeddings(self, term: str, pad_to: int = PAD_TOKENS) -> np.ndarray: ...


class PseudoTokenEmbeddingProvider:
    """Hash-seeded per-token vectors; terms pad with space tokens.

    Tokenization is whitespace splitting, which keeps multiword action terms
    ("creep up on") multi-token like a real tokenizer would.
    """

    SPACE_TOKEN = " "

    def __init__(self, dimension: int = 32, seed: int = 0):
        self.dimension = dimension
        self.seed = seed

    def _token_vector(self, token: str) -> np.ndarray:
        rng = np.random.default_rng(_stable_seed("token", str(self.seed), token))
        return rng.standard_normal(self.dimension)

    def token_embeddings(self, term: str, pad_to: int = PAD_TOKENS) -> np.ndarray:
        tokens = term.split()
        if len(tokens) > pad_to:
            raise ProviderError(f"term {term!r} tokenizes to more than {pad_to} tokens")
        tokens = tokens + [self.SPACE_TOKEN] * (pad_to - len(tokens))
        return np.stack([self._token_vector(t) for t in tokens])


class RemoteTokenEmbeddingProvider:
    """POST {base}/token_embeddings {"term":..., "pad_to":5} -> {"dimension","rows"}."""

    def __init__(self, base_url: str, client: Optional[httpx.Client] = None, timeout: float = 10.0):
        self._client = client or httpx.Client(base_url=base_url, timeout=timeout)
        self._prefix = base_url if client is not None else ""
        probe = self._post({"term": "probe", "pad_to": PAD_TOKENS})
        self.dimension = int(probe["dimension"])

    def _post(self, payload: dict) -> dict:
        try:
            resp = self._client.post(self._prefix + "/token_embeddings", json=payload)
            resp.raise_for_status()
            return resp.json()
        except httpx.HTTPError as exc:
            raise ProviderError(f"token-embedding service failure: {exc}") from exc

    def token_embeddings(self, term: str, pad_to: int = PAD_TOKENS) -> np.ndarray:
        data = self._post({"term": term, "pad_to": pad_to})
        rows = np.asarray(data["rows"], dtype=np.float64)
        if rows.shape != (pad_to, self.dimension):
            raise ProviderError(f"bad rows shape {rows.shape}")
        return rows


class TextGenerator(Protocol):
    def generate(self, prompt: SoftPrompt, temperature: float) -> str: ...


class StubTextGenerator:
    """Deterministic generator for tests and offline runs.

    Output is a pure function of the prompt's rendered text (vectors blocks
    render as their fallback term), so replays reproduce sessions exactly.
    Active-character questions get a deterministic "0"/"1" answer.
    """

    def __init__(self, seed: int = 0):
        self.seed = seed

    def generate(self, prompt: SoftPrompt, temperature: float) -> str:
        rendered = prompt.render_text()
        digest = hashlib.sha256(f"{self.seed}|{temperature}|{rendered}".encode("utf-8")).hexdigest()
        if "Answer with a number 0 or 1" in rendered:
            return str(int(digest[:8], 16) % 2)
        return f"Stub sentence {digest[:8]}."


class ScriptedTextGenerator:
    """Replays a fixed queue of replies; raises when exhausted. Test helper."""

    def __init__(self, replies: Sequence[str]):
        self._replies: List[str] = list(replies)
        self.calls: List[str] = []

    def generate(self, prompt: SoftPrompt, temperature: float) -> str:
        self.calls.append(prompt.render_text())
        if not self._replies:
            raise GeneratorUnavailable("scripted generator exhausted")
        return self._replies.pop(0)


class RemoteTextGenerator:
    """POST {base}/generate {"segments": [...], "temperature": t} -> {"text"}."""

    def __init__(self, base_url: str, client: Optional[httpx.Client] = None, timeout: float = 60.0):
        self._client = client or httpx.Client(base_url=base_url, timeout=timeout)
        self._prefix = base_url if client is not None else ""

    def generate(self, prompt: SoftPrompt, temperature: float) -> str:
        payload = {"segments": prompt.to_wire(), "temperature": temperature}
        try:
            resp = self._client.post(self._prefix + "/generate", json=payload)
            resp.raise_for_status()
            return resp.json()["text"]
        except httpx.HTTPError as exc:
            raise GeneratorUnavailable(f"text generator failure: {exc}") from exc
