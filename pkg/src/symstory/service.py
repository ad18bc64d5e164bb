"""HTTP control plane and streaming wire protocol.

Endpoints:

* ``POST /session`` -> ``{"id": ...}``; one session per id.
* ``GET/PUT /session/{id}/settings`` — story settings.
* ``GET /session/{id}/export`` — full story JSON.
* ``WS /session/{id}/ws`` — bidirectional JSON events, one session per
  connection. The server owns the 10 Hz clock; emitted events stream back.

A stub provider app (``build_provider_app``) speaks the provider wire
protocols (/embed, /token_embeddings, /generate) backed by the pseudo
providers, so a full stack can run with no external services.

Sessions journal every input event to ``<journal_dir>/<id>.jsonl``; a
session found on disk but not in memory is rebuilt by replay.
"""
from __future__ import annotations

import asyncio
import json
import threading
import uuid
from pathlib import Path
from typing import Dict, Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect

from .config import ServiceConfig, model_hyper
from .embeddings import (
    PseudoEmbeddingProvider,
    PseudoTokenEmbeddingProvider,
    RemoteEmbeddingProvider,
    RemoteTextGenerator,
    RemoteTokenEmbeddingProvider,
    StubTextGenerator,
)
from .actions import BaseActionLexicon
from .models import SequenceModel
from .neural.checkpoint import load_checkpoint
from .prompts import PAD_TOKENS, SoftPrompt, StorySettings
from .session import ImmediateJobRunner, PipelineBundle, Session, ThreadedJobRunner


def build_bundle(config: ServiceConfig) -> PipelineBundle:
    """Assemble models and providers from a service config."""
    if config.embed_url:
        embedder = RemoteEmbeddingProvider(config.embed_url)
    else:
        embedder = PseudoEmbeddingProvider(
            dimension=32 if config.preset == "desk" else 384, seed=config.seed
        )
    tokens = (
        RemoteTokenEmbeddingProvider(config.token_url)
        if config.token_url
        else PseudoTokenEmbeddingProvider(dimension=16, seed=config.seed)
    )
    generator = (
        RemoteTextGenerator(config.generate_url)
        if config.generate_url
        else StubTextGenerator(seed=config.seed)
    )
    models: Dict[str, SequenceModel] = {}
    for kind in ("motion2action", "motion2char", "proactive", "reactive"):
        path = config.checkpoints.get(kind)
        if path:
            models[kind] = SequenceModel.from_checkpoint(load_checkpoint(path))
        else:
            hyper = model_hyper(kind, config.preset)
            if hyper.embed_dim != embedder.dimension:
                hyper = type(hyper).from_dict({**hyper.to_dict(), "embed_dim": embedder.dimension})
            models[kind] = SequenceModel(hyper, seed=config.seed)
    return PipelineBundle(
        models=models,
        lexicon=BaseActionLexicon.from_provider(embedder),
        embedder=embedder,
        tokens=tokens,
        generator=generator,
    )


class SessionHost:
    """Owns live sessions; serializes event application per session."""

    def __init__(
        self,
        config: ServiceConfig,
        bundle: Optional[PipelineBundle] = None,
        journal_dir: Optional[Path] = None,
        auto_tick: bool = True,
    ):
        self.config = config
        self.bundle = bundle or build_bundle(config)
        self.journal_dir = Path(journal_dir) if journal_dir else None
        if self.journal_dir:
            self.journal_dir.mkdir(parents=True, exist_ok=True)
        self.auto_tick = auto_tick
        self.sessions: Dict[str, Session] = {}
        self.locks: Dict[str, threading.Lock] = {}

    def create(self, session_id: Optional[str] = None) -> str:
        sid = session_id or uuid.uuid4().hex[:12]
        if sid in self.sessions:
            raise KeyError(f"session {sid} already exists")
        runner = ThreadedJobRunner() if self.auto_tick else ImmediateJobRunner()
        self.sessions[sid] = Session(
            self.bundle, config=self.config, session_id=sid, runner=runner
        )
        self.locks[sid] = threading.Lock()
        return sid

    def get(self, session_id: str) -> Session:
        if session_id in self.sessions:
            return self.sessions[session_id]
        journal = self._journal_path(session_id)
        if journal and journal.exists():
            events = [json.loads(line) for line in journal.read_text().splitlines() if line]
            session = Session.replay(
                self.bundle, events, config=self.config, session_id=session_id
            )
            self.sessions[session_id] = session
            self.locks[session_id] = threading.Lock()
            return session
        raise KeyError(f"no session {session_id}")

    def _journal_path(self, session_id: str) -> Optional[Path]:
        if self.journal_dir is None:
            return None
        return self.journal_dir / f"{session_id}.jsonl"

    def apply(self, session_id: str, event: dict) -> list:
        session = self.get(session_id)
        with self.locks[session_id]:
            emitted = session.apply(event)
        path = self._journal_path(session_id)
        if path:
            with path.open("a") as fh:
                fh.write(json.dumps(event) + "\n")
        return emitted


def build_app(
    config: Optional[ServiceConfig] = None,
    bundle: Optional[PipelineBundle] = None,
    journal_dir: Optional[Path] = None,
    auto_tick: bool = True,
    static_dir: Optional[Path] = None,
) -> FastAPI:
    config = config or ServiceConfig()
    host = SessionHost(config, bundle=bundle, journal_dir=journal_dir, auto_tick=auto_tick)
    app = FastAPI(title="symstory session service")
    app.state.host = host

    @app.post("/session")
    def create_session():
        sid = host.create()
        return {"id": sid, "fps": config.fps}

    @app.get("/session/{sid}/settings")
    def get_settings(sid: str):
        try:
            return host.get(sid).settings.to_dict()
        except KeyError:
            raise HTTPException(404, f"no session {sid}")

    @app.put("/session/{sid}/settings")
    def put_settings(sid: str, settings: dict):
        try:
            events = host.apply(sid, {"type": "set_settings", "settings": settings})
        except KeyError:
            raise HTTPException(404, f"no session {sid}")
        errors = [e for e in events if e["type"] == "error"]
        if errors:
            raise HTTPException(422, errors[0]["message"])
        return host.get(sid).settings.to_dict()

    @app.get("/session/{sid}/export")
    def export_session(sid: str):
        try:
            return json.loads(host.get(sid).export_json())
        except KeyError:
            raise HTTPException(404, f"no session {sid}")

    @app.websocket("/session/{sid}/ws")
    async def session_ws(ws: WebSocket, sid: str):
        try:
            host.get(sid)
        except KeyError:
            await ws.close(code=4404)
            return
        await ws.accept()
        send_lock = asyncio.Lock()

        async def send_events(events):
            async with send_lock:
                for event in events:
                    await ws.send_text(json.dumps(event))

        async def tick_loop():
            while True:
                await asyncio.sleep(1.0 / config.fps)
                events = await asyncio.to_thread(host.apply, sid, {"type": "tick"})
                await send_events(events)

        ticker = asyncio.create_task(tick_loop()) if auto_tick else None
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    event = json.loads(raw)
                except json.JSONDecodeError:
                    await send_events([{"type": "error", "message": "malformed JSON"}])
                    continue
                if auto_tick and event.get("type") == "tick":
                    await send_events(
                        [{"type": "error", "message": "server owns the clock"}]
                    )
                    continue
                events = await asyncio.to_thread(host.apply, sid, event)
                await send_events(events)
        except WebSocketDisconnect:
            pass
        finally:
            if ticker:
                ticker.cancel()

    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def build_provider_app(seed: int = 0, embed_dim: int = 32, token_dim: int = 16) -> FastAPI:
    """Reference provider service speaking the documented wire protocols."""
    embedder = PseudoEmbeddingProvider(dimension=embed_dim, seed=seed)
    tokens = PseudoTokenEmbeddingProvider(dimension=token_dim, seed=seed)
    generator = StubTextGenerator(seed=seed)
    app = FastAPI(title="symstory stub providers")

    @app.post("/embed")
    def embed(payload: dict):
        texts = payload.get("texts")
        if not isinstance(texts, list) or not texts:
            raise HTTPException(422, "texts must be a non-empty list")
        return {
            "dimension": embedder.dimension,
            "vectors": [embedder.embed(t).vector.tolist() for t in texts],
        }

    @app.post("/token_embeddings")
    def token_embeddings(payload: dict):
        term = payload.get("term")
        pad_to = int(payload.get("pad_to", PAD_TOKENS))
        if not term:
            raise HTTPException(422, "term required")
        return {
            "dimension": tokens.dimension,
            "rows": tokens.token_embeddings(term, pad_to=pad_to).tolist(),
        }

    @app.post("/generate")
    def generate(payload: dict):
        segments = payload.get("segments", [])
        prompt = SoftPrompt()
        for seg in segments:
            if seg.get("type") == "text":
                prompt.text(seg.get("value", ""))
            elif seg.get("type") == "vectors":
                import numpy as np

                prompt.vectors(np.asarray(seg.get("rows"), dtype=float))
            else:
                raise HTTPException(422, f"unknown segment type {seg.get('type')!r}")
        return {"text": generator.generate(prompt, float(payload.get("temperature", 0.7)))}

    return app
