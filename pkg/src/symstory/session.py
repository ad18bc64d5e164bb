"""Interactive session core: a deterministic event-sourced state machine.

One session is one story timeline. Everything that can change state enters
as an event — client events and the 10 Hz clock tick alike — and the
session appends each input to an append-only journal before applying it.
Replaying a journal with deterministic providers and the immediate job
runner reproduces the final state bit for bit.

Timeline model: recorded frames form a prefix [0, n); story segments tile
a contiguous range [0, m) with m >= n (the last textbox may reserve room
ahead of the recording). All four model hidden states reset whenever the
recording crosses into a new segment, so each segment is processed in
isolation.

Sentence generation runs as a job, at most one outstanding per session,
through a pluggable runner. The immediate runner executes jobs inline
(tests, replay); the threaded runner keeps live ticks responsive and
delivers completions at the next tick. Resumed pointer input cancels an
outstanding job.
"""
from __future__ import annotations

import json
import queue
import threading
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .actions import (
    ActionInfo,
    ActiveCharacter,
    BASE_ACTION_TERMS,
    BaseActionLexicon,
    topk_weights,
)
from .config import ServiceConfig, TEMPERATURE_STORY, TOPK_MOTION_TO_TEXT
from .embeddings import (
    EmbeddingProvider,
    GeneratorUnavailable,
    ProviderError,
    PseudoEmbeddingProvider,
    PseudoTokenEmbeddingProvider,
    StubTextGenerator,
    TextGenerator,
    TokenEmbeddingProvider,
)
from .models import (
    SequenceModel,
    motion2action_step,
    motion2char_step,
    proactive_motion_step,
    reactive_motion_step,
)
from .motion import Frame, Pose, clamp_to_scene
from .prompts import StorySettings
from .textgen import build_story_prompt, generate_sentence, text2action, text2char

INITIAL_POSES = (Pose(0.35, 0.5, 0.0), Pose(0.65, 0.5, 0.0))

MUTATING_EVENTS = {
    "pointer_frame",
    "pointer_release",
    "generate_motion_both",
    "generate_text",
    "write_text",
    "edit_text",
    "delete_after",
    "resize_segment",
}


@dataclass
class Segment:
    id: int
    start: int
    end: int
    text: Optional[str] = None
    text_origin: Optional[str] = None  # user | generated | edited
    motion_origin: List[Optional[str]] = field(default_factory=lambda: [None, None])
    conditioning: Optional[ActionInfo] = None  # text-derived or bootstrap

    @property
    def pending(self) -> bool:
        return self.text is None

    def note_motion(self, char: int, source: str):
        cur = self.motion_origin[char]
        if cur is None:
            self.motion_origin[char] = source
        elif cur != source:
            self.motion_origin[char] = "mixed"

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "start": self.start,
            "end": self.end,
            "text": self.text,
            "text_origin": self.text_origin,
            "motion_origin": list(self.motion_origin),
        }


class ImmediateJobRunner:
    """Runs jobs synchronously at submit time. Deterministic."""

    def submit(self, job: Callable[[], dict], deliver: Callable[[dict], None]):
        deliver(job())


class ManualJobRunner:
    """Holds jobs until released; lets tests control completion timing."""

    def __init__(self):
        self.pending: List[Tuple[Callable[[], dict], Callable[[dict], None]]] = []

    def submit(self, job, deliver):
        self.pending.append((job, deliver))

    def run_next(self):
        job, deliver = self.pending.pop(0)
        deliver(job())


class ThreadedJobRunner:
    """Runs jobs on worker threads; completions drain at tick boundaries."""

    def __init__(self):
        self._done: "queue.Queue[Tuple[dict, Callable[[dict], None]]]" = queue.Queue()

    def submit(self, job, deliver):
        def work():
            try:
                result = job()
            except Exception as exc:
                result = {"ok": False, "error": str(exc)}
            self._done.put((result, deliver))

        threading.Thread(target=work, daemon=True).start()

    def drain(self):
        while True:
            try:
                result, deliver = self._done.get_nowait()
            except queue.Empty:
                return
            deliver(result)


@dataclass
class PipelineBundle:
    """Every model and provider a session needs."""

    models: Dict[str, SequenceModel]
    lexicon: BaseActionLexicon
    embedder: EmbeddingProvider
    tokens: TokenEmbeddingProvider
    generator: TextGenerator

    @classmethod
    def stub(cls, hyper_fn, seed: int = 0, embed_dim: int = 32) -> "PipelineBundle":
        """Seeded models plus pseudo/stub providers; fully offline."""
        embedder = PseudoEmbeddingProvider(dimension=embed_dim, seed=seed)
        return cls(
            models={
                kind: SequenceModel(hyper_fn(kind), seed=seed)
                for kind in ("motion2action", "motion2char", "proactive", "reactive")
            },
            lexicon=BaseActionLexicon.from_provider(embedder),
            embedder=embedder,
            tokens=PseudoTokenEmbeddingProvider(dimension=16, seed=seed),
            generator=StubTextGenerator(seed=seed),
        )


class Session:
    def __init__(
        self,
        bundle: PipelineBundle,
        config: Optional[ServiceConfig] = None,
        session_id: str = "local",
        runner=None,
        settings: Optional[StorySettings] = None,
    ):
        self.bundle = bundle
        self.config = config or ServiceConfig()
        self.session_id = session_id
        self.runner = runner or ImmediateJobRunner()

        self.settings = settings or StorySettings(name0="Character A", name1="Character B")
        self.frames: List[Frame] = []
        self.segments: List[Segment] = []
        self.cursor = 0  # index the next recorded frame will take
        self.auto = True
        self.ai_both = False
        self.control: Dict[int, bool] = {0: False, 1: False}
        self.pointer: Dict[int, Optional[Tuple[float, float, Optional[float]]]] = {0: None, 1: None}
        self.playing = False
        self.playback_pos = 0
        self.states = {k: m.fresh_state() for k, m in bundle.models.items()}
        self.latest_recognized: Optional[ActionInfo] = None
        self.last_active = 0
        self.current_segment_id: Optional[int] = None
        self.pending_job_id: Optional[int] = None
        self._job_counter = 0
        self._segment_counter = 0
        self._ticks_since_pointer = 0
        self._pointer_seen_this_tick = False
        self._manipulated_this_segment = False
        self._rng = np.random.default_rng(self.config.seed)
        self._seq = 0
        self._outbox: List[dict] = []
        self.journal: List[dict] = []

    # ------------------------------------------------------------------ events

    def apply(self, event: dict) -> List[dict]:
        """Journal and process one input event; returns emitted events."""
        self.journal.append(event)
        out: List[dict] = []
        kind = event.get("type", "")
        handler = getattr(self, f"_on_{kind}", None) if not kind.startswith("_") else None
        if handler is None:
            self._emit(out, "error", message=f"unknown event type {kind!r}")
            return out
        if self.playing and kind in MUTATING_EVENTS:
            self._emit(out, "error", message=f"{kind} rejected during playback")
            return out
        handler(event, out)
        out.extend(self._flush_outbox())
        self._check_tiling()
        return out

    def tick(self) -> List[dict]:
        return self.apply({"type": "tick"})

    def _emit(self, out: List[dict], kind: str, **payload):
        self._seq += 1
        out.append({"type": kind, "session": self.session_id, "seq": self._seq, **payload})

    def _flush_outbox(self) -> List[dict]:
        drained, self._outbox = self._outbox, []
        return drained

    # ------------------------------------------------------------ client events

    def _on_set_settings(self, event, out):
        try:
            self.settings = StorySettings.from_dict(event["settings"])
        except (KeyError, TypeError, ValueError) as exc:
            self._emit(out, "error", message=f"bad settings: {exc}")
            return
        self._emit(out, "settings", settings=self.settings.to_dict())

    def _on_pointer_frame(self, event, out):
        char = event.get("char")
        if char not in (0, 1):
            self._emit(out, "error", message="pointer char must be 0 or 1")
            return
        try:
            r = event.get("r")
            self.pointer[char] = (
                float(event["x"]),
                float(event["y"]),
                None if r is None else float(r),
            )
        except (KeyError, TypeError, ValueError):
            self._emit(out, "error", message="pointer_frame requires numeric x and y")
            return
        self.control[char] = True
        self._pointer_seen_this_tick = True
        self._manipulated_this_segment = True
        if self.pending_job_id is not None:
            # resuming manipulation cancels the outstanding generation
            self.pending_job_id = None
            self._emit(out, "warning", message="text generation cancelled by new input")

    def _on_pointer_release(self, event, out):
        char = event.get("char")
        if char in (0, 1):
            self.control[char] = False

    def _on_set_auto(self, event, out):
        self.auto = bool(event.get("on", True))

    def _on_generate_motion_both(self, event, out):
        seg = self._ensure_room_for_generation(out)
        self.ai_both = True
        self._emit(out, "segment_opened", segment=seg.to_dict())

    def _on_generate_text(self, event, out):
        self._launch_text_generation(
            out,
            user_prompt=event.get("user_prompt"),
            swap_active=bool(event.get("swap_active")),
            segment_id=event.get("segment"),
        )

    def _on_write_text(self, event, out):
        text = (event.get("text") or "").strip()
        if not text:
            self._emit(out, "error", message="write_text requires a non-empty sentence")
            return
        seg_id = event.get("segment")
        if seg_id is None:
            seg = self._open_or_reuse_textbox(out)
        else:
            seg = self._segment_by_id(seg_id)
            if seg is None:
                self._emit(out, "error", message=f"no segment {seg_id}")
                return
            if not seg.pending:
                self._emit(out, "error", message="segment already has text; use edit_text")
                return
        seg.text = text
        seg.text_origin = "user"
        if seg is self.segments[-1]:
            if seg.end > self.cursor:
                # text arrived ahead of (some of) its motion: text-first branch
                self._derive_conditioning(seg, text, out)
            else:
                self._close_live_segment(seg, out)
        self._emit(out, "text_ready", segment=seg.id, text=text)

    def _on_edit_text(self, event, out):
        seg = self._segment_by_id(event.get("segment"))
        if seg is None:
            self._emit(out, "error", message=f"no segment {event.get('segment')}")
            return
        text = (event.get("text") or "").strip()
        if text:
            seg.text = text
            seg.text_origin = "edited"
            self._emit(out, "text_ready", segment=seg.id, text=text)
        else:
            # clearing the text reopens the segment for regeneration
            seg.text = None
            seg.text_origin = None
            self._emit(out, "timeline", segments=[s.to_dict() for s in self.segments])

    def _on_delete_after(self, event, out):
        f = event.get("frame")
        if not isinstance(f, int) or f < 0 or f > len(self.frames):
            self._emit(out, "error", message=f"delete_after frame {f} out of range")
            return
        self.frames = self.frames[:f]
        kept = []
        for seg in self.segments:
            if seg.start >= f:
                continue
            if seg.end > f:
                seg.end = f
            kept.append(seg)
        self.segments = kept
        self.cursor = f
        self.ai_both = False
        self.latest_recognized = None
        self.current_segment_id = self.segments[-1].id if self.segments else None
        self._rebuild_states()
        self._emit(out, "timeline", segments=[s.to_dict() for s in self.segments], frames=f)

    def _on_resize_segment(self, event, out):
        seg = self._segment_by_id(event.get("segment"))
        if seg is None or not self.segments or seg is not self.segments[-1]:
            self._emit(out, "error", message="only the last textbox is resizable")
            return
        new_end = event.get("new_end")
        floor = max(seg.start + 1, len(self.frames))
        if not isinstance(new_end, int) or new_end < floor:
            self._emit(out, "error", message=f"new_end must be an int >= {floor}")
            return
        seg.end = new_end
        self._emit(out, "timeline", segments=[s.to_dict() for s in self.segments])

    def _on_seek(self, event, out):
        f = event.get("frame")
        if not isinstance(f, int) or f < 0 or f > len(self.frames):
            self._emit(out, "error", message=f"seek frame {f} out of range")
            return
        self.playing = False
        self.ai_both = False
        self.cursor = f
        self.latest_recognized = None
        seg = self._segment_containing(f)
        if seg is None and self.segments and f == self.segments[-1].end:
            seg = self.segments[-1]
        self.current_segment_id = seg.id if seg else None
        self._rebuild_states()
        self._emit(out, "cursor", frame=f)

    def _on_play(self, event, out):
        if self.playing:
            self._emit(out, "error", message="already playing")
            return
        if not self.frames:
            self._emit(out, "error", message="nothing to play")
            return
        self.playing = True
        self.playback_pos = 0
        self.ai_both = False

    # ------------------------------------------------------------------- ticks

    def _on_tick(self, event, out):
        if isinstance(self.runner, ThreadedJobRunner):
            self.runner.drain()
        if self.playing:
            self._playback_tick(out)
            return
        if self.ai_both or any(self.control.values()):
            self._record_tick(out)
        self._stop_detection_tick(out)
        self._pointer_seen_this_tick = False

    def _playback_tick(self, out):
        frame = self.frames[self.playback_pos]
        seg = self._segment_containing(frame.t)
        self._emit(
            out,
            "playback_frame",
            t=frame.t,
            poses=[list(p.as_tuple()) for p in frame.poses],
            segment=None if seg is None else seg.id,
        )
        self.playback_pos += 1
        if self.playback_pos >= len(self.frames):
            self.playing = False
            self._emit(out, "playback_done")

    def _record_tick(self, out):
        user_controls = any(self.control.values())
        if self.cursor < len(self.frames) and user_controls:
            # first override write after a seek discards the recorded future;
            # textboxes keep their ranges and refill as recording proceeds
            self.frames = self.frames[: self.cursor]
            self._emit(out, "timeline", segments=[s.to_dict() for s in self.segments], frames=self.cursor)

        seg = self._segment_for_recording(out)
        if seg is None:
            return

        if self.ai_both and not user_controls and self.cursor >= seg.end:
            # machine-only recording halts at the planned end of the last textbox
            self.ai_both = False
            if seg.pending and self.cursor > seg.start:
                self._launch_text_generation(out)
            return

        frame = self._compose_next_frame(seg, out)
        self.frames.append(frame)
        self.cursor += 1
        if user_controls and seg is self.segments[-1] and self.cursor > seg.end:
            seg.end = self.cursor
        self._emit(
            out,
            "frame",
            t=frame.t,
            poses=[list(p.as_tuple()) for p in frame.poses],
            segment=seg.id,
        )
        self._recognize_new_frame(seg, frame, out)

    def _compose_next_frame(self, seg: Segment, out) -> Frame:
        cur = self.frames[self.cursor - 1] if self.cursor > seg.start else None
        prev = (
            self.frames[self.cursor - 2] if cur is not None and self.cursor - 1 > seg.start else None
        )
        last_poses = self.frames[self.cursor - 1].poses if self.cursor > 0 else INITIAL_POSES

        poses: List[Optional[Pose]] = [None, None]
        sources: List[Optional[str]] = [None, None]
        for char in (0, 1):
            if self.control[char] and self.pointer[char] is not None:
                x, y, r = self.pointer[char]
                poses[char] = clamp_to_scene(Pose(x, y, last_poses[char].r if r is None else r))
                sources[char] = "user"

        generate = (self.auto or self.ai_both) and cur is not None
        info = self._motion_conditioning(seg) if generate else None
        generate = generate and info is not None

        if generate:
            # the proactive model always steps so its state tracks the
            # segment; its output is used only when nobody drives sym0
            try:
                pose0, self.states["proactive"], _ = proactive_motion_step(
                    self.bundle.models["proactive"], self.states["proactive"], info, cur, prev
                )
                if poses[0] is None:
                    poses[0] = pose0
                    sources[0] = "generated"
            except Exception as exc:
                self._emit(out, "warning", message=f"proactive step failed: {exc}")
        if poses[0] is None:
            poses[0] = last_poses[0]

        sym0_next = (
            poses[0].x - last_poses[0].x,
            poses[0].y - last_poses[0].y,
            poses[0].r,
        )
        if generate:
            try:
                pose1, self.states["reactive"], _ = reactive_motion_step(
                    self.bundle.models["reactive"], self.states["reactive"], info, cur, prev, sym0_next
                )
                if poses[1] is None:
                    poses[1] = pose1
                    sources[1] = "generated"
            except Exception as exc:
                self._emit(out, "warning", message=f"reactive step failed: {exc}")
        if poses[1] is None:
            poses[1] = last_poses[1]

        for char in (0, 1):
            if sources[char] is not None:
                seg.note_motion(char, sources[char])
        return Frame(poses=(poses[0], poses[1]), t=self.cursor)

    def _recognize_new_frame(self, seg: Segment, frame: Frame, out):
        prev = self.frames[self.cursor - 2] if self.cursor - 1 > seg.start else None
        try:
            emb, self.states["motion2action"] = motion2action_step(
                self.bundle.models["motion2action"], self.states["motion2action"], frame, prev
            )
            who, self.states["motion2char"] = motion2char_step(
                self.bundle.models["motion2char"], self.states["motion2char"], frame, prev, emb
            )
        except Exception as exc:
            self._emit(out, "warning", message=f"recognition failed: {exc}")
            return
        self.latest_recognized = ActionInfo(emb, who)
        self.last_active = who.indicator
        try:
            pairs = topk_weights(emb, self.bundle.lexicon, TOPK_MOTION_TO_TEXT)
        except ValueError:
            return  # zero embedding has no ranking
        self._emit(
            out,
            "action_preview",
            terms=[[t, w] for t, w in pairs],
            active=who.indicator,
        )

    def _stop_detection_tick(self, out):
        if not self.auto:
            return
        if self._pointer_seen_this_tick:
            self._ticks_since_pointer = 0
            return
        self._ticks_since_pointer += 1
        if self._ticks_since_pointer != self.config.stop_window_ticks:
            return
        if not self._manipulated_this_segment or self.pending_job_id is not None:
            return
        seg = self.segments[-1] if self.segments else None
        if seg is None or not seg.pending or self.cursor <= seg.start:
            return
        self._launch_text_generation(out)

    # ------------------------------------------------------------- generation

    def _launch_text_generation(self, out, user_prompt=None, swap_active=False, segment_id=None):
        if self.pending_job_id is not None:
            self._emit(out, "error", message="a text generation job is already running")
            return
        if segment_id is not None:
            seg = self._segment_by_id(segment_id)
            if seg is None:
                self._emit(out, "error", message=f"no segment {segment_id}")
                return
        else:
            seg = self.segments[-1] if self.segments and self.segments[-1].pending else None
            if seg is None:
                start = self._timeline_end()
                seg = self._open_segment(start, start + self.config.default_segment_frames)
                self._emit(out, "segment_opened", segment=seg.to_dict())
        if not seg.pending:
            self._emit(out, "error", message="segment already has text; delete it first")
            return

        seg_frames = self.frames[seg.start : min(seg.end, len(self.frames))]
        text_first = len(seg_frames) == 0
        if text_first:
            term = BASE_ACTION_TERMS[int(self._rng.integers(0, len(BASE_ACTION_TERMS)))]
            info = ActionInfo(self.bundle.lexicon.embedding_of(term), ActiveCharacter(0))
        else:
            info = self._recognize_isolated(seg_frames)
            if info is None:
                self._emit(out, "error", message="could not derive action info from motion")
                return
        if swap_active:
            info = ActionInfo(info.embedding, info.active.swapped())
        history = [s.text for s in self.segments if s.text and s.start < seg.start]
        following = [s.text for s in self.segments if s.text and s.start > seg.start]
        try:
            prompt = build_story_prompt(
                self.settings,
                info,
                self.bundle.lexicon,
                self.bundle.tokens,
                history=history,
                following=following,
                user_prompt=user_prompt,
            )
        except (ProviderError, ValueError) as exc:
            self._emit(out, "error", message=f"prompt build failed: {exc}")
            return

        self._job_counter += 1
        job_id = self._job_counter
        self.pending_job_id = job_id
        self._emit(out, "segment_pending", segment=seg.id)
        generator = self.bundle.generator
        bundle = self.bundle
        settings = self.settings
        live_close = seg is self.segments[-1] and not text_first
        seg_id = seg.id

        def job() -> dict:
            try:
                text = generate_sentence(generator, prompt, TEMPERATURE_STORY)
            except (GeneratorUnavailable, ProviderError, ValueError) as exc:
                return {"ok": False, "error": str(exc)}
            result = {"ok": True, "text": text}
            if text_first:
                # the sentence now defines the segment's conditioning
                try:
                    emb = text2action(text, bundle.embedder, bundle.lexicon)
                    try:
                        who = text2char(
                            text, emb, settings, generator, bundle.lexicon, bundle.tokens
                        )
                        result["conditioning"] = (emb, who)
                    except (ValueError, GeneratorUnavailable) as exc:
                        result["conditioning"] = (emb, None)
                        result["char_warning"] = str(exc)
                except ProviderError as exc:
                    result["char_warning"] = str(exc)
            return result

        self.runner.submit(job, lambda result: self._finish_text_job(job_id, seg_id, result, live_close))

    def _finish_text_job(self, job_id: int, seg_id: int, result: dict, live_close: bool):
        out: List[dict] = []
        if self.pending_job_id != job_id:
            return  # cancelled while running; drop the result
        self.pending_job_id = None
        seg = self._segment_by_id(seg_id)
        if seg is None:
            return
        if not result.get("ok"):
            self._emit(out, "error", message=f"text generation failed: {result.get('error')}")
        else:
            seg.text = result["text"]
            seg.text_origin = "generated"
            if "conditioning" in result:
                emb, who = result["conditioning"]
                if who is None:
                    who = ActiveCharacter(self.last_active)
                    self._emit(
                        out,
                        "warning",
                        message=f"active-character recognition failed: {result.get('char_warning')}",
                    )
                self.last_active = who.indicator
                seg.conditioning = ActionInfo(emb, who)
            elif result.get("char_warning"):
                self._emit(out, "warning", message=str(result["char_warning"]))
            if live_close and seg is self.segments[-1]:
                # re-checked at delivery: the timeline may have moved on
                self._close_live_segment(seg, out)
            self._emit(out, "text_ready", segment=seg.id, text=seg.text)
        self._outbox.extend(out)

    def _derive_conditioning(self, seg: Segment, text: str, out):
        try:
            emb = text2action(text, self.bundle.embedder, self.bundle.lexicon)
        except (ProviderError, ValueError) as exc:
            self._emit(out, "error", message=f"text embedding failed: {exc}")
            return
        try:
            who = text2char(
                text, emb, self.settings, self.bundle.generator, self.bundle.lexicon, self.bundle.tokens
            )
        except (ValueError, GeneratorUnavailable) as exc:
            who = ActiveCharacter(self.last_active)
            self._emit(out, "warning", message=f"active-character recognition failed: {exc}")
        self.last_active = who.indicator
        seg.conditioning = ActionInfo(emb, who)

    # ------------------------------------------------------------ segment plumbing

    def _segment_by_id(self, seg_id) -> Optional[Segment]:
        for seg in self.segments:
            if seg.id == seg_id:
                return seg
        return None

    def _timeline_end(self) -> int:
        """Where the next textbox starts: the end of the tiled segment range."""
        return self.segments[-1].end if self.segments else 0

    def _segment_containing(self, frame_index: int) -> Optional[Segment]:
        for seg in self.segments:
            if seg.start <= frame_index < seg.end:
                return seg
        return None

    def _open_segment(self, start: int, end: int) -> Segment:
        self._segment_counter += 1
        seg = Segment(id=self._segment_counter, start=start, end=end)
        self.segments.append(seg)
        self._enter_segment(seg)
        return seg

    def _enter_segment(self, seg: Segment):
        if self.current_segment_id != seg.id:
            self.current_segment_id = seg.id
            self._reset_states()
            self.latest_recognized = None
            self._manipulated_this_segment = False

    def _segment_for_recording(self, out) -> Optional[Segment]:
        seg = self._segment_containing(self.cursor)
        if seg is None and self.segments:
            last = self.segments[-1]
            if last.pending and self.cursor == last.end:
                seg = last  # growing motion-first textbox
        if seg is None:
            seg = self._open_segment(self.cursor, self.cursor)
            self._emit(out, "segment_opened", segment=seg.to_dict())
        else:
            self._enter_segment(seg)
        return seg

    def _ensure_room_for_generation(self, out) -> Segment:
        if self.segments:
            last = self.segments[-1]
            if self.cursor < last.end:
                seg = self._segment_containing(self.cursor) or last
                self._enter_segment(seg)
                return seg
            if last.pending:
                last.end = self.cursor + self.config.default_segment_frames
                self._enter_segment(last)
                return last
        start = self._timeline_end()
        return self._open_segment(start, start + self.config.default_segment_frames)

    def _open_or_reuse_textbox(self, out) -> Segment:
        if self.segments:
            last = self.segments[-1]
            if last.pending and last.start == last.end == self.cursor:
                last.end = self.cursor + self.config.default_segment_frames
                self._enter_segment(last)
                self._emit(out, "timeline", segments=[s.to_dict() for s in self.segments])
                return last
        start = self._timeline_end()
        seg = self._open_segment(start, start + self.config.default_segment_frames)
        self._emit(out, "segment_opened", segment=seg.to_dict())
        return seg

    def _close_live_segment(self, seg: Segment, out):
        # never shrink below the recorded extent (the cursor may sit mid-
        # timeline after a seek; recorded frames must stay covered)
        seg.end = max(seg.start + 1, len(self.frames))
        new = self._open_segment(seg.end, seg.end)
        self._emit(out, "segment_opened", segment=new.to_dict())

    def _motion_conditioning(self, seg: Segment) -> Optional[ActionInfo]:
        if seg.conditioning is not None:
            return seg.conditioning
        if self.latest_recognized is not None:
            return self.latest_recognized
        # nothing to go on yet: pick a seeded-random base action so fully
        # machine-driven play can begin from silence
        term = BASE_ACTION_TERMS[int(self._rng.integers(0, len(BASE_ACTION_TERMS)))]
        seg.conditioning = ActionInfo(self.bundle.lexicon.embedding_of(term), ActiveCharacter(0))
        return seg.conditioning

    # --------------------------------------------------------------- states

    def _reset_states(self):
        self.states = {k: m.fresh_state() for k, m in self.bundle.models.items()}

    def _rebuild_states(self):
        """Recompute hidden states by replaying the current segment up to the
        cursor. Recognizers consume frames [start, cursor); the generators lag
        one frame behind, exactly as the live loop leaves them."""
        self._reset_states()
        self.latest_recognized = None
        seg = self._segment_containing(self.cursor)
        if seg is None and self.segments and self.cursor == self.segments[-1].end:
            seg = self.segments[-1]
        if seg is None or self.cursor <= seg.start:
            return
        prev = None
        for t in range(seg.start, self.cursor):
            frame = self.frames[t]
            try:
                emb, self.states["motion2action"] = motion2action_step(
                    self.bundle.models["motion2action"], self.states["motion2action"], frame, prev
                )
                who, self.states["motion2char"] = motion2char_step(
                    self.bundle.models["motion2char"], self.states["motion2char"], frame, prev, emb
                )
                self.latest_recognized = ActionInfo(emb, who)
            except Exception:
                pass
            if t < self.cursor - 1:
                cond = seg.conditioning or self.latest_recognized
                if cond is not None:
                    try:
                        nxt = self.frames[t + 1]
                        sym0_next = (
                            nxt.poses[0].x - frame.poses[0].x,
                            nxt.poses[0].y - frame.poses[0].y,
                            nxt.poses[0].r,
                        )
                        _, self.states["proactive"], _ = proactive_motion_step(
                            self.bundle.models["proactive"], self.states["proactive"], cond, frame, prev
                        )
                        _, self.states["reactive"], _ = reactive_motion_step(
                            self.bundle.models["reactive"], self.states["reactive"], cond, frame, prev, sym0_next
                        )
                    except Exception:
                        pass
            prev = frame

    def _recognize_isolated(self, frames: List[Frame]) -> Optional[ActionInfo]:
        """Fresh-state recognition over one segment's frames."""
        if not frames:
            return None
        m2a = self.bundle.models["motion2action"]
        m2c = self.bundle.models["motion2char"]
        sa, sc = m2a.fresh_state(), m2c.fresh_state()
        emb = None
        who = None
        prev = None
        for i, frame in enumerate(frames):
            rebased = Frame(poses=frame.poses, t=i)
            try:
                emb, sa = motion2action_step(m2a, sa, rebased, prev)
                who, sc = motion2char_step(m2c, sc, rebased, prev, emb)
            except Exception:
                return None
            prev = rebased
        if emb is None or who is None:
            return None
        self.last_active = who.indicator
        return ActionInfo(emb, who)

    # ------------------------------------------------------------- invariants

    def _check_tiling(self):
        assert self.cursor <= len(self.frames), "cursor beyond recorded frames"
        if not self.segments:
            assert not self.frames, "recorded frames without segments"
            return
        expected = 0
        for seg in self.segments:
            assert seg.start == expected, f"segment {seg.id} starts at {seg.start}, want {expected}"
            assert seg.end >= seg.start, f"segment {seg.id} has negative range"
            expected = seg.end
        assert expected >= len(self.frames), "segments do not cover all recorded frames"

    # ----------------------------------------------------------------- export

    def export(self) -> dict:
        return {
            "settings": self.settings.to_dict(),
            "fps": self.config.fps,
            "frame_count": len(self.frames),
            "segments": [
                {
                    **seg.to_dict(),
                    "frames": [
                        [
                            frame.poses[0].x,
                            frame.poses[0].y,
                            frame.poses[0].r,
                            frame.poses[1].x,
                            frame.poses[1].y,
                            frame.poses[1].r,
                        ]
                        for frame in self.frames[seg.start : min(seg.end, len(self.frames))]
                    ],
                }
                for seg in self.segments
            ],
        }

    def export_json(self) -> str:
        return json.dumps(self.export(), sort_keys=True)

    # ----------------------------------------------------------------- replay

    @classmethod
    def replay(
        cls,
        bundle: PipelineBundle,
        events: List[dict],
        config: Optional[ServiceConfig] = None,
        session_id: str = "replay",
    ) -> "Session":
        session = cls(bundle, config=config, session_id=session_id)
        for event in events:
            session.apply(event)
        return session
