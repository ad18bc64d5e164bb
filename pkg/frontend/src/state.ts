/** Client-side echo of the session state, driven only by server events.
 *
 * The server is authoritative: everything rendered derives from this state
 * plus in-flight local drags (which reconcile as frame events arrive).
 */
import type { FrameRow, SegmentInfo, ServerEvent, Settings, StoryExport } from "./protocol.js";

export interface ViewSegment {
  id: number;
  start: number;
  end: number;
  text: string | null;
  pending: boolean; // true while a generation job is running for it
}

export interface ViewState {
  connected: boolean;
  settings: Settings;
  frames: FrameRow[];
  segments: ViewSegment[];
  cursor: number;
  auto: boolean;
  playing: boolean;
  playbackPos: number | null;
  preview: { terms: [string, number][]; active: 0 | 1 } | null;
  notices: string[];
}

export function initialState(): ViewState {
  return {
    connected: false,
    settings: { name0: "Character A", name1: "Character B" },
    frames: [],
    segments: [],
    cursor: 0,
    auto: true,
    playing: false,
    playbackPos: null,
    preview: null,
    notices: [],
  };
}

function toViewSegment(info: SegmentInfo, pending = false): ViewSegment {
  return {
    id: info.id,
    start: info.start,
    end: info.end,
    text: info.text ?? null,
    pending,
  };
}

function upsertSegment(state: ViewState, info: SegmentInfo): void {
  const existing = state.segments.find((s) => s.id === info.id);
  if (existing) {
    existing.start = info.start;
    existing.end = info.end;
    existing.text = info.text ?? existing.text;
  } else {
    state.segments.push(toViewSegment(info));
    state.segments.sort((a, b) => a.start - b.start);
  }
}

/** Apply one server event in arrival order. Mutates and returns the state. */
export function applyServerEvent(state: ViewState, event: ServerEvent): ViewState {
  switch (event.type) {
    case "frame": {
      const [p0, p1] = event.poses;
      const row: FrameRow = [p0[0], p0[1], p0[2], p1[0], p1[1], p1[2]];
      state.frames[event.t] = row;
      state.frames.length = event.t + 1; // frames beyond an override are gone
      state.cursor = event.t + 1;
      const seg = state.segments.find((s) => s.id === event.segment);
      if (seg && state.cursor > seg.end) seg.end = state.cursor;
      break;
    }
    case "action_preview":
      state.preview = { terms: event.terms, active: event.active };
      break;
    case "segment_opened":
      upsertSegment(state, event.segment);
      break;
    case "segment_pending": {
      const seg = state.segments.find((s) => s.id === event.segment);
      if (seg) seg.pending = true;
      break;
    }
    case "text_ready": {
      const seg = state.segments.find((s) => s.id === event.segment);
      if (seg) {
        seg.text = event.text;
        seg.pending = false;
      }
      break;
    }
    case "timeline":
      state.segments = event.segments.map((s) => toViewSegment(s));
      if (event.frames !== undefined) {
        state.frames.length = Math.min(state.frames.length, event.frames);
        state.cursor = Math.min(state.cursor, event.frames);
      }
      break;
    case "cursor":
      state.cursor = event.frame;
      break;
    case "playback_frame":
      state.playing = true;
      state.playbackPos = event.t;
      break;
    case "playback_done":
      state.playing = false;
      state.playbackPos = null;
      break;
    case "settings":
      state.settings = event.settings;
      break;
    case "warning":
    case "error":
      state.notices.push(`${event.type}: ${event.message}`);
      if (state.notices.length > 20) state.notices.shift();
      break;
  }
  return state;
}

/** Rebuild the whole state from the server's export (reconnect path). */
export function stateFromExport(doc: StoryExport): ViewState {
  const state = initialState();
  state.settings = doc.settings;
  state.segments = doc.segments.map((s) => toViewSegment(s));
  for (const seg of doc.segments) {
    seg.frames.forEach((row, i) => {
      state.frames[seg.start + i] = row;
    });
  }
  state.frames.length = doc.frame_count;
  state.cursor = doc.frame_count;
  return state;
}

/** Canonical comparison form: the story content the server owns. */
export function storySnapshot(state: ViewState): unknown {
  return {
    settings: state.settings,
    frames: state.frames,
    segments: state.segments.map((s) => ({
      id: s.id,
      start: s.start,
      end: s.end,
      text: s.text,
    })),
  };
}
