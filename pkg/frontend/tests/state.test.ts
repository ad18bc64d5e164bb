import { describe, expect, it } from "vitest";

import { applyServerEvent, initialState, stateFromExport, storySnapshot } from "../src/state.js";
import type { StoryExport } from "../src/protocol.js";

describe("applyServerEvent", () => {
  it("appends frames and advances the cursor", () => {
    const s = initialState();
    applyServerEvent(s, { type: "segment_opened", segment: { id: 1, start: 0, end: 0, text: null } });
    applyServerEvent(s, { type: "frame", t: 0, poses: [[0.1, 0.2, 0], [0.8, 0.9, 1]], segment: 1 });
    expect(s.frames).toEqual([[0.1, 0.2, 0, 0.8, 0.9, 1]]);
    expect(s.cursor).toBe(1);
    expect(s.segments[0].end).toBe(1); // textbox grew with the frame
  });

  it("an override frame discards the recorded future", () => {
    const s = initialState();
    applyServerEvent(s, { type: "segment_opened", segment: { id: 1, start: 0, end: 0, text: null } });
    for (let t = 0; t < 5; t++) {
      applyServerEvent(s, { type: "frame", t, poses: [[0.1 * t, 0, 0], [1, 1, 0]], segment: 1 });
    }
    applyServerEvent(s, { type: "frame", t: 2, poses: [[9, 9, 9], [1, 1, 0]], segment: 1 });
    expect(s.frames.length).toBe(3);
    expect(s.frames[2][0]).toBe(9);
  });

  it("text_ready fills the segment and clears pending", () => {
    const s = initialState();
    applyServerEvent(s, { type: "segment_opened", segment: { id: 3, start: 0, end: 4, text: null } });
    applyServerEvent(s, { type: "segment_pending", segment: 3 });
    expect(s.segments[0].pending).toBe(true);
    applyServerEvent(s, { type: "text_ready", segment: 3, text: "A line." });
    expect(s.segments[0]).toMatchObject({ text: "A line.", pending: false });
  });

  it("timeline replaces segments and truncates frames", () => {
    const s = initialState();
    applyServerEvent(s, { type: "segment_opened", segment: { id: 1, start: 0, end: 9, text: null } });
    for (let t = 0; t < 9; t++) {
      applyServerEvent(s, { type: "frame", t, poses: [[0, 0, 0], [1, 1, 0]], segment: 1 });
    }
    applyServerEvent(s, {
      type: "timeline",
      segments: [{ id: 1, start: 0, end: 4, text: "kept" }],
      frames: 4,
    });
    expect(s.frames.length).toBe(4);
    expect(s.segments).toHaveLength(1);
    expect(s.segments[0].text).toBe("kept");
  });

  it("collects warnings and errors as notices", () => {
    const s = initialState();
    applyServerEvent(s, { type: "warning", message: "w" });
    applyServerEvent(s, { type: "error", message: "e" });
    expect(s.notices).toEqual(["warning: w", "error: e"]);
  });

  it("playback frames track position without touching frames", () => {
    const s = initialState();
    applyServerEvent(s, { type: "segment_opened", segment: { id: 1, start: 0, end: 1, text: null } });
    applyServerEvent(s, { type: "frame", t: 0, poses: [[0, 0, 0], [1, 1, 0]], segment: 1 });
    applyServerEvent(s, { type: "playback_frame", t: 0, poses: [[0, 0, 0], [1, 1, 0]], segment: 1 });
    expect(s.playing).toBe(true);
    expect(s.playbackPos).toBe(0);
    applyServerEvent(s, { type: "playback_done" });
    expect(s.playing).toBe(false);
    expect(s.frames).toHaveLength(1);
  });
});

describe("stateFromExport", () => {
  const doc: StoryExport = {
    settings: { name0: "Mira", name1: "Rook" },
    fps: 10,
    frame_count: 3,
    segments: [
      { id: 1, start: 0, end: 2, text: "one", frames: [[0, 0, 0, 1, 1, 0], [0.1, 0, 0, 1, 1, 0]] },
      { id: 2, start: 2, end: 3, text: null, frames: [[0.2, 0, 0, 1, 1, 0]] },
    ],
  };

  it("rebuilds frames in timeline order", () => {
    const s = stateFromExport(doc);
    expect(s.frames).toHaveLength(3);
    expect(s.frames[2][0]).toBeCloseTo(0.2);
    expect(s.cursor).toBe(3);
    expect(s.segments.map((x) => x.id)).toEqual([1, 2]);
  });

  it("round-trips through the snapshot form", () => {
    const a = storySnapshot(stateFromExport(doc));
    const b = storySnapshot(stateFromExport(JSON.parse(JSON.stringify(doc))));
    expect(a).toEqual(b);
  });
});
