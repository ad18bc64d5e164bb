/** Timeline strip: frame progress bar with aligned story textboxes.
 *
 * Clicking or scrubbing the bar seeks; textboxes edit in place; the last
 * textbox carries a drag handle that resizes its planned frame range.
 */
import type { ClientEvent } from "./protocol.js";
import type { ViewSegment, ViewState } from "./state.js";

const MIN_VISIBLE_FRAMES = 40;

export class Timeline {
  readonly root: HTMLElement;
  private bar: HTMLElement;
  private cursorMark: HTMLElement;
  private boxRow: HTMLElement;
  private resizing: { segment: number; totalFrames: number } | null = null;
  private lastState: ViewState | null = null;

  constructor(doc: Document, private send: (event: ClientEvent) => void) {
    this.root = doc.createElement("div");
    this.root.className = "timeline";
    this.bar = doc.createElement("div");
    this.bar.className = "timeline-bar";
    this.cursorMark = doc.createElement("div");
    this.cursorMark.className = "timeline-cursor";
    this.bar.appendChild(this.cursorMark);
    this.boxRow = doc.createElement("div");
    this.boxRow.className = "timeline-boxes";
    this.root.appendChild(this.bar);
    this.root.appendChild(this.boxRow);

    this.bar.addEventListener("pointerdown", (e) => this.seekTo(e as PointerEvent));
    this.root.addEventListener("pointermove", (e) => this.onResizeMove(e as PointerEvent));
    this.root.addEventListener("pointerup", () => (this.resizing = null));
  }

  private totalFrames(state: ViewState): number {
    const segEnd = state.segments.length
      ? state.segments[state.segments.length - 1].end
      : 0;
    return Math.max(MIN_VISIBLE_FRAMES, state.frames.length, segEnd);
  }

  private seekTo(e: PointerEvent): void {
    const state = this.lastState;
    if (!state || !state.frames.length) return;
    const rect = this.bar.getBoundingClientRect();
    const w = rect.width || 1;
    const frac = Math.min(1, Math.max(0, (e.clientX - rect.left) / w));
    const frame = Math.min(state.frames.length, Math.round(frac * this.totalFrames(state)));
    this.send({ type: "seek", frame });
  }

  private onResizeMove(e: PointerEvent): void {
    if (!this.resizing) return;
    const rect = this.bar.getBoundingClientRect();
    const w = rect.width || 1;
    const frac = Math.min(1, Math.max(0, (e.clientX - rect.left) / w));
    const newEnd = Math.max(1, Math.round(frac * this.resizing.totalFrames));
    this.send({ type: "resize_segment", segment: this.resizing.segment, new_end: newEnd });
  }

  private buildBox(doc: Document, seg: ViewSegment, state: ViewState, isLast: boolean): HTMLElement {
    const total = this.totalFrames(state);
    const box = doc.createElement("div");
    box.className = "textbox" + (seg.pending ? " pending" : "");
    box.style.left = `${(seg.start / total) * 100}%`;
    box.style.width = `${(Math.max(1, seg.end - seg.start) / total) * 100}%`;
    box.dataset.segment = String(seg.id);

    const text = doc.createElement("textarea");
    text.className = "textbox-text";
    text.value = seg.text ?? "";
    text.placeholder = seg.pending ? "writing…" : "write a sentence";
    text.addEventListener("change", () => {
      const value = text.value.trim();
      if (seg.text === null && value) {
        this.send({ type: "write_text", segment: seg.id, text: value });
      } else if (seg.text !== null && value !== seg.text) {
        this.send({ type: "edit_text", segment: seg.id, text: value });
      }
    });
    box.appendChild(text);

    if (seg.pending) {
      const spin = doc.createElement("span");
      spin.className = "spinner";
      spin.textContent = "⋯";
      box.appendChild(spin);
    }
    if (isLast) {
      const handle = doc.createElement("div");
      handle.className = "resize-handle";
      handle.title = "drag to resize this textbox";
      handle.addEventListener("pointerdown", (e) => {
        e.stopPropagation();
        this.resizing = { segment: seg.id, totalFrames: this.totalFrames(state) };
      });
      box.appendChild(handle);
    }
    return box;
  }

  render(state: ViewState): void {
    this.lastState = state;
    const doc = this.root.ownerDocument;
    const total = this.totalFrames(state);
    const recorded = state.frames.length / total;
    this.bar.style.setProperty("--recorded", `${recorded * 100}%`);
    const pos = state.playing && state.playbackPos !== null ? state.playbackPos : state.cursor;
    this.cursorMark.style.left = `${(pos / total) * 100}%`;

    this.boxRow.textContent = "";
    state.segments.forEach((seg, i) => {
      this.boxRow.appendChild(
        this.buildBox(doc, seg, state, i === state.segments.length - 1),
      );
    });
  }
}
