/** The playground canvas: two draggable triangle symbols.
 *
 * Dragging a symbol streams pointer_frame events in normalized scene
 * coordinates. Moves are forwarded as they happen (lightly rate-limited)
 * and a keepalive timer re-sends the held pose, so a continuous drag
 * always produces at least the session frame rate's worth of events.
 * Shift-drag rotates the symbol toward the pointer instead of moving it.
 */
import type { ClientEvent, FrameRow, Pose } from "./protocol.js";
import type { ViewState } from "./state.js";

export interface Painter {
  clear(): void;
  drawSymbol(char: 0 | 1, pose: Pose, opts: { name: string; dragging: boolean; portrait?: string | null }): void;
}

const INITIAL_POSES: [Pose, Pose] = [
  [0.35, 0.5, 0],
  [0.65, 0.5, 0],
];
const PICK_RADIUS = 0.14;

export class CanvasPainter implements Painter {
  private ctx: CanvasRenderingContext2D | null;
  private portraits = new Map<string, HTMLImageElement>();

  constructor(private canvas: HTMLCanvasElement) {
    this.ctx = canvas.getContext ? canvas.getContext("2d") : null;
  }

  clear(): void {
    if (!this.ctx) return;
    this.ctx.fillStyle = "#fafaf7";
    this.ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
  }

  drawSymbol(char: 0 | 1, pose: Pose, opts: { name: string; dragging: boolean; portrait?: string | null }): void {
    const ctx = this.ctx;
    if (!ctx) return;
    const w = this.canvas.width;
    const h = this.canvas.height;
    const x = pose[0] * w;
    const y = pose[1] * h;
    const size = Math.min(w, h) * 0.055;
    ctx.save();
    ctx.translate(x, y);
    ctx.rotate(pose[2]);
    ctx.beginPath();
    // apex points along the rotation angle
    ctx.moveTo(size * 1.3, 0);
    ctx.lineTo(-size * 0.75, size * 0.85);
    ctx.lineTo(-size * 0.75, -size * 0.85);
    ctx.closePath();
    ctx.fillStyle = char === 0 ? "#222" : "#fff";
    ctx.strokeStyle = "#222";
    ctx.lineWidth = opts.dragging ? 3 : 1.5;
    ctx.fill();
    ctx.stroke();
    if (opts.portrait) {
      const img = this.portraitImage(opts.portrait);
      if (img.complete && img.naturalWidth > 0) {
        ctx.beginPath();
        ctx.arc(0, 0, size * 0.55, 0, Math.PI * 2);
        ctx.clip();
        ctx.drawImage(img, -size * 0.55, -size * 0.55, size * 1.1, size * 1.1);
      }
    }
    ctx.restore();
    ctx.fillStyle = "#444";
    ctx.font = "12px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(opts.name, x, y + size * 1.9);
  }

  private portraitImage(src: string): HTMLImageElement {
    let img = this.portraits.get(src);
    if (!img) {
      img = new Image();
      img.src = src;
      this.portraits.set(src, img);
    }
    return img;
  }
}

interface DragState {
  char: 0 | 1;
  pointerId: number;
  rotating: boolean;
  lastPose: { x: number; y: number; r?: number };
  lastSentAt: number;
}

export class Playground {
  private drags = new Map<number, DragState>();
  private keepalive: ReturnType<typeof setInterval> | null = null;
  private lastState: ViewState | null = null;
  renderCount = 0;

  constructor(
    private canvas: HTMLCanvasElement,
    private painter: Painter,
    private send: (event: ClientEvent) => void,
    private opts = { keepaliveMs: 100, minSendGapMs: 20 },
  ) {
    canvas.addEventListener("pointerdown", (e) => this.onDown(e as PointerEvent));
    canvas.addEventListener("pointermove", (e) => this.onMove(e as PointerEvent));
    canvas.addEventListener("pointerup", (e) => this.onUp(e as PointerEvent));
    canvas.addEventListener("pointercancel", (e) => this.onUp(e as PointerEvent));
  }

  /** Normalized scene coordinates of a pointer event. */
  private toScene(e: PointerEvent): { x: number; y: number } {
    const rect = this.canvas.getBoundingClientRect();
    const w = rect.width || this.canvas.width || 1;
    const h = rect.height || this.canvas.height || 1;
    return {
      x: Math.min(1, Math.max(0, (e.clientX - rect.left) / w)),
      y: Math.min(1, Math.max(0, (e.clientY - rect.top) / h)),
    };
  }

  private currentPoses(): [Pose, Pose] {
    const state = this.lastState;
    let row: FrameRow | undefined;
    if (state) {
      if (state.playing && state.playbackPos !== null) {
        row = state.frames[state.playbackPos];
      } else if (state.frames.length) {
        row = state.frames[Math.min(state.cursor, state.frames.length) - 1] ??
          state.frames[state.frames.length - 1];
      }
    }
    if (!row) return [[...INITIAL_POSES[0]] as Pose, [...INITIAL_POSES[1]] as Pose];
    return [
      [row[0], row[1], row[2]],
      [row[3], row[4], row[5]],
    ];
  }

  private onDown(e: PointerEvent): void {
    const p = this.toScene(e);
    const poses = this.currentPoses();
    let best: 0 | 1 | null = null;
    let bestDist = PICK_RADIUS;
    for (const char of [0, 1] as const) {
      if ([...this.drags.values()].some((d) => d.char === char)) continue;
      const d = Math.hypot(poses[char][0] - p.x, poses[char][1] - p.y);
      if (d < bestDist) {
        best = char;
        bestDist = d;
      }
    }
    if (best === null) return;
    const drag: DragState = {
      char: best,
      pointerId: e.pointerId ?? 0,
      rotating: e.shiftKey,
      lastPose: { x: poses[best][0], y: poses[best][1] },
      lastSentAt: 0,
    };
    this.drags.set(drag.pointerId, drag);
    this.emitPointer(drag, p, true);
    if (!this.keepalive) {
      this.keepalive = setInterval(() => this.keepaliveTick(), this.opts.keepaliveMs);
    }
  }

  private onMove(e: PointerEvent): void {
    const drag = this.drags.get(e.pointerId ?? 0);
    if (!drag) return;
    drag.rotating = e.shiftKey;
    this.emitPointer(drag, this.toScene(e), false);
    this.render(this.lastState ?? undefined); // optimistic echo
  }

  private onUp(e: PointerEvent): void {
    const drag = this.drags.get(e.pointerId ?? 0);
    if (!drag) return;
    this.drags.delete(drag.pointerId);
    this.send({ type: "pointer_release", char: drag.char });
    if (this.drags.size === 0 && this.keepalive) {
      clearInterval(this.keepalive);
      this.keepalive = null;
    }
  }

  private emitPointer(drag: DragState, p: { x: number; y: number }, force: boolean): void {
    const now = Date.now();
    if (!force && now - drag.lastSentAt < this.opts.minSendGapMs) return;
    if (drag.rotating) {
      // rotate toward the pointer around the symbol's current position
      const r = Math.atan2(p.y - drag.lastPose.y, p.x - drag.lastPose.x);
      drag.lastPose = { ...drag.lastPose, r };
    } else {
      drag.lastPose = { x: p.x, y: p.y, r: drag.lastPose.r };
    }
    drag.lastSentAt = now;
    const event: ClientEvent = {
      type: "pointer_frame",
      char: drag.char,
      x: drag.lastPose.x,
      y: drag.lastPose.y,
    };
    if (drag.lastPose.r !== undefined) (event as { r?: number }).r = drag.lastPose.r;
    this.send(event);
  }

  /** Re-send held poses so a motionless drag still records frames. */
  private keepaliveTick(): void {
    const now = Date.now();
    for (const drag of this.drags.values()) {
      if (now - drag.lastSentAt >= this.opts.keepaliveMs) {
        drag.lastSentAt = now;
        const event: ClientEvent = {
          type: "pointer_frame",
          char: drag.char,
          x: drag.lastPose.x,
          y: drag.lastPose.y,
        };
        if (drag.lastPose.r !== undefined) (event as { r?: number }).r = drag.lastPose.r;
        this.send(event);
      }
    }
  }

  get draggingChars(): (0 | 1)[] {
    return [...this.drags.values()].map((d) => d.char);
  }

  render(state?: ViewState): void {
    if (state) this.lastState = state;
    const s = this.lastState;
    const poses = this.currentPoses();
    // in-flight drags draw at the local pointer pose until the server echoes
    for (const drag of this.drags.values()) {
      poses[drag.char] = [
        drag.lastPose.x,
        drag.lastPose.y,
        drag.lastPose.r ?? poses[drag.char][2],
      ];
    }
    this.painter.clear();
    const names = [s?.settings.name0 ?? "A", s?.settings.name1 ?? "B"];
    const portraits = [s?.settings.portrait0, s?.settings.portrait1];
    for (const char of [0, 1] as const) {
      this.painter.drawSymbol(char, poses[char], {
        name: names[char],
        dragging: this.draggingChars.includes(char),
        portrait: portraits[char] ?? null,
      });
    }
    this.renderCount += 1;
  }
}
