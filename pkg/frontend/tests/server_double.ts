/** In-process stand-in for the session service, faithful to the wire
 * protocol for the flows the UI tests drive: it owns a 10 Hz clock,
 * records pointer poses into frames, grows the last textbox while the
 * user drags, and fills the textbox with a stub sentence once input has
 * been quiet for the stop window.
 */
import type { SocketLike } from "../src/connection.js";
import type {
  ClientEvent,
  FrameRow,
  SegmentInfo,
  ServerEvent,
  Settings,
  StoryExport,
} from "../src/protocol.js";

const TICK_MS = 100;
const STOP_TICKS = 5;

interface DoubleSegment extends SegmentInfo {
  pendingJob: boolean;
}

export class ServerDouble {
  settings: Settings = { name0: "Mira", name1: "Rook", scene: "a pier" };
  frames: FrameRow[] = [];
  segments: DoubleSegment[] = [];
  pointer: ({ x: number; y: number; r?: number } | null)[] = [null, null];
  control = [false, false];
  manipulated = false;
  quietTicks = 0;
  pointerSeen = false;
  sentenceCounter = 0;
  pointerFramesReceived = 0;
  received: ClientEvent[] = [];
  private seq = 0;
  private nextSegmentId = 1;
  private client: SocketLike | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;

  connect(): SocketLike {
    const double = this;
    const socket: SocketLike = {
      send(data: string) {
        double.onClientEvent(JSON.parse(data) as ClientEvent);
      },
      close() {
        double.dropConnection();
      },
      onopen: null,
      onclose: null,
      onmessage: null,
    };
    this.client = socket;
    setTimeout(() => socket.onopen?.(), 0);
    if (!this.timer) {
      this.timer = setInterval(() => this.tick(), TICK_MS);
    }
    return socket;
  }

  /** Simulate a network cut; the server session keeps running. */
  dropConnection(): void {
    const socket = this.client;
    this.client = null;
    socket?.onclose?.();
  }

  private emit(event: ServerEvent): void {
    this.seq += 1;
    const payload = { session: "double", seq: this.seq, ...event };
    this.client?.onmessage?.(JSON.stringify(payload));
  }

  private onClientEvent(event: ClientEvent): void {
    this.received.push(event);
    switch (event.type) {
      case "pointer_frame":
        this.pointerFramesReceived += 1;
        this.pointer[event.char] = { x: event.x, y: event.y, r: event.r };
        this.control[event.char] = true;
        this.manipulated = true;
        this.pointerSeen = true;
        break;
      case "pointer_release":
        this.control[event.char] = false;
        break;
      case "set_settings":
        this.settings = event.settings;
        this.emit({ type: "settings", settings: this.settings });
        break;
      default:
        break; // other flows are not needed by these tests
    }
  }

  private lastSegment(): DoubleSegment | null {
    return this.segments.length ? this.segments[this.segments.length - 1] : null;
  }

  private openSegment(start: number): DoubleSegment {
    const seg: DoubleSegment = {
      id: this.nextSegmentId++,
      start,
      end: start,
      text: null,
      pendingJob: false,
    };
    this.segments.push(seg);
    this.emit({ type: "segment_opened", segment: this.segmentInfo(seg) });
    return seg;
  }

  private segmentInfo(seg: DoubleSegment): SegmentInfo {
    return { id: seg.id, start: seg.start, end: seg.end, text: seg.text };
  }

  tick(): void {
    if (this.control.some(Boolean)) {
      let seg = this.lastSegment();
      if (!seg || (seg.text !== null && this.frames.length >= seg.end)) {
        seg = this.openSegment(this.frames.length);
      }
      const last = this.frames.length
        ? this.frames[this.frames.length - 1]
        : ([0.35, 0.5, 0, 0.65, 0.5, 0] as FrameRow);
      const row: FrameRow = [...last];
      for (const char of [0, 1] as const) {
        const p = this.pointer[char];
        if (this.control[char] && p) {
          row[char * 3] = p.x;
          row[char * 3 + 1] = p.y;
          if (p.r !== undefined) row[char * 3 + 2] = p.r;
        }
      }
      const t = this.frames.length;
      this.frames.push(row);
      if (this.frames.length > seg.end) seg.end = this.frames.length;
      this.emit({ type: "frame", t, poses: [[row[0], row[1], row[2]], [row[3], row[4], row[5]]], segment: seg.id });
      this.emit({
        type: "action_preview",
        terms: [["approach", 0.4], ["follow", 0.3], ["chase", 0.2], ["lead", 0.1]],
        active: 0,
      });
    }

    if (this.pointerSeen) {
      this.quietTicks = 0;
    } else {
      this.quietTicks += 1;
      const seg = this.lastSegment();
      if (
        this.quietTicks === STOP_TICKS &&
        this.manipulated &&
        seg &&
        seg.text === null &&
        this.frames.length > seg.start
      ) {
        this.sentenceCounter += 1;
        seg.text = `Stub sentence ${this.sentenceCounter}.`;
        seg.end = this.frames.length;
        this.manipulated = false;
        this.emit({ type: "text_ready", segment: seg.id, text: seg.text });
        this.openSegment(seg.end);
      }
    }
    this.pointerSeen = false;
  }

  export(): StoryExport {
    return {
      settings: this.settings,
      fps: 10,
      frame_count: this.frames.length,
      segments: this.segments.map((seg) => ({
        ...this.segmentInfo(seg),
        frames: this.frames.slice(seg.start, Math.min(seg.end, this.frames.length)),
      })),
    };
  }
}
