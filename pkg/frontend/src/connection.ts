/** Session connection: one websocket, JSON events both ways.
 *
 * The socket implementation is injectable so tests can run against an
 * in-process server double. On reconnect the owner re-syncs from the
 * export endpoint before resuming live events.
 */
import type { ClientEvent, ServerEvent } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
  onmessage: ((data: string) => void) | null;
}

export type SocketFactory = () => SocketLike;

export interface ConnectionHooks {
  onEvent: (event: ServerEvent) => void;
  onStatus: (connected: boolean) => void;
  /** Called after a reconnect completes, before live events resume. */
  onResync?: () => Promise<void> | void;
}

export class Connection {
  private socket: SocketLike | null = null;
  private closed = false;
  private everConnected = false;
  dropped = 0; // client events discarded while disconnected

  constructor(
    private factory: SocketFactory,
    private hooks: ConnectionHooks,
    private reconnectDelayMs = 1000,
  ) {}

  connect(): void {
    this.closed = false;
    this.open();
  }

  private open(): void {
    const socket = this.factory();
    this.socket = socket;
    socket.onopen = () => {
      const resume = () => {
        this.hooks.onStatus(true);
      };
      if (this.everConnected && this.hooks.onResync) {
        Promise.resolve(this.hooks.onResync()).then(resume);
      } else {
        resume();
      }
      this.everConnected = true;
    };
    socket.onmessage = (data) => {
      let event: ServerEvent;
      try {
        event = JSON.parse(data) as ServerEvent;
      } catch {
        return;
      }
      this.hooks.onEvent(event);
    };
    socket.onclose = () => {
      if (this.socket !== socket) return;
      this.socket = null;
      this.hooks.onStatus(false);
      if (!this.closed) {
        setTimeout(() => {
          if (!this.closed) this.open();
        }, this.reconnectDelayMs);
      }
    };
  }

  get connected(): boolean {
    return this.socket !== null;
  }

  send(event: ClientEvent): boolean {
    if (!this.socket) {
      this.dropped += 1;
      return false;
    }
    this.socket.send(JSON.stringify(event));
    return true;
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
    this.socket = null;
  }
}
