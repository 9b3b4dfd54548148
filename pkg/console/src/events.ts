import type { EventFrame } from "./types.js";

/** Structural subset of the DOM WebSocket, so a Node implementation can be injected in tests. */
export interface SocketLike {
  onopen: ((ev: unknown) => void) | null;
  onclose: ((ev: unknown) => void) | null;
  onerror: ((ev: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  close(): void;
}

export type SocketCtor = new (url: string) => SocketLike;

type TopicHandler = (msg: unknown) => void;
type StatusHandler = (connected: boolean) => void;

/**
 * Single connection to /api/events. Frames are {topic, msg}; handlers are
 * dispatched per topic. Reconnects with capped backoff so a restarted
 * gateway picks the console back up without a reload.
 */
export class EventSocket {
  private socket: SocketLike | null = null;
  private handlers = new Map<string, TopicHandler[]>();
  private statusHandlers: StatusHandler[] = [];
  private attempts = 0;
  private closed = false;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    readonly url: string,
    private readonly Socket: SocketCtor = WebSocket as unknown as SocketCtor,
  ) {}

  on(topic: string, handler: TopicHandler): void {
    const list = this.handlers.get(topic) ?? [];
    list.push(handler);
    this.handlers.set(topic, list);
  }

  onStatus(handler: StatusHandler): void {
    this.statusHandlers.push(handler);
  }

  connect(): void {
    this.closed = false;
    this.open();
  }

  close(): void {
    this.closed = true;
    if (this.retryTimer !== null) clearTimeout(this.retryTimer);
    this.socket?.close();
    this.socket = null;
  }

  private open(): void {
    const socket = new this.Socket(this.url);
    this.socket = socket;

    socket.onopen = () => {
      this.attempts = 0;
      this.setConnected(true);
    };

    socket.onmessage = (ev) => {
      let frame: EventFrame;
      try {
        frame = JSON.parse(String(ev.data));
      } catch {
        return;
      }
      for (const handler of this.handlers.get(frame.topic) ?? []) {
        handler(frame.msg);
      }
    };

    socket.onerror = () => {
      // onclose follows; reconnect happens there
    };

    socket.onclose = () => {
      this.setConnected(false);
      if (this.closed) return;
      const delay = Math.min(500 * 2 ** this.attempts, 10000);
      this.attempts += 1;
      this.retryTimer = setTimeout(() => this.open(), delay);
    };
  }

  private setConnected(connected: boolean): void {
    for (const handler of this.statusHandlers) handler(connected);
  }
}
