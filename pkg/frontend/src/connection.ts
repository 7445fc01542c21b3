// Websocket client: snapshot stream in, sequenced commands out.

import { parseServerFrame, WireCommand, WireSnapshot } from "./types.js";

export interface ConnectionHandlers {
  onSnapshot(snap: WireSnapshot): void;
  onStatus(connected: boolean): void;
  onError(reason: string): void;
}

export class Connection {
  private sock: WebSocket | null = null;
  private seq = 0;
  private closed = false;
  private retryMs = 500;
  connected = false;

  constructor(private url: string, private handlers: ConnectionHandlers) {
    this.open();
  }

  private open(): void {
    const sock = new WebSocket(this.url);
    this.sock = sock;
    sock.onopen = () => {
      this.connected = true;
      this.retryMs = 500;
      this.handlers.onStatus(true);
    };
    sock.onmessage = (ev) => {
      const frame = parseServerFrame(String(ev.data));
      if (frame === null) return; // malformed frame: skip, keep last good state
      if (frame.type === "snapshot") this.handlers.onSnapshot(frame);
      else if (frame.type === "error") this.handlers.onError(frame.reason);
    };
    sock.onclose = () => {
      this.connected = false;
      this.handlers.onStatus(false);
      if (!this.closed) {
        setTimeout(() => this.open(), this.retryMs);
        this.retryMs = Math.min(this.retryMs * 2, 5000);
      }
    };
    sock.onerror = () => sock.close();
  }

  /** Send a command; returns its sequence number, or null while disconnected. */
  send(cmd: WireCommand): number | null {
    if (!this.connected || this.sock === null) return null;
    const seq = ++this.seq;
    this.sock.send(JSON.stringify({ ...cmd, seq }));
    return seq;
  }

  close(): void {
    this.closed = true;
    this.sock?.close();
  }
}
