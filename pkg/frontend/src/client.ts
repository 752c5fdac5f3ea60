// WebSocket client with exponential-backoff reconnect. Requests the map
// automatically whenever a connection opens.

import { encodeGetMap } from "./protocol.js";

const BACKOFF_BASE_MS = 1000;
const BACKOFF_CAP_MS = 30000;

export class NavClient {
  private ws: WebSocket | null = null;
  private delay = BACKOFF_BASE_MS;
  private closed = false;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private url: string,
    private onFrame: (raw: string) => void,
    private onStatus: (status: "connecting" | "open" | "closed") => void,
  ) {}

  connect(): void {
    if (this.closed) return;
    this.onStatus("connecting");
    const ws = new WebSocket(this.url);
    this.ws = ws;

    ws.onopen = () => {
      this.delay = BACKOFF_BASE_MS;
      this.onStatus("open");
      ws.send(encodeGetMap());
    };
    ws.onmessage = (event) => {
      if (typeof event.data === "string") this.onFrame(event.data);
    };
    ws.onclose = () => {
      this.onStatus("closed");
      this.scheduleReconnect();
    };
    ws.onerror = () => {
      ws.close();
    };
  }

  send(frame: string): boolean {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(frame);
      return true;
    }
    return false;
  }

  close(): void {
    this.closed = true;
    if (this.timer !== null) clearTimeout(this.timer);
    this.ws?.close();
  }

  private scheduleReconnect(): void {
    if (this.closed) return;
    this.timer = setTimeout(() => this.connect(), this.delay);
    this.delay = Math.min(this.delay * 2, BACKOFF_CAP_MS);
  }
}
