import { Ack, Command, MapPayload, PROTOCOL_VERSION, Snapshot } from "./types.js";

export interface NetEvents {
  onSnapshot(snap: Snapshot): void;
  onMap(map: MapPayload): void;
  onAck(ack: Ack): void;
  onStatus(connected: boolean, reconnecting: boolean): void;
}

const RECONNECT_MS = 1000;
const KEY_BUFFER_MS = 1000; // teleop keys older than this are dropped

interface BufferedKey {
  cmd: Command;
  stamp: number;
}

/** WebSocket client: reconnects forever, surfaces the latest snapshot,
 * and buffers teleop keys for up to a second while disconnected.
 * Goal/param commands are not buffered; the UI greys them out instead.
 */
export class SocketClient {
  private ws: WebSocket | null = null;
  private pendingKeys: BufferedKey[] = [];
  private stopped = false;
  private everConnected = false;

  constructor(private url: string, private events: NetEvents,
              private now: () => number = () => Date.now()) {}

  connect(): void {
    if (this.stopped) return;
    const ws = new WebSocket(this.url);
    this.ws = ws;

    ws.onopen = () => {
      this.everConnected = true;
      this.events.onStatus(true, false);
      const cutoff = this.now() - KEY_BUFFER_MS;
      for (const entry of this.pendingKeys) {
        if (entry.stamp >= cutoff) {
          ws.send(JSON.stringify(entry.cmd));
        }
      }
      this.pendingKeys = [];
    };

    ws.onmessage = (event: MessageEvent) => {
      let msg: unknown;
      try {
        msg = JSON.parse(String(event.data));
      } catch {
        return;
      }
      if (typeof msg !== "object" || msg === null) return;
      if ("ack" in msg) {
        this.events.onAck((msg as { ack: Ack }).ack);
        return;
      }
      const snap = msg as Snapshot;
      if (snap.version !== PROTOCOL_VERSION) return;
      if (snap.map) {
        this.events.onMap(snap.map);
      }
      this.events.onSnapshot(snap);
    };

    ws.onclose = () => {
      if (this.ws !== ws) return;
      this.ws = null;
      this.events.onStatus(false, !this.stopped && this.everConnected);
      if (!this.stopped) {
        setTimeout(() => this.connect(), RECONNECT_MS);
      }
    };

    ws.onerror = () => ws.close();
  }

  get connected(): boolean {
    return this.ws !== null && this.ws.readyState === WebSocket.OPEN;
  }

  send(cmd: Command): boolean {
    if (this.connected) {
      this.ws!.send(JSON.stringify(cmd));
      return true;
    }
    if (cmd.kind === "teleop_key") {
      const cutoff = this.now() - KEY_BUFFER_MS;
      this.pendingKeys = this.pendingKeys.filter((e) => e.stamp >= cutoff);
      this.pendingKeys.push({ cmd, stamp: this.now() });
    }
    return false;
  }

  close(): void {
    this.stopped = true;
    this.ws?.close();
  }
}
