/**
 * Service connection: dispatches incoming messages, numbers outgoing
 * commands, and tracks their acknowledgements. The console computes nothing
 * itself; every displayed value originates from a server message.
 */

import { PendingCommands, AckResult } from "./acks.js";
import {
  CommandName,
  decodeMessage,
  encodeCommand,
  encodeRasterRequest,
  Envelope,
  FullState,
  RasterPayload,
  Snapshot,
  AckPayload,
  ErrorPayload,
} from "./protocol.js";

export interface SocketLike {
  readyState: number;
  send(data: string): void;
  close(): void;
}

export const SOCKET_OPEN = 1;

export interface ClientEvents {
  onFullState?: (state: FullState) => void;
  onSnapshot?: (snap: Snapshot) => void;
  onRaster?: (raster: RasterPayload) => void;
  onSettle?: (result: AckResult, label: string) => void;
  onStatus?: (connected: boolean) => void;
}

export class ConsoleClient {
  private socket: SocketLike | null = null;
  private seq = 0;
  readonly pending: PendingCommands;

  constructor(
    private events: ClientEvents,
    ackTimeoutMs = 3000,
    private clock: () => number = () => Date.now(),
  ) {
    this.pending = new PendingCommands(ackTimeoutMs, (result, label) =>
      this.events.onSettle?.(result, label),
    );
  }

  attach(socket: SocketLike): void {
    this.socket = socket;
    this.events.onStatus?.(true);
  }

  detach(): void {
    this.socket = null;
    this.events.onStatus?.(false);
  }

  get connected(): boolean {
    return this.socket !== null && this.socket.readyState === SOCKET_OPEN;
  }

  /** Send a command; returns its seq, or null when disconnected. */
  command(name: CommandName, args: Record<string, unknown> = {}): number | null {
    if (!this.connected || !this.socket) return null;
    const seq = ++this.seq;
    this.pending.sent(seq, name, this.clock());
    this.socket.send(encodeCommand(seq, name, args));
    return seq;
  }

  requestRaster(id: string): number | null {
    if (!this.connected || !this.socket) return null;
    const seq = ++this.seq;
    this.socket.send(encodeRasterRequest(seq, id));
    return seq;
  }

  /** Feed one raw frame from the socket. */
  handleRaw(raw: string): void {
    let message: Envelope;
    try {
      message = decodeMessage(raw);
    } catch {
      return; // garbage frame; ignore
    }
    switch (message.type) {
      case "full_state":
        this.events.onFullState?.(message.payload as FullState);
        break;
      case "snapshot":
        this.events.onSnapshot?.(message.payload as Snapshot);
        break;
      case "raster":
        this.events.onRaster?.(message.payload as RasterPayload);
        break;
      case "ack": {
        const payload = message.payload as AckPayload;
        this.pending.acked(payload.of, payload.ok, undefined, this.clock());
        break;
      }
      case "error": {
        const payload = message.payload as ErrorPayload;
        if (payload.of !== null) {
          this.pending.acked(payload.of, false, `${payload.code}: ${payload.message}`, this.clock());
        }
        break;
      }
    }
  }

  sweep(): void {
    this.pending.sweep(this.clock());
  }
}
