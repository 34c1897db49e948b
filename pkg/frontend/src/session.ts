/**
 * Teleoperation session: the browser-side mirror of the server state machine.
 *
 * Connecting automatically walks the handshake (pair request, then controller
 * mode once pairing is acknowledged); the session only reports `controller`
 * after both acknowledgments arrived, mirroring the server exactly.  Drive
 * characters go out on press, the stop character on release.  Telemetry
 * updates `latestFrame` and the bounded position trace.
 */

import {
  commandFrame,
  isLegalClientFrame,
  modeFrame,
  pairFrame,
  parseServerLine,
  FrameError,
  ServerMessage,
  TelemetryFrame,
} from "./protocol.js";
import { Arrow, DEFAULT_KEYMAP, UiKeymap, validateKeymap } from "./keymap.js";

export type SessionStateName =
  | "disconnected"
  | "connecting"
  | "unpaired"
  | "paired"
  | "controller";

/** Browser-WebSocket shaped transport; injectable for tests and node. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export const TRACE_LIMIT = 10000;

export interface SessionOptions {
  keymap?: UiKeymap;
  socketFactory?: SocketFactory;
  onChange?: (session: TeleopSession) => void;
  onTelemetry?: (frame: TelemetryFrame, session: TeleopSession) => void;
}

export class TeleopSession {
  state: SessionStateName = "disconnected";
  lastError: string | null = null;
  latestFrame: TelemetryFrame | null = null;
  trace: Array<[number, number]> = [];
  acks: string[] = [];
  badFrames = 0;
  /** press-to-send latency of the most recent press, milliseconds */
  lastSendLatencyMs: number | null = null;

  keymap: UiKeymap;
  private socket: SocketLike | null = null;
  private awaiting: "pair" | "mode" | null = null;
  private readonly socketFactory: SocketFactory;
  private readonly onChange: (session: TeleopSession) => void;
  private readonly onTelemetry?: (frame: TelemetryFrame, session: TeleopSession) => void;

  constructor(options: SessionOptions = {}) {
    this.keymap = options.keymap ?? structuredClone(DEFAULT_KEYMAP);
    validateKeymap(this.keymap);
    this.socketFactory =
      options.socketFactory ??
      ((url) => new WebSocket(url) as unknown as SocketLike);
    this.onChange = options.onChange ?? (() => {});
    this.onTelemetry = options.onTelemetry;
  }

  connect(host: string, port: number, path = "/bt"): void {
    this.disconnect();
    this.lastError = null;
    this.state = "connecting";
    this.onChange(this);
    let socket: SocketLike;
    try {
      socket = this.socketFactory(`ws://${host}:${port}${path}`);
    } catch (err) {
      this.state = "disconnected";
      this.lastError = `connection failed: ${String(err)}`;
      this.onChange(this);
      return;
    }
    this.socket = socket;
    socket.onopen = () => {
      this.state = "unpaired";
      this.onChange(this);
      this.pair();
    };
    socket.onmessage = (ev) => this.handleMessage(ev.data);
    socket.onerror = () => {
      if (this.lastError === null) this.lastError = "connection failed";
      this.onChange(this);
    };
    socket.onclose = () => {
      this.socket = null;
      this.awaiting = null;
      this.state = "disconnected";
      this.onChange(this);
    };
  }

  /** Restart the handshake on an open socket (the retry affordance). */
  pair(): void {
    if (this.socket === null) return;
    this.awaiting = "pair";
    this.sendFrame(pairFrame());
  }

  disconnect(): void {
    if (this.socket !== null) {
      const socket = this.socket;
      this.socket = null;
      socket.onclose = null;
      try {
        socket.close();
      } catch {
        /* already closed */
      }
    }
    this.awaiting = null;
    if (this.state !== "disconnected") {
      this.state = "disconnected";
      this.onChange(this);
    }
  }

  get connected(): boolean {
    return this.socket !== null;
  }

  /** Send the mapped drive character; a no-op outside controller mode. */
  press(arrow: Arrow): boolean {
    if (this.state !== "controller" || this.socket === null) return false;
    const started = performance.now();
    this.sendFrame(commandFrame(this.keymap.arrows[arrow]));
    this.lastSendLatencyMs = performance.now() - started;
    return true;
  }

  /** Send the stop character; releasing a held arrow halts the robot. */
  release(): boolean {
    if (this.state !== "controller" || this.socket === null) return false;
    const started = performance.now();
    this.sendFrame(commandFrame(this.keymap.stop));
    this.lastSendLatencyMs = performance.now() - started;
    return true;
  }

  remap(keymap: UiKeymap): void {
    validateKeymap(keymap);
    this.keymap = keymap;
    this.onChange(this);
  }

  private sendFrame(frame: string): void {
    if (!isLegalClientFrame(frame)) {
      throw new Error(`refusing to send illegal frame ${JSON.stringify(frame)}`);
    }
    this.socket?.send(frame);
  }

  private handleMessage(data: unknown): void {
    const text = typeof data === "string" ? data : String(data);
    let message: ServerMessage;
    try {
      message = parseServerLine(text);
    } catch (err) {
      if (err instanceof FrameError) {
        this.badFrames += 1;
        console.warn("skipping malformed frame:", err.message);
        return; // one bad frame must not kill the session
      }
      throw err;
    }
    switch (message.kind) {
      case "paired":
        if (this.awaiting === "pair") {
          this.state = "paired";
          this.awaiting = "mode";
          this.onChange(this);
          this.sendFrame(modeFrame());
        }
        break;
      case "ok":
        if (this.awaiting === "mode" && this.state === "paired") {
          this.state = "controller";
          this.awaiting = null;
          this.onChange(this);
        }
        break;
      case "ack":
        this.acks.push(message.char);
        break;
      case "err":
        this.lastError = message.reason;
        this.awaiting = null;
        if (this.state !== "disconnected") this.state = "unpaired";
        this.onChange(this);
        break;
      case "telemetry": {
        const frame = message.frame;
        this.latestFrame = frame;
        this.trace.push([frame.x, frame.y]);
        if (this.trace.length > TRACE_LIMIT) {
          this.trace.splice(0, this.trace.length - TRACE_LIMIT);
        }
        this.onTelemetry?.(frame, this);
        this.onChange(this);
        break;
      }
    }
  }
}
