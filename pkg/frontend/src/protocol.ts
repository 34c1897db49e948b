/**
 * Wire protocol of the teleoperation link, browser side.
 *
 * Every frame in either direction is one text line with a trailing newline,
 * identical to the raw TCP stream.  Client frames are the pair request, the
 * mode request and single drive characters; server frames are acknowledgments,
 * errors and telemetry.
 */

export const PAIR_LINE = "PAIR HC-05";
export const MODE_LINE = "MODE CONTROLLER";
export const REPLY_PAIRED = "OK PAIRED";
export const REPLY_OK = "OK";

export interface TelemetryFrame {
  t: number;
  x: number;
  y: number;
  heading: number;
  freq: number;
  led: boolean;
  fault: boolean;
}

export type ServerMessage =
  | { kind: "paired" }
  | { kind: "ok" }
  | { kind: "ack"; char: string }
  | { kind: "err"; reason: string }
  | { kind: "telemetry"; frame: TelemetryFrame };

/** A client frame is legal iff it is one of the three line forms, newline-terminated. */
export function isLegalClientFrame(data: string): boolean {
  if (!data.endsWith("\n")) return false;
  const line = data.slice(0, -1);
  if (line === PAIR_LINE || line === MODE_LINE) return true;
  return line.length === 1 && !line.includes("\n");
}

export function pairFrame(): string {
  return PAIR_LINE + "\n";
}

export function modeFrame(): string {
  return MODE_LINE + "\n";
}

export function commandFrame(char: string): string {
  if (char.length !== 1) {
    throw new Error(`drive frames carry exactly one character, got ${JSON.stringify(char)}`);
  }
  return char + "\n";
}

export class FrameError extends Error {}

export function parseTelemetry(line: string): TelemetryFrame {
  const parts = line.trim().split(" ");
  if (parts.length !== 8 || parts[0] !== "TLM") {
    throw new FrameError(`not a telemetry frame: ${JSON.stringify(line)}`);
  }
  const numbers = parts.slice(1, 6).map(Number);
  if (numbers.some((n) => Number.isNaN(n))) {
    throw new FrameError(`bad telemetry fields: ${JSON.stringify(line)}`);
  }
  const led = parts[6];
  const fault = parts[7];
  if ((led !== "0" && led !== "1") || (fault !== "0" && fault !== "1")) {
    throw new FrameError(`led/fault flags must be 0 or 1: ${JSON.stringify(line)}`);
  }
  const frame: TelemetryFrame = {
    t: numbers[0]!,
    x: numbers[1]!,
    y: numbers[2]!,
    heading: numbers[3]!,
    freq: numbers[4]!,
    led: led === "1",
    fault: fault === "1",
  };
  if (frame.led && !(frame.freq > 0)) {
    throw new FrameError(`led on with no frequency: ${JSON.stringify(line)}`);
  }
  return frame;
}

/** Classify one received line (without requiring the trailing newline). */
export function parseServerLine(raw: string): ServerMessage {
  const line = raw.replace(/\r?\n$/, "");
  if (line === REPLY_PAIRED) return { kind: "paired" };
  if (line === REPLY_OK) return { kind: "ok" };
  if (line.startsWith("ACK ") && line.length === 5) {
    return { kind: "ack", char: line.slice(4) };
  }
  if (line.startsWith("ERR ")) return { kind: "err", reason: line.slice(4) };
  if (line.startsWith("TLM ")) return { kind: "telemetry", frame: parseTelemetry(line) };
  throw new FrameError(`unrecognised server frame: ${JSON.stringify(line)}`);
}
