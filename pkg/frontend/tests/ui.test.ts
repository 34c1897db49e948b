// @vitest-environment happy-dom
import { describe, expect, it } from "vitest";

import { buildPanel, mountPanel, renderSessionState, renderTelemetry } from "../src/ui.js";
import { TelemetryFrame } from "../src/protocol.js";
import { KeyValueStore } from "../src/keymap.js";
import { SocketLike } from "../src/session.js";

class MemoryStore implements KeyValueStore {
  private data = new Map<string, string>();
  getItem(key: string): string | null {
    return this.data.get(key) ?? null;
  }
  setItem(key: string, value: string): void {
    this.data.set(key, value);
  }
}

class FakeSocket implements SocketLike {
  sent: string[] = [];
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;
  send(data: string): void {
    this.sent.push(data);
  }
  close(): void {
    this.onclose?.();
  }
}

function frame(partial: Partial<TelemetryFrame>): TelemetryFrame {
  return { t: 0, x: 0, y: 0, heading: 0, freq: 0, led: false, fault: false, ...partial };
}

describe("telemetry rendering", () => {
  it("lights the LED and shows the frequency", () => {
    const elements = buildPanel(document, document.body);
    renderTelemetry(elements, frame({ freq: 44.5, led: true }));
    expect(elements.led.className).toBe("led led-on");
    expect(elements.frequency.textContent).toBe("44.50 Hz");
    expect(elements.faultBanner.classList.contains("hidden")).toBe(true);
  });

  it("shows the fault banner on a fault frame", () => {
    const elements = buildPanel(document, document.body);
    renderTelemetry(elements, frame({ fault: true }));
    expect(elements.faultBanner.classList.contains("hidden")).toBe(false);
  });

  it("zero frame: LED off, zero readout, no banner", () => {
    const elements = buildPanel(document, document.body);
    renderTelemetry(elements, frame({}));
    expect(elements.led.className).toBe("led led-off");
    expect(elements.frequency.textContent).toBe("0.00 Hz");
    expect(elements.faultBanner.classList.contains("hidden")).toBe(true);
  });

  it("banner follows the latest frame", () => {
    const elements = buildPanel(document, document.body);
    renderTelemetry(elements, frame({ fault: true }));
    renderTelemetry(elements, frame({ fault: false, freq: 45.1, led: true }));
    expect(elements.faultBanner.classList.contains("hidden")).toBe(true);
  });
});

describe("mounted panel", () => {
  function mounted() {
    const socket = new FakeSocket();
    const mount = document.createElement("div");
    document.body.append(mount);
    const { session, elements } = mountPanel(document, mount, {
      store: new MemoryStore(),
      socketFactory: () => socket,
    });
    return { socket, session, elements };
  }

  function handshake(socket: FakeSocket): void {
    socket.onopen?.();
    socket.onmessage?.({ data: "OK PAIRED\n" });
    socket.onmessage?.({ data: "OK\n" });
  }

  it("arrows stay disabled until controller mode", () => {
    const { socket, elements } = mounted();
    expect(elements.arrows.up.disabled).toBe(true);
    elements.connectButton.click();
    socket.onopen?.();
    expect(elements.arrows.up.disabled).toBe(true);
    socket.onmessage?.({ data: "OK PAIRED\n" });
    expect(elements.arrows.up.disabled).toBe(true);
    socket.onmessage?.({ data: "OK\n" });
    expect(elements.arrows.up.disabled).toBe(false);
    expect(elements.status.textContent).toBe("controller");
  });

  it("telemetry frames drive the readouts through the session", () => {
    const { socket, elements } = mounted();
    elements.connectButton.click();
    handshake(socket);
    socket.onmessage?.({
      data: "TLM 0.100000 0.010000 0.000000 0.000000 44.533761 1 0\n",
    });
    expect(elements.frequency.textContent).toBe("44.53 Hz");
    expect(elements.led.className).toBe("led led-on");
    socket.onmessage?.({
      data: "TLM 0.200000 0.020000 0.000000 0.000000 0.000000 0 1\n",
    });
    expect(elements.faultBanner.classList.contains("hidden")).toBe(false);
    expect(elements.led.className).toBe("led led-off");
  });

  it("keyboard arrows press and release", () => {
    const { socket, elements } = mounted();
    elements.connectButton.click();
    handshake(socket);
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "ArrowUp" }));
    expect(socket.sent.at(-1)).toBe("F\n");
    document.dispatchEvent(new KeyboardEvent("keyup", { key: "ArrowUp" }));
    expect(socket.sent.at(-1)).toBe("S\n");
  });

  it("holding a key does not autorepeat frames", () => {
    const { socket, elements } = mounted();
    elements.connectButton.click();
    handshake(socket);
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "ArrowLeft" }));
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "ArrowLeft" }));
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "ArrowLeft" }));
    const lefts = socket.sent.filter((f) => f === "L\n");
    expect(lefts).toHaveLength(1);
  });

  it("on-screen buttons press and release", () => {
    const { socket, elements } = mounted();
    elements.connectButton.click();
    handshake(socket);
    elements.arrows.right.dispatchEvent(new Event("pointerdown"));
    expect(socket.sent.at(-1)).toBe("R\n");
    elements.arrows.right.dispatchEvent(new Event("pointerup"));
    expect(socket.sent.at(-1)).toBe("S\n");
  });

  it("saving a remap changes what press sends", () => {
    const { socket, elements } = mounted();
    elements.connectButton.click();
    handshake(socket);
    elements.keymapInputs.up.value = "B";
    elements.keymapInputs.down.value = "F";
    elements.keymapSave.click();
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "ArrowUp" }));
    expect(socket.sent.at(-1)).toBe("B\n");
  });

  it("errors surface in the banner area", () => {
    const { socket, session, elements } = mounted();
    elements.connectButton.click();
    socket.onopen?.();
    socket.onmessage?.({ data: "ERR busy\n" });
    expect(session.lastError).toBe("busy");
    expect(elements.error.classList.contains("hidden")).toBe(false);
    expect(elements.error.textContent).toContain("busy");
  });
});
