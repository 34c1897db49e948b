/**
 * DOM panel: connection controls, arrow pad, live readouts and the trace plot.
 *
 * The panel renders synchronously from session callbacks, so the LED, the
 * frequency readout and the fault banner always reflect the latest telemetry
 * frame by the end of the same event-loop turn it arrived in.
 */

import { Arrow, ARROWS, KeyValueStore, UiKeymap, loadKeymap, saveKeymap } from "./keymap.js";
import { TelemetryFrame } from "./protocol.js";
import { TeleopSession } from "./session.js";

export interface PanelElements {
  root: HTMLElement;
  status: HTMLElement;
  error: HTMLElement;
  retry: HTMLButtonElement;
  hostInput: HTMLInputElement;
  portInput: HTMLInputElement;
  connectButton: HTMLButtonElement;
  arrows: Record<Arrow, HTMLButtonElement>;
  led: HTMLElement;
  frequency: HTMLElement;
  faultBanner: HTMLElement;
  trace: HTMLCanvasElement;
  keymapInputs: Record<Arrow | "stop", HTMLInputElement>;
  keymapSave: HTMLButtonElement;
}

const ARROW_GLYPHS: Record<Arrow, string> = {
  up: "↑",
  down: "↓",
  left: "←",
  right: "→",
};

const KEY_TO_ARROW: Record<string, Arrow> = {
  ArrowUp: "up",
  ArrowDown: "down",
  ArrowLeft: "left",
  ArrowRight: "right",
};

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function buildPanel(doc: Document, mount: HTMLElement): PanelElements {
  const root = el(doc, "div", "panel");

  const status = el(doc, "div", "status", "disconnected");
  const error = el(doc, "div", "error hidden");
  const retry = el(doc, "button", "retry hidden", "retry pairing");

  const hostInput = el(doc, "input", "host");
  hostInput.value = "127.0.0.1";
  const portInput = el(doc, "input", "port");
  portInput.value = "8080";
  const connectButton = el(doc, "button", "connect", "connect");

  const connectRow = el(doc, "div", "row");
  connectRow.append(hostInput, portInput, connectButton, status, retry);

  const faultBanner = el(doc, "div", "fault-banner hidden", "FAULT DETECTED");

  const led = el(doc, "span", "led led-off");
  const frequency = el(doc, "span", "frequency", "0.00 Hz");
  const readoutRow = el(doc, "div", "row readout");
  readoutRow.append(led, frequency);

  const arrows = {} as Record<Arrow, HTMLButtonElement>;
  const pad = el(doc, "div", "arrow-pad");
  for (const arrow of ARROWS) {
    const button = el(doc, "button", `arrow arrow-${arrow}`, ARROW_GLYPHS[arrow]);
    button.dataset.arrow = arrow;
    button.disabled = true;
    arrows[arrow] = button;
    pad.append(button);
  }

  const trace = el(doc, "canvas", "trace");
  trace.width = 400;
  trace.height = 300;

  const keymapInputs = {} as Record<Arrow | "stop", HTMLInputElement>;
  const keymapRow = el(doc, "div", "row keymap");
  for (const name of [...ARROWS, "stop"] as Array<Arrow | "stop">) {
    const label = el(doc, "label", undefined, `${name} `);
    const input = el(doc, "input", `key-${name}`);
    input.maxLength = 1;
    keymapInputs[name] = input;
    label.append(input);
    keymapRow.append(label);
  }
  const keymapSave = el(doc, "button", "keymap-save", "save keys");
  keymapRow.append(keymapSave);

  root.append(connectRow, error, faultBanner, readoutRow, pad, trace, keymapRow);
  mount.append(root);
  return {
    root, status, error, retry, hostInput, portInput, connectButton,
    arrows, led, frequency, faultBanner, trace, keymapInputs, keymapSave,
  };
}

export function renderTelemetry(elements: PanelElements, frame: TelemetryFrame): void {
  elements.led.className = frame.led ? "led led-on" : "led led-off";
  elements.frequency.textContent = `${frame.freq.toFixed(2)} Hz`;
  elements.faultBanner.classList.toggle("hidden", !frame.fault);
}

export function renderSessionState(elements: PanelElements, session: TeleopSession): void {
  elements.status.textContent = session.state;
  const driving = session.state === "controller";
  for (const arrow of ARROWS) {
    elements.arrows[arrow].disabled = !driving;
  }
  if (session.lastError) {
    elements.error.textContent = `error: ${session.lastError}`;
    elements.error.classList.remove("hidden");
  } else {
    elements.error.classList.add("hidden");
  }
  // the off/on ritual: offer a retry whenever we are connected but not driving
  const retryable = session.connected && !driving && session.state !== "connecting";
  elements.retry.classList.toggle("hidden", !retryable);
}

export function renderTrace(elements: PanelElements, session: TeleopSession): void {
  const context = elements.trace.getContext("2d");
  if (context === null || session.trace.length === 0) return;
  const { width, height } = elements.trace;
  context.clearRect(0, 0, width, height);
  const xs = session.trace.map((p) => p[0]);
  const ys = session.trace.map((p) => p[1]);
  const minX = Math.min(...xs, 0), maxX = Math.max(...xs, 1);
  const minY = Math.min(...ys, -0.5), maxY = Math.max(...ys, 0.5);
  const sx = (x: number) => ((x - minX) / (maxX - minX || 1)) * (width - 20) + 10;
  const sy = (y: number) => height - (((y - minY) / (maxY - minY || 1)) * (height - 20) + 10);
  context.beginPath();
  session.trace.forEach(([x, y], i) => {
    if (i === 0) context.moveTo(sx(x), sy(y));
    else context.lineTo(sx(x), sy(y));
  });
  context.strokeStyle = "#2a7";
  context.stroke();
}

export interface PanelOptions {
  store: KeyValueStore;
  socketFactory?: import("./session.js").SocketFactory;
}

/** Wire a panel to a fresh session; returns both for the caller to own. */
export function mountPanel(
  doc: Document,
  mount: HTMLElement,
  options: PanelOptions,
): { session: TeleopSession; elements: PanelElements } {
  const elements = buildPanel(doc, mount);
  const keymap = loadKeymap(options.store);
  const session = new TeleopSession({
    keymap,
    socketFactory: options.socketFactory,
    onChange: (s) => renderSessionState(elements, s),
    onTelemetry: (frame, s) => {
      renderTelemetry(elements, frame);
      renderTrace(elements, s);
    },
  });

  for (const name of [...ARROWS, "stop"] as Array<Arrow | "stop">) {
    const value = name === "stop" ? keymap.stop : keymap.arrows[name];
    elements.keymapInputs[name].value = value;
  }

  elements.connectButton.addEventListener("click", () => {
    session.connect(elements.hostInput.value, Number(elements.portInput.value));
  });
  elements.retry.addEventListener("click", () => session.pair());

  for (const arrow of ARROWS) {
    const button = elements.arrows[arrow];
    button.addEventListener("pointerdown", () => session.press(arrow));
    button.addEventListener("pointerup", () => session.release());
    button.addEventListener("pointerleave", () => {
      if (session.state === "controller") session.release();
    });
  }

  const heldKeys = new Set<string>();
  doc.addEventListener("keydown", (event) => {
    const arrow = KEY_TO_ARROW[(event as KeyboardEvent).key];
    if (arrow === undefined || heldKeys.has((event as KeyboardEvent).key)) return;
    heldKeys.add((event as KeyboardEvent).key);
    session.press(arrow);
  });
  doc.addEventListener("keyup", (event) => {
    const key = (event as KeyboardEvent).key;
    if (KEY_TO_ARROW[key] === undefined) return;
    heldKeys.delete(key);
    session.release();
  });

  elements.keymapSave.addEventListener("click", () => {
    const next: UiKeymap = {
      arrows: {
        up: elements.keymapInputs.up.value,
        down: elements.keymapInputs.down.value,
        left: elements.keymapInputs.left.value,
        right: elements.keymapInputs.right.value,
      },
      stop: elements.keymapInputs.stop.value,
    };
    try {
      session.remap(next);
      saveKeymap(options.store, next);
    } catch (err) {
      session.lastError = String(err instanceof Error ? err.message : err);
      renderSessionState(elements, session);
    }
  });

  renderSessionState(elements, session);
  return { session, elements };
}
