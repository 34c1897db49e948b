/**
 * Editable mapping from the four on-screen arrows to drive characters, plus
 * the stop character sent on release.  Persisted so remaps survive reloads.
 */

export type Arrow = "up" | "down" | "left" | "right";

export const ARROWS: Arrow[] = ["up", "down", "left", "right"];

export interface UiKeymap {
  arrows: Record<Arrow, string>;
  stop: string;
}

export const DEFAULT_KEYMAP: UiKeymap = {
  arrows: { up: "F", down: "B", left: "L", right: "R" },
  stop: "S",
};

/** Anything with localStorage's getItem/setItem; injectable for tests. */
export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

const STORAGE_KEY = "cabletracer.keymap";

export function validateKeymap(keymap: UiKeymap): void {
  const chars = [...ARROWS.map((a) => keymap.arrows[a]), keymap.stop];
  for (const c of chars) {
    if (typeof c !== "string" || c.length !== 1) {
      throw new Error(`keymap entries must be single characters, got ${JSON.stringify(c)}`);
    }
  }
  if (new Set(chars).size !== chars.length) {
    throw new Error("keymap characters must be distinct");
  }
}

export function saveKeymap(store: KeyValueStore, keymap: UiKeymap): void {
  validateKeymap(keymap);
  store.setItem(STORAGE_KEY, JSON.stringify(keymap));
}

export function loadKeymap(store: KeyValueStore): UiKeymap {
  const raw = store.getItem(STORAGE_KEY);
  if (raw === null) return structuredClone(DEFAULT_KEYMAP);
  try {
    const parsed = JSON.parse(raw) as UiKeymap;
    validateKeymap(parsed);
    return parsed;
  } catch {
    return structuredClone(DEFAULT_KEYMAP);
  }
}
