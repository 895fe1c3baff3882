/** The teleop key table. The server serves the authoritative copy at
 * /keymap.json (the same file its own CLI teleop reads); the bundled
 * copy is a byte-identical fallback so the help pane renders while
 * disconnected.
 */

export interface Keymap {
  version: number;
  directions: Record<string, [number, number]>; // key -> (sign v, sign w)
  speeds: Record<string, [number, number]>; // key -> (linear, angular) factor
}

export async function fetchKeymap(): Promise<Keymap> {
  for (const url of ["/keymap.json", "./keymap.json"]) {
    try {
      const res = await fetch(url);
      if (res.ok) {
        return (await res.json()) as Keymap;
      }
    } catch {
      // fall through to the bundled copy
    }
  }
  throw new Error("keymap unavailable");
}

export function mappedKeys(map: Keymap): Set<string> {
  return new Set([...Object.keys(map.directions), ...Object.keys(map.speeds)]);
}

const DIRECTION_LABELS: Record<string, string> = {
  "i": "forward",
  ",": "back",
  "j": "spin left",
  "l": "spin right",
  "u": "arc fwd-left",
  "o": "arc fwd-right",
  "m": "arc back-right",
  ".": "arc back-left",
  "k": "stop",
  " ": "stop",
};

const SPEED_LABELS: Record<string, string> = {
  "q": "faster",
  "z": "slower",
  "w": "linear +",
  "x": "linear -",
  "e": "angular +",
  "c": "angular -",
};

/** Rows for the help pane, in table order. */
export function helpRows(map: Keymap): [string, string][] {
  const rows: [string, string][] = [];
  for (const key of Object.keys(map.directions)) {
    rows.push([key === " " ? "space" : key, DIRECTION_LABELS[key] ?? "drive"]);
  }
  for (const key of Object.keys(map.speeds)) {
    rows.push([key, SPEED_LABELS[key] ?? "speed"]);
  }
  return rows;
}
