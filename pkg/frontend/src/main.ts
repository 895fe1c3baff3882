import { goalFromDrag } from "./gesture.js";
import { fetchKeymap, helpRows, Keymap, mappedKeys } from "./keymap.js";
import { SocketClient } from "./net.js";
import { drawFrame, MapLayer, Overlay } from "./render.js";
import { fitView, identityView, LayerFlags, panBy, zoomAround } from "./transform.js";
import { Ack, Snapshot } from "./types.js";

type LayerName = keyof LayerFlags;

const KEY_THROTTLE_MS = 100; // one held key repeat per snapshot period

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusLine = document.getElementById("status")!;
const goalLine = document.getElementById("goal")!;
const banner = document.getElementById("banner")!;
const toast = document.getElementById("toast")!;
const helpBody = document.getElementById("help-body")!;

const view = identityView();
const mapLayer = new MapLayer();
const overlay: Overlay = { drag: null };

let latest: Snapshot | null = null;
let keymap: Keymap | null = null;
let driveKeys = new Set<string>();
let fitted = false;
let toastTimer = 0;

function showToast(text: string): void {
  toast.textContent = text;
  toast.classList.add("visible");
  clearTimeout(toastTimer);
  toastTimer = window.setTimeout(() => toast.classList.remove("visible"), 2500);
}

function fmtPose(p: [number, number, number]): string {
  return `(${p[0].toFixed(2)}, ${p[1].toFixed(2)}, ${p[2].toFixed(2)})`;
}

const client = new SocketClient(`ws://${location.host}/ws`, {
  onSnapshot(snap) {
    latest = snap;
    statusLine.textContent =
      `t=${snap.sim_time.toFixed(1)}s seq=${snap.seq} ` +
      `pose=${fmtPose(snap.estimated_pose)}` +
      (snap.collision ? " COLLISION" : "");
    const goal = snap.goal_status;
    goalLine.textContent = goal
      ? `goal #${goal.id}: ${goal.state}` + (goal.reason ? ` (${goal.reason})` : "")
      : "no goal";
  },
  onMap(map) {
    mapLayer.update(map);
    if (!fitted) {
      fitView(view, map.origin[0], map.origin[1],
              map.width * map.resolution, map.height * map.resolution,
              canvas.width, canvas.height);
      fitted = true;
    }
  },
  onAck(ack: Ack) {
    if (!ack.accepted) {
      showToast(`${ack.kind ?? "command"} rejected: ${ack.reason ?? "?"}`);
    } else if (ack.kind === "set_goal") {
      showToast(`goal #${ack.goal_id} accepted`);
    }
  },
  onStatus(connected, reconnecting) {
    view.connection = { connected, reconnecting };
    banner.textContent = connected ? "" : reconnecting ? "reconnecting..." : "connecting...";
    banner.classList.toggle("visible", !connected);
  },
});

// -- keyboard teleop ------------------------------------------------

const lastSent = new Map<string, number>();

document.addEventListener("keydown", (event) => {
  if (event.ctrlKey || event.metaKey || event.altKey) return;
  if (event.key === "Escape") {
    client.send({ kind: "cancel_goal", payload: {} });
    return;
  }
  if (!keymap || !driveKeys.has(event.key)) return;
  event.preventDefault();
  const now = performance.now();
  if (event.repeat && now - (lastSent.get(event.key) ?? -Infinity) < KEY_THROTTLE_MS) {
    return;
  }
  lastSent.set(event.key, now);
  client.send({ kind: "teleop_key", payload: { key: event.key } });
});

// -- mouse: left drag sets a goal, shift-drag pans, wheel zooms ------

let panFrom: { x: number; y: number } | null = null;

canvas.addEventListener("mousedown", (event) => {
  if (event.button !== 0) return;
  if (event.shiftKey) {
    panFrom = { x: event.offsetX, y: event.offsetY };
  } else {
    overlay.drag = { x1: event.offsetX, y1: event.offsetY,
                     x2: event.offsetX, y2: event.offsetY };
  }
});

canvas.addEventListener("mousemove", (event) => {
  if (panFrom) {
    panBy(view, event.offsetX - panFrom.x, event.offsetY - panFrom.y);
    panFrom = { x: event.offsetX, y: event.offsetY };
  } else if (overlay.drag) {
    overlay.drag.x2 = event.offsetX;
    overlay.drag.y2 = event.offsetY;
  }
});

window.addEventListener("mouseup", (event) => {
  panFrom = null;
  if (!overlay.drag) return;
  const { x1, y1, x2, y2 } = overlay.drag;
  overlay.drag = null;
  if (!client.connected) {
    showToast("not connected");
    return;
  }
  client.send(goalFromDrag(view, x1, y1, x2, y2));
  event.preventDefault();
});

canvas.addEventListener("wheel", (event) => {
  event.preventDefault();
  zoomAround(view, event.offsetX, event.offsetY,
             event.deltaY < 0 ? 1.15 : 1 / 1.15);
}, { passive: false });

// -- layer toggles ---------------------------------------------------

for (const box of document.querySelectorAll<HTMLInputElement>("input[data-layer]")) {
  const name = box.dataset.layer as LayerName;
  box.checked = view.layers[name];
  box.addEventListener("change", () => {
    view.layers[name] = box.checked;
  });
}

// -- boot ------------------------------------------------------------

function resize(): void {
  canvas.width = canvas.clientWidth;
  canvas.height = canvas.clientHeight;
}
window.addEventListener("resize", resize);
resize();

fetchKeymap().then((map) => {
  keymap = map;
  driveKeys = mappedKeys(map);
  helpBody.innerHTML = helpRows(map)
    .map(([key, label]) => `<tr><td>${key}</td><td>${label}</td></tr>`)
    .join("");
}).catch(() => showToast("keymap unavailable, teleop disabled"));

client.connect();

function frame(): void {
  drawFrame(ctx, canvas.width, canvas.height, latest, mapLayer, view, overlay);
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
