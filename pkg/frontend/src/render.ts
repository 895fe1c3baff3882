import { decodeRle } from "./rle.js";
import { ViewState, worldToScreen } from "./transform.js";
import { MapPayload, Snapshot } from "./types.js";

// PGM classification colors: free 254, unknown 205, occupied 0
const FREE = [254, 254, 254];
const UNKNOWN = [205, 205, 205];
const OCCUPIED = [0, 0, 0];
const BACKGROUND = "#3a3f44";

const ROBOT_LEN = 0.16; // drawn size in meters, slightly over the footprint
const MIN_MARKER_PX = 6;

/** Offscreen bitmap of the occupancy grid, rebuilt only when
 * map_version changes. Pixel row 0 is the highest-y cell row so the
 * bitmap can be blitted without a per-frame flip.
 */
export class MapLayer {
  canvas: HTMLCanvasElement;
  payload: MapPayload | null = null;
  private version = -1;

  constructor(doc: Document = document) {
    this.canvas = doc.createElement("canvas");
  }

  update(map: MapPayload): void {
    if (map.version === this.version) return;
    const { width, height } = map;
    const cells = decodeRle(map.rle, width * height);
    this.canvas.width = width;
    this.canvas.height = height;
    const ctx = this.canvas.getContext("2d")!;
    const img = ctx.createImageData(width, height);
    for (let iy = 0; iy < height; iy++) {
      const pixelRow = height - 1 - iy; // flip: cell row 0 is the bottom
      for (let ix = 0; ix < width; ix++) {
        const cell = cells[iy * width + ix];
        const rgb = cell === 0 ? FREE : cell === 1 ? OCCUPIED : UNKNOWN;
        const at = 4 * (pixelRow * width + ix);
        img.data[at] = rgb[0];
        img.data[at + 1] = rgb[1];
        img.data[at + 2] = rgb[2];
        img.data[at + 3] = 255;
      }
    }
    ctx.putImageData(img, 0, 0);
    this.payload = map;
    this.version = map.version;
  }
}

function poly(ctx: CanvasRenderingContext2D, pts: [number, number][]): void {
  ctx.beginPath();
  ctx.moveTo(pts[0][0], pts[0][1]);
  for (let i = 1; i < pts.length; i++) {
    ctx.lineTo(pts[i][0], pts[i][1]);
  }
}

function drawOrientedTriangle(ctx: CanvasRenderingContext2D, view: ViewState,
                              x: number, y: number, theta: number,
                              lengthM: number, fill: string): void {
  const len = Math.max(lengthM * view.zoom, MIN_MARKER_PX) / view.zoom;
  const tip: [number, number] = [x + len * Math.cos(theta), y + len * Math.sin(theta)];
  const left: [number, number] = [
    x + 0.6 * len * Math.cos(theta + 2.5), y + 0.6 * len * Math.sin(theta + 2.5)];
  const right: [number, number] = [
    x + 0.6 * len * Math.cos(theta - 2.5), y + 0.6 * len * Math.sin(theta - 2.5)];
  poly(ctx, [tip, left, right].map(([wx, wy]) => worldToScreen(view, wx, wy)));
  ctx.closePath();
  ctx.fillStyle = fill;
  ctx.fill();
}

export interface Overlay {
  /** Rubber band for an in-progress goal drag, in screen pixels. */
  drag: { x1: number; y1: number; x2: number; y2: number } | null;
}

export function drawFrame(ctx: CanvasRenderingContext2D,
                          widthPx: number, heightPx: number,
                          snap: Snapshot | null, mapLayer: MapLayer,
                          view: ViewState, overlay: Overlay): void {
  ctx.fillStyle = BACKGROUND;
  ctx.fillRect(0, 0, widthPx, heightPx);

  const map = mapLayer.payload;
  if (view.layers.map && map) {
    const res = map.resolution;
    const [sx, sy] = worldToScreen(
      view, map.origin[0], map.origin[1] + map.height * res);
    ctx.imageSmoothingEnabled = false;
    ctx.drawImage(mapLayer.canvas, sx, sy,
                  view.zoom * res * map.width, view.zoom * res * map.height);
  }
  if (!snap) return;

  if (view.layers.particles && snap.particles.length) {
    ctx.fillStyle = "rgba(220, 60, 60, 0.55)";
    for (const [px, py] of snap.particles) {
      const [sx, sy] = worldToScreen(view, px, py);
      ctx.fillRect(sx - 1, sy - 1, 2, 2);
    }
  }

  if (view.layers.path && snap.global_path && snap.global_path.length > 1) {
    poly(ctx, snap.global_path.map(([wx, wy]) => worldToScreen(view, wx, wy)));
    ctx.strokeStyle = "#2e8b57";
    ctx.lineWidth = 2;
    ctx.stroke();
  }

  const [rx, ry, rtheta] = snap.estimated_pose;
  if (view.layers.scan && snap.scan) {
    const { angle_min, increment, range_max, ranges } = snap.scan;
    ctx.fillStyle = "rgba(80, 160, 255, 0.8)";
    for (let i = 0; i < ranges.length; i++) {
      const r = ranges[i];
      if (r >= range_max) continue; // no-return
      const bearing = rtheta + angle_min + i * increment;
      const [sx, sy] = worldToScreen(
        view, rx + r * Math.cos(bearing), ry + r * Math.sin(bearing));
      ctx.fillRect(sx - 1, sy - 1, 2, 2);
    }
  }

  if (snap.goal_status && !["succeeded", "aborted"].includes(snap.goal_status.state)) {
    const [gx, gy, gtheta] = snap.goal_status.target;
    drawOrientedTriangle(ctx, view, gx, gy, gtheta, ROBOT_LEN, "#c9a227");
  }

  if (view.layers.robot) {
    const color = snap.collision ? "#d9534f" : "#1f77b4";
    drawOrientedTriangle(ctx, view, rx, ry, rtheta, ROBOT_LEN, color);
  }

  if (overlay.drag) {
    const { x1, y1, x2, y2 } = overlay.drag;
    ctx.strokeStyle = "#c9a227";
    ctx.lineWidth = 2;
    poly(ctx, [[x1, y1], [x2, y2]]);
    ctx.stroke();
    ctx.beginPath();
    ctx.arc(x1, y1, 4, 0, 2 * Math.PI);
    ctx.stroke();
  }
}
