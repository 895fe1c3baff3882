/** World <-> screen mapping and the rest of the view state.
 *
 * The transform is affine: pan in pixels, zoom in pixels per meter, and
 * a y flip (world +y is up, screen +y is down). The identity view is
 * pan (0, 0), zoom 1.
 */

export interface LayerFlags {
  map: boolean;
  particles: boolean;
  scan: boolean;
  path: boolean;
  robot: boolean;
}

export interface ConnectionState {
  connected: boolean;
  reconnecting: boolean;
}

export interface ViewState {
  panX: number;
  panY: number;
  zoom: number; // pixels per meter, always > 0
  layers: LayerFlags;
  connection: ConnectionState;
}

const MIN_ZOOM = 1e-6;

export function identityView(): ViewState {
  return {
    panX: 0,
    panY: 0,
    zoom: 1,
    layers: { map: true, particles: true, scan: true, path: true, robot: true },
    connection: { connected: false, reconnecting: false },
  };
}

export function worldToScreen(v: ViewState, wx: number, wy: number): [number, number] {
  return [v.panX + v.zoom * wx, v.panY - v.zoom * wy];
}

export function screenToWorld(v: ViewState, sx: number, sy: number): [number, number] {
  return [(sx - v.panX) / v.zoom, (v.panY - sy) / v.zoom];
}

/** Rescale, keeping the world point under the screen point (sx, sy) fixed. */
export function zoomAround(v: ViewState, sx: number, sy: number, factor: number): void {
  const [wx, wy] = screenToWorld(v, sx, sy);
  v.zoom = Math.max(MIN_ZOOM, v.zoom * factor);
  v.panX = sx - v.zoom * wx;
  v.panY = sy + v.zoom * wy;
}

export function panBy(v: ViewState, dxPx: number, dyPx: number): void {
  v.panX += dxPx;
  v.panY += dyPx;
}

/** Center a w x h meter map in a viewport with a 5% margin. */
export function fitView(v: ViewState, originX: number, originY: number,
                        widthM: number, heightM: number,
                        viewportW: number, viewportH: number): void {
  const zoom = 0.9 * Math.min(viewportW / widthM, viewportH / heightM);
  v.zoom = Math.max(MIN_ZOOM, zoom);
  const cx = originX + widthM / 2;
  const cy = originY + heightM / 2;
  v.panX = viewportW / 2 - v.zoom * cx;
  v.panY = viewportH / 2 + v.zoom * cy;
}
