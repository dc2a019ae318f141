// Top-down view state: pan in meters, zoom in pixels per meter (bounded),
// day/night theme. The view follows the vehicle until the user pans.

export const MIN_ZOOM = 40;    // px per meter (whole course visible)
export const MAX_ZOOM = 1200;  // px per meter (vehicle close-up)

export interface ViewState {
  zoom: number;          // px per meter
  centerX: number;       // m, world point at the canvas center
  centerY: number;
  follow: boolean;       // recenter on the vehicle each frame
  night: boolean;
}

export function initialView(): ViewState {
  return { zoom: 220, centerX: 0, centerY: 0, follow: true, night: false };
}

export function clampZoom(zoom: number): number {
  return Math.min(MAX_ZOOM, Math.max(MIN_ZOOM, zoom));
}

/** Wheel zoom: negative deltaY zooms in. Returns a new state. */
export function applyWheelZoom(view: ViewState, deltaY: number): ViewState {
  const factor = Math.pow(1.0015, -deltaY);
  return { ...view, zoom: clampZoom(view.zoom * factor) };
}

/** Drag pan by a pixel delta; panning detaches the vehicle-follow mode. */
export function applyPan(view: ViewState, dxPx: number, dyPx: number): ViewState {
  return {
    ...view,
    follow: false,
    centerX: view.centerX - dxPx / view.zoom,
    centerY: view.centerY + dyPx / view.zoom,
  };
}

export function worldToScreen(
  view: ViewState, width: number, height: number, x: number, y: number,
): [number, number] {
  // world Y up, screen Y down
  return [
    width / 2 + (x - view.centerX) * view.zoom,
    height / 2 - (y - view.centerY) * view.zoom,
  ];
}
