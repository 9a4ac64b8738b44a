/**
 * World <-> screen mapping. World y grows upward, screen y grows downward;
 * the camera stores the world point at the canvas center and the scale in
 * pixels per meter. The mapping is exact (pure arithmetic), so clicking a
 * pixel and converting back is stable under pan and zoom.
 */

export interface Camera {
  centerX: number; // world meters at the canvas center
  centerY: number;
  scale: number; // pixels per meter
}

export interface ScreenPoint {
  px: number;
  py: number;
}

export interface WorldPoint {
  x: number;
  y: number;
}

export function worldToScreen(cam: Camera, w: number, h: number, p: WorldPoint): ScreenPoint {
  return {
    px: (p.x - cam.centerX) * cam.scale + w / 2,
    py: h / 2 - (p.y - cam.centerY) * cam.scale,
  };
}

export function screenToWorld(cam: Camera, w: number, h: number, s: ScreenPoint): WorldPoint {
  return {
    x: (s.px - w / 2) / cam.scale + cam.centerX,
    y: (h / 2 - s.py) / cam.scale + cam.centerY,
  };
}

/** Zoom by `factor` keeping the world point under `anchor` fixed. */
export function zoomAt(cam: Camera, w: number, h: number, anchor: ScreenPoint, factor: number): Camera {
  const before = screenToWorld(cam, w, h, anchor);
  const scale = cam.scale * factor;
  const stretched: Camera = { ...cam, scale };
  const after = screenToWorld(stretched, w, h, anchor);
  return {
    scale,
    centerX: cam.centerX + (before.x - after.x),
    centerY: cam.centerY + (before.y - after.y),
  };
}

export function pan(cam: Camera, dxPixels: number, dyPixels: number): Camera {
  return {
    ...cam,
    centerX: cam.centerX - dxPixels / cam.scale,
    centerY: cam.centerY + dyPixels / cam.scale,
  };
}

/** Fit a map extent (meters) into a canvas with a small margin. */
export function fitCamera(extentX: number, extentY: number, w: number, h: number): Camera {
  const scale = 0.92 * Math.min(w / extentX, h / extentY);
  return { centerX: extentX / 2, centerY: extentY / 2, scale };
}
