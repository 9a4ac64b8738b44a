/**
 * Pure overlay rasterizers: map-sized RGBA buffers (row 0 = bottom map row;
 * the renderer flips when blitting). Keeping these free of canvas API makes
 * the pixel-probe tests exact.
 */

import { fieldColor, regionColor, scoreColor, Rgba } from "./colormap.js";

export type OverlayKind = "none" | "score" | "arrival" | "velocity" | "regions";

function paint(buffer: Uint8ClampedArray, index: number, color: Rgba): void {
  buffer[index * 4] = color[0];
  buffer[index * 4 + 1] = color[1];
  buffer[index * 4 + 2] = color[2];
  buffer[index * 4 + 3] = color[3];
}

/** Per-region score overlay: every cell of a region gets the region's color. */
export function scoreOverlay(
  labels: Int32Array,
  regionValues: (number | null)[],
  nCells: number,
): Uint8ClampedArray {
  const out = new Uint8ClampedArray(nCells * 4);
  for (let i = 0; i < nCells; i++) {
    const region = labels[i];
    paint(out, i, region >= 0 ? scoreColor(regionValues[region] ?? null) : [0, 0, 0, 0]);
  }
  return out;
}

/** Continuous field overlay (arrival / velocity), normalized by the finite max. */
export function fieldOverlay(values: (number | null)[], nCells: number): Uint8ClampedArray {
  let max = 0;
  for (const v of values) {
    if (v !== null && Number.isFinite(v) && v > max) max = v;
  }
  const out = new Uint8ClampedArray(nCells * 4);
  for (let i = 0; i < nCells; i++) {
    paint(out, i, fieldColor(values[i] ?? null, max));
  }
  return out;
}

/** Categorical region-id overlay. */
export function regionOverlay(labels: Int32Array, nCells: number): Uint8ClampedArray {
  const out = new Uint8ClampedArray(nCells * 4);
  for (let i = 0; i < nCells; i++) {
    paint(out, i, regionColor(labels[i]));
  }
  return out;
}

/** Occupancy underlay: occupied cells dark, free cells light. */
export function occupancyUnderlay(occupied: Int32Array, nCells: number): Uint8ClampedArray {
  const out = new Uint8ClampedArray(nCells * 4);
  const wall: Rgba = [40, 42, 48, 255];
  const free: Rgba = [225, 228, 232, 255];
  for (let i = 0; i < nCells; i++) {
    paint(out, i, occupied[i] ? wall : free);
  }
  return out;
}

/** Probe one cell of an overlay buffer (col/row in map cells). */
export function probePixel(
  buffer: Uint8ClampedArray,
  width: number,
  col: number,
  row: number,
): Rgba {
  const i = (row * width + col) * 4;
  return [buffer[i], buffer[i + 1], buffer[i + 2], buffer[i + 3]];
}
