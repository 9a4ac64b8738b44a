/**
 * Fixed color scales, documented so overlay rendering is testable
 * pixel-for-pixel.
 *
 * - score (region traversability in [0, 1]): channelwise linear blend from
 *   DARK = (16, 16, 32) at 0 to BRIGHT = (250, 235, 90) at 1, each channel
 *   Math.round(dark + v * (bright - dark)), alpha 255.
 * - arrival/velocity (normalized to [0, 1]): blend NIGHT = (12, 20, 60) to
 *   CYAN = (80, 235, 255).
 * - regions: categorical golden-angle hue per id, 65% saturation, 55% light.
 * - null values (unreached / not applicable) are fully transparent.
 */

export type Rgba = [number, number, number, number];

const SCORE_DARK: Rgba = [16, 16, 32, 255];
const SCORE_BRIGHT: Rgba = [250, 235, 90, 255];
const FIELD_DARK: Rgba = [12, 20, 60, 255];
const FIELD_BRIGHT: Rgba = [80, 235, 255, 255];

export const TRANSPARENT: Rgba = [0, 0, 0, 0];

function blend(a: Rgba, b: Rgba, v: number): Rgba {
  const t = Math.min(1, Math.max(0, v));
  return [
    Math.round(a[0] + t * (b[0] - a[0])),
    Math.round(a[1] + t * (b[1] - a[1])),
    Math.round(a[2] + t * (b[2] - a[2])),
    255,
  ];
}

export function scoreColor(value: number | null): Rgba {
  if (value === null || !Number.isFinite(value)) return TRANSPARENT;
  return blend(SCORE_DARK, SCORE_BRIGHT, value);
}

export function fieldColor(value: number | null, max: number): Rgba {
  if (value === null || !Number.isFinite(value)) return TRANSPARENT;
  return blend(FIELD_DARK, FIELD_BRIGHT, max > 0 ? value / max : 0);
}

export function regionColor(id: number): Rgba {
  if (id < 0) return TRANSPARENT;
  const hue = (id * 137.50776405003785) % 360;
  return [...hslToRgb(hue, 0.65, 0.55), 255] as Rgba;
}

function hslToRgb(h: number, s: number, l: number): [number, number, number] {
  const c = (1 - Math.abs(2 * l - 1)) * s;
  const hp = h / 60;
  const x = c * (1 - Math.abs((hp % 2) - 1));
  let rgb: [number, number, number];
  if (hp < 1) rgb = [c, x, 0];
  else if (hp < 2) rgb = [x, c, 0];
  else if (hp < 3) rgb = [0, c, x];
  else if (hp < 4) rgb = [0, x, c];
  else if (hp < 5) rgb = [x, 0, c];
  else rgb = [c, 0, x];
  const m = l - c / 2;
  return [Math.round((rgb[0] + m) * 255), Math.round((rgb[1] + m) * 255), Math.round((rgb[2] + m) * 255)];
}
