/**
 * Console state: the decoded static world, the latest snapshot, the camera,
 * the active overlay, and the operator's current click tool.
 */

import { Camera } from "./transform.js";
import { FullState, MapMeta, RegionMeta, Snapshot, rleDecode } from "./protocol.js";
import { OverlayKind } from "./overlay.js";

export type ClickTool = "set_goal" | "spawn_obstacle" | "remove_obstacle";

export interface MapModel {
  width: number;
  height: number;
  resolution: number;
  originX: number;
  originY: number;
  occupied: Int32Array; // row-major, row 0 = bottom
  labels: Int32Array;
  seeds: [number, number, number | null][];
  edges: [number, number, number][];
  nRegions: number;
}

export function buildMapModel(map: MapMeta, regions: RegionMeta): MapModel {
  const size = map.width * map.height;
  return {
    width: map.width,
    height: map.height,
    resolution: map.resolution,
    originX: map.origin[0],
    originY: map.origin[1],
    occupied: rleDecode(map.occupied_rle, size),
    labels: rleDecode(regions.labels_rle, size),
    seeds: regions.seeds,
    edges: regions.edges,
    nRegions: regions.n_regions,
  };
}

export const OVERLAY_ORDER: OverlayKind[] = ["none", "score", "regions", "arrival", "velocity"];

export interface ViewState {
  camera: Camera;
  overlay: OverlayKind;
  tool: ClickTool;
  connected: boolean;
  toasts: string[];
}

export interface ConsoleModel {
  view: ViewState;
  map: MapModel | null;
  snapshot: Snapshot | null;
  rasters: Map<string, (number | null)[]>;
}

export function nextOverlay(current: OverlayKind): OverlayKind {
  const at = OVERLAY_ORDER.indexOf(current);
  return OVERLAY_ORDER[(at + 1) % OVERLAY_ORDER.length];
}

export function applyFullState(model: ConsoleModel, state: FullState): void {
  model.map = buildMapModel(state.map, state.regions);
  model.snapshot = state.snapshot;
  model.rasters.clear();
}

export function applySnapshot(model: ConsoleModel, snap: Snapshot): void {
  model.snapshot = snap;
}

export function pushToast(view: ViewState, text: string, keep = 4): void {
  view.toasts.push(text);
  while (view.toasts.length > keep) view.toasts.shift();
}
