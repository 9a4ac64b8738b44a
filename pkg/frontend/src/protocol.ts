/**
 * Wire protocol types and helpers for the interactive service.
 *
 * Every frame is `{"type": string, "seq": number, "payload": object}`; see
 * docs/service_protocol.json at the repository root. Floats may be null
 * where the server had a non-finite value.
 */

export interface Envelope<T = unknown> {
  type: string;
  seq: number;
  payload: T;
}

export interface MapMeta {
  width: number;
  height: number;
  resolution: number;
  origin: [number, number];
  occupied_rle: [number, number][];
  digest: string;
}

export interface RegionMeta {
  n_regions: number;
  seeds: [number, number, number | null][];
  labels_rle: [number, number][];
  edges: [number, number, number][];
}

export interface AgentState {
  id: number;
  x: number;
  y: number;
  heading: number;
}

export interface Snapshot {
  tick: number;
  sim_time: number | null;
  paused: boolean;
  seed: number;
  goal: [number, number];
  robot: { x: number; y: number; heading: number };
  agents: AgentState[];
  path: [number, number][];
  tr: (number | null)[] | null;
  perception: string;
  last_plan_tick: number | null;
  metrics: Record<string, number | boolean | null>;
  raster_ids: string[];
}

export interface FullState {
  map: MapMeta;
  regions: RegionMeta;
  config: Record<string, unknown>;
  snapshot: Snapshot;
}

export interface RasterPayload {
  of: number;
  id: string;
  width: number;
  height: number;
  values: (number | null)[];
}

export interface AckPayload {
  of: number;
  ok: boolean;
  result?: Record<string, unknown>;
}

export interface ErrorPayload {
  of: number | null;
  code: string;
  message: string;
}

export type CommandName =
  | "set_goal"
  | "spawn_obstacle"
  | "remove_obstacle"
  | "pause"
  | "resume"
  | "set_perception"
  | "set_seed"
  | "reset";

export function encodeCommand(
  seq: number,
  name: CommandName,
  args: Record<string, unknown> = {},
): string {
  return JSON.stringify({ type: "command", seq, payload: { name, ...args } });
}

export function encodeRasterRequest(seq: number, id: string): string {
  return JSON.stringify({ type: "get_raster", seq, payload: { id } });
}

export function decodeMessage(raw: string): Envelope {
  const parsed = JSON.parse(raw) as Envelope;
  if (typeof parsed.type !== "string" || typeof parsed.seq !== "number") {
    throw new Error("malformed envelope");
  }
  return parsed;
}

/** Expand `[[value, count], ...]` run-length pairs into a typed array. */
export function rleDecode(pairs: [number, number][], size: number): Int32Array {
  const out = new Int32Array(size);
  let at = 0;
  for (const [value, count] of pairs) {
    out.fill(value, at, at + count);
    at += count;
  }
  if (at !== size) {
    throw new Error(`run-length data covers ${at} cells, expected ${size}`);
  }
  return out;
}
