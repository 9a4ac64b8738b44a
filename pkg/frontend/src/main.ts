/**
 * Console entry point: wires the websocket client, the canvas renderer, the
 * toolbar, and mouse interaction (click to command, drag to pan, wheel to
 * zoom).
 */

import { ConsoleClient } from "./client.js";
import { renderFrame } from "./render.js";
import { applyFullState, applySnapshot, ConsoleModel, nextOverlay, pushToast, ClickTool } from "./state.js";
import { fitCamera, screenToWorld, zoomAt, pan } from "./transform.js";

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusLine = document.getElementById("status")!;
const metricsLine = document.getElementById("metrics")!;

const model: ConsoleModel = {
  view: {
    camera: { centerX: 5, centerY: 3, scale: 40 },
    overlay: "score",
    tool: "set_goal",
    connected: false,
    toasts: [],
  },
  map: null,
  snapshot: null,
  rasters: new Map(),
};

const client = new ConsoleClient({
  onFullState: (state) => {
    applyFullState(model, state);
    const map = model.map!;
    model.view.camera = fitCamera(
      map.width * map.resolution,
      map.height * map.resolution,
      canvas.width,
      canvas.height,
    );
  },
  onSnapshot: (snap) => {
    applySnapshot(model, snap);
    refreshStatus();
  },
  onRaster: (raster) => {
    model.rasters.set(raster.id, raster.values);
  },
  onSettle: (result, label) => {
    if (result.outcome !== "ok") {
      pushToast(model.view, `${label}: ${result.outcome}${result.message ? " - " + result.message : ""}`);
    }
  },
  onStatus: (connected) => {
    model.view.connected = connected;
    refreshStatus();
  },
});

function refreshStatus(): void {
  const snap = model.snapshot;
  const state = model.view.connected ? (snap?.paused ? "paused" : "running") : "disconnected";
  statusLine.textContent =
    `${state} | tool: ${model.view.tool} | overlay: ${model.view.overlay}` +
    (snap ? ` | t=${(snap.sim_time ?? 0).toFixed(1)}s tick=${snap.tick}` : "");
  if (snap) {
    const m = snap.metrics;
    metricsLine.textContent =
      `traveled ${(m.traveled_distance as number | null)?.toFixed?.(1) ?? "-"} m, ` +
      `idle ${(m.idle_time as number | null)?.toFixed?.(1) ?? "-"} s, ` +
      `replans ${m.replan_count}, contacts ${m.noncritical_contacts}, ` +
      `goal ${m.goal_reached ? "reached" : "pending"}`;
  }
}

function connect(): void {
  const url = `ws://${location.hostname || "127.0.0.1"}:8750`;
  const socket = new WebSocket(url);
  socket.addEventListener("open", () => client.attach(socket));
  socket.addEventListener("message", (event) => client.handleRaw(String(event.data)));
  socket.addEventListener("close", () => {
    client.detach();
    setTimeout(connect, 1000);
  });
  socket.addEventListener("error", () => socket.close());
}

// --- toolbar ---

function button(id: string, handler: () => void): void {
  document.getElementById(id)!.addEventListener("click", handler);
}

button("tool-goal", () => (model.view.tool = "set_goal"));
button("tool-spawn", () => (model.view.tool = "spawn_obstacle"));
button("tool-remove", () => (model.view.tool = "remove_obstacle"));
button("overlay", () => {
  model.view.overlay = nextOverlay(model.view.overlay);
  if ((model.view.overlay === "arrival" || model.view.overlay === "velocity") && client.connected) {
    client.requestRaster(model.view.overlay);
  }
});
button("pause", () => client.command("pause"));
button("resume", () => client.command("resume"));
button("reset", () => client.command("reset"));

// --- mouse ---

let dragging = false;
let dragMoved = false;
let last: [number, number] = [0, 0];

canvas.addEventListener("mousedown", (e) => {
  dragging = true;
  dragMoved = false;
  last = [e.offsetX, e.offsetY];
});
canvas.addEventListener("mousemove", (e) => {
  if (!dragging) return;
  const dx = e.offsetX - last[0];
  const dy = e.offsetY - last[1];
  if (Math.abs(dx) + Math.abs(dy) > 2) dragMoved = true;
  model.view.camera = pan(model.view.camera, dx, dy);
  last = [e.offsetX, e.offsetY];
});
canvas.addEventListener("mouseup", (e) => {
  dragging = false;
  if (dragMoved) return;
  handleClick(e.offsetX, e.offsetY, model.view.tool);
});
canvas.addEventListener("wheel", (e) => {
  e.preventDefault();
  const factor = e.deltaY < 0 ? 1.15 : 1 / 1.15;
  model.view.camera = zoomAt(model.view.camera, canvas.width, canvas.height, { px: e.offsetX, py: e.offsetY }, factor);
});

function handleClick(px: number, py: number, tool: ClickTool): void {
  if (!client.connected || !model.map || !model.snapshot) return;
  const world = screenToWorld(model.view.camera, canvas.width, canvas.height, { px, py });
  if (tool === "remove_obstacle") {
    let best: { id: number; d: number } | null = null;
    for (const agent of model.snapshot.agents) {
      const d = Math.hypot(agent.x - world.x, agent.y - world.y);
      if (!best || d < best.d) best = { id: agent.id, d };
    }
    if (best && best.d < 1.0) client.command("remove_obstacle", { id: best.id });
    return;
  }
  client.command(tool, { x: world.x, y: world.y });
}

// --- main loop ---

function frame(): void {
  client.sweep();
  renderFrame(ctx, model);
  requestAnimationFrame(frame);
}

connect();
requestAnimationFrame(frame);
