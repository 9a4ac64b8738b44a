/**
 * Immediate-mode canvas rendering: occupancy underlay, the active overlay,
 * region seeds, agents as discs, the robot with a heading tick, the path
 * polyline, the goal star, and a legend strip.
 */

import { fieldOverlay, occupancyUnderlay, OverlayKind, regionOverlay, scoreOverlay } from "./overlay.js";
import { scoreColor } from "./colormap.js";
import { ConsoleModel } from "./state.js";
import { Camera, worldToScreen } from "./transform.js";

function blitCellBuffer(
  ctx: CanvasRenderingContext2D,
  buffer: Uint8ClampedArray,
  model: ConsoleModel,
  cam: Camera,
): void {
  const map = model.map!;
  const image = new ImageData(new Uint8ClampedArray(buffer), map.width, map.height);
  const off = document.createElement("canvas");
  off.width = map.width;
  off.height = map.height;
  off.getContext("2d")!.putImageData(image, 0, 0);
  const w = ctx.canvas.width;
  const h = ctx.canvas.height;
  const topLeft = worldToScreen(cam, w, h, {
    x: map.originX,
    y: map.originY + map.height * map.resolution,
  });
  ctx.save();
  ctx.imageSmoothingEnabled = false;
  // map row 0 is the bottom: flip vertically while drawing
  ctx.translate(topLeft.px, topLeft.py);
  ctx.scale(map.resolution * cam.scale, map.resolution * cam.scale);
  ctx.scale(1, -1);
  ctx.translate(0, -map.height);
  ctx.drawImage(off, 0, 0);
  ctx.restore();
}

export function renderFrame(ctx: CanvasRenderingContext2D, model: ConsoleModel): void {
  const { view, map, snapshot } = model;
  const w = ctx.canvas.width;
  const h = ctx.canvas.height;
  ctx.fillStyle = "#14161a";
  ctx.fillRect(0, 0, w, h);
  if (!map) {
    ctx.fillStyle = "#9aa0aa";
    ctx.font = "16px sans-serif";
    ctx.fillText(view.connected ? "waiting for full state..." : "disconnected", 20, 30);
    return;
  }
  const cam = view.camera;
  const nCells = map.width * map.height;
  blitCellBuffer(ctx, occupancyUnderlay(map.occupied, nCells), model, cam);

  if (view.overlay === "score" && snapshot?.tr) {
    blitCellBuffer(ctx, scoreOverlay(map.labels, snapshot.tr, nCells), model, cam);
  } else if (view.overlay === "regions") {
    blitCellBuffer(ctx, regionOverlay(map.labels, nCells), model, cam);
  } else if (view.overlay === "arrival" || view.overlay === "velocity") {
    const raster = model.rasters.get(view.overlay);
    if (raster) {
      blitCellBuffer(ctx, fieldOverlay(raster, nCells), model, cam);
    } else {
      ctx.fillStyle = "#c8cdd6";
      ctx.font = "13px sans-serif";
      ctx.fillText(`loading ${view.overlay} raster...`, 20, 50);
    }
  }

  const toScreen = (x: number, y: number) => worldToScreen(cam, w, h, { x, y });

  // region seeds
  ctx.fillStyle = "rgba(255,255,255,0.7)";
  for (const [col, row] of map.seeds) {
    const p = toScreen(map.originX + (col + 0.5) * map.resolution, map.originY + (row + 0.5) * map.resolution);
    ctx.fillRect(p.px - 1.5, p.py - 1.5, 3, 3);
  }

  if (snapshot) {
    // path polyline (empty path draws nothing)
    if (snapshot.path.length > 1) {
      ctx.strokeStyle = "#ff5252";
      ctx.lineWidth = 2;
      ctx.beginPath();
      snapshot.path.forEach(([x, y], k) => {
        const p = toScreen(x, y);
        if (k === 0) ctx.moveTo(p.px, p.py);
        else ctx.lineTo(p.px, p.py);
      });
      ctx.stroke();
    }
    // goal
    const goal = toScreen(snapshot.goal[0], snapshot.goal[1]);
    ctx.strokeStyle = "#ffd54f";
    ctx.lineWidth = 2;
    ctx.beginPath();
    for (let k = 0; k < 10; k++) {
      const r = k % 2 ? 4 : 10;
      const a = (Math.PI / 5) * k - Math.PI / 2;
      const px = goal.px + r * Math.cos(a);
      const py = goal.py + r * Math.sin(a);
      if (k === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    }
    ctx.closePath();
    ctx.stroke();
    // agents
    for (const agent of snapshot.agents) {
      const p = toScreen(agent.x, agent.y);
      ctx.fillStyle = "#7e57c2";
      ctx.beginPath();
      ctx.arc(p.px, p.py, Math.max(3, 0.3 * cam.scale), 0, 2 * Math.PI);
      ctx.fill();
      ctx.strokeStyle = "#d1c4e9";
      ctx.beginPath();
      ctx.moveTo(p.px, p.py);
      ctx.lineTo(p.px + 0.45 * cam.scale * Math.cos(agent.heading), p.py - 0.45 * cam.scale * Math.sin(agent.heading));
      ctx.stroke();
    }
    // robot
    const r = toScreen(snapshot.robot.x, snapshot.robot.y);
    ctx.fillStyle = "#26a69a";
    ctx.beginPath();
    ctx.arc(r.px, r.py, Math.max(4, 0.25 * cam.scale), 0, 2 * Math.PI);
    ctx.fill();
    ctx.strokeStyle = "#e0f2f1";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(r.px, r.py);
    ctx.lineTo(r.px + 0.5 * cam.scale * Math.cos(snapshot.robot.heading), r.py - 0.5 * cam.scale * Math.sin(snapshot.robot.heading));
    ctx.stroke();
  }

  drawLegend(ctx, view.overlay);
  // toasts
  ctx.font = "13px sans-serif";
  view.toasts.forEach((text, k) => {
    ctx.fillStyle = "rgba(255, 193, 7, 0.95)";
    ctx.fillText(text, 16, h - 14 - 18 * (view.toasts.length - 1 - k));
  });
}

function drawLegend(ctx: CanvasRenderingContext2D, overlay: OverlayKind): void {
  if (overlay !== "score") return;
  const w = ctx.canvas.width;
  const x0 = w - 160;
  for (let k = 0; k <= 120; k++) {
    const [r, g, b] = scoreColor(k / 120);
    ctx.fillStyle = `rgb(${r},${g},${b})`;
    ctx.fillRect(x0 + k, 16, 1, 12);
  }
  ctx.fillStyle = "#e8eaf0";
  ctx.font = "11px sans-serif";
  ctx.fillText("0", x0 - 10, 26);
  ctx.fillText("1  score", x0 + 126, 26);
}
