// Canvas renderer: top-down scene with lane markings, obstruction boxes,
// the vehicle with its light glyphs, and the latest LIDAR scan overlay.

import { Scene, SceneTile, Telemetry } from "./types.js";
import { ViewState } from "./view.js";

interface Palette {
  background: string;
  asphalt: string;
  lawn: string;
  marking: string;
  bay: string;
}

const DAY: Palette = {
  background: "#b8c5a8", asphalt: "#61656a", lawn: "#6fa05a",
  marking: "#f2f2f2", bay: "#d9d9d9",
};
const NIGHT: Palette = {
  background: "#1b2027", asphalt: "#2e3238", lawn: "#27402a",
  marking: "#9aa0a6", bay: "#6b6f75",
};

export function render(
  ctx: CanvasRenderingContext2D,
  scene: Scene | null,
  telemetry: Telemetry | null,
  view: ViewState,
  blinkOn: boolean,
): void {
  const { width, height } = ctx.canvas;
  const pal = view.night ? NIGHT : DAY;
  ctx.setTransform(1, 0, 0, 1, 0, 0);
  ctx.fillStyle = pal.background;
  ctx.fillRect(0, 0, width, height);
  if (!scene) return;

  // world transform: meters, Y up, origin at the view center
  ctx.setTransform(view.zoom, 0, 0, -view.zoom,
                   width / 2 - view.centerX * view.zoom,
                   height / 2 + view.centerY * view.zoom);
  ctx.lineCap = "butt";

  for (const tile of scene.tiles) drawTile(ctx, scene, tile, pal);
  drawSpawn(ctx, scene);
  if (telemetry) {
    telemetry.boxes.forEach(([bx, by, byaw], k) => {
      drawBox(ctx, bx, by, byaw, boxSize(scene, k));
    });
    drawLidar(ctx, scene, telemetry);
    drawVehicle(ctx, scene, telemetry, blinkOn);
  } else {
    scene.boxes.forEach((box, k) => {
      drawBox(ctx, box.center[0], box.center[1], box.yaw, boxSize(scene, k));
    });
  }
}

function boxSize(scene: Scene, index: number): [number, number] {
  const spec = scene.boxes[index];
  return spec ? [spec.size[0], spec.size[1]] : [0.1, 0.1];
}

function drawTile(ctx: CanvasRenderingContext2D, scene: Scene,
                  tile: SceneTile, pal: Palette): void {
  const s = scene.tile_size;
  const cx = scene.origin[0] + (tile.grid[0] + 0.5) * s;
  const cy = scene.origin[1] + (tile.grid[1] + 0.5) * s;
  ctx.save();
  ctx.translate(cx, cy);
  ctx.fillStyle = tile.kind === "lawn" ? pal.lawn : pal.asphalt;
  ctx.fillRect(-s / 2, -s / 2, s, s);
  ctx.rotate((tile.rotation * Math.PI) / 180);

  const line = s * 0.015;
  ctx.strokeStyle = pal.marking;
  ctx.lineWidth = line;
  const edge = s * 0.46;

  switch (tile.kind) {
    case "straight":
    case "roadside_parking":
      // openings N and S at rotation 0: boundaries left/right, dashed center
      solid(ctx, -edge, -s / 2, -edge, s / 2);
      solid(ctx, edge, -s / 2, edge, s / 2);
      dashed(ctx, s, 0, -s / 2, 0, s / 2);
      if (tile.kind === "roadside_parking") {
        ctx.fillStyle = pal.bay;
        ctx.fillRect(edge - s * 0.22, -s * 0.35, s * 0.2, s * 0.7);
        ctx.strokeRect(edge - s * 0.22, -s * 0.35, s * 0.2, s * 0.7);
      }
      break;
    case "curved": {
      // openings S and E: arcs centered on the south-east corner
      const px = s / 2, py = -s / 2;
      arc(ctx, px, py, s * 0.92, Math.PI / 2, Math.PI);
      arc(ctx, px, py, s * 0.08, Math.PI / 2, Math.PI);
      ctx.setLineDash([s * 0.08, s * 0.06]);
      arc(ctx, px, py, s * 0.5, Math.PI / 2, Math.PI);
      ctx.setLineDash([]);
      break;
    }
    case "dead_end":
      // single opening S: boundaries stop at a closing bar
      solid(ctx, -edge, -s / 2, -edge, s * 0.3);
      solid(ctx, edge, -s / 2, edge, s * 0.3);
      solid(ctx, -edge, s * 0.3, edge, s * 0.3);
      dashed(ctx, s, 0, -s / 2, 0, s * 0.1);
      break;
    case "t_intersection":
      // openings E, W, S: solid boundary along the closed north side
      solid(ctx, -s / 2, edge, s / 2, edge);
      dashed(ctx, s, -s / 2, 0, s / 2, 0);
      dashed(ctx, s, 0, -s / 2, 0, 0);
      crosswalk(ctx, s, 0, -s * 0.40);
      break;
    case "x_intersection":
      dashed(ctx, s, -s / 2, 0, s / 2, 0);
      dashed(ctx, s, 0, -s / 2, 0, s / 2);
      crosswalk(ctx, s, 0, -s * 0.40);
      crosswalk(ctx, s, 0, s * 0.40);
      break;
    case "parking_lot": {
      // opening S; stalls along the back half
      const top = s * 0.42;
      for (let k = 0; k <= 4; k++) {
        const x = -s * 0.4 + k * s * 0.2;
        solid(ctx, x, top - s * 0.3, x, top);
      }
      solid(ctx, -s * 0.4, top, s * 0.4, top);
      break;
    }
    case "lawn":
      break;
  }
  ctx.restore();
}

function solid(ctx: CanvasRenderingContext2D,
               x1: number, y1: number, x2: number, y2: number): void {
  ctx.beginPath();
  ctx.moveTo(x1, y1);
  ctx.lineTo(x2, y2);
  ctx.stroke();
}

function dashed(ctx: CanvasRenderingContext2D, s: number,
                x1: number, y1: number, x2: number, y2: number): void {
  ctx.setLineDash([s * 0.08, s * 0.06]);
  solid(ctx, x1, y1, x2, y2);
  ctx.setLineDash([]);
}

function arc(ctx: CanvasRenderingContext2D, cx: number, cy: number,
             r: number, a0: number, a1: number): void {
  ctx.beginPath();
  ctx.arc(cx, cy, r, a0, a1);
  ctx.stroke();
}

function crosswalk(ctx: CanvasRenderingContext2D, s: number,
                   cx: number, cy: number): void {
  ctx.save();
  ctx.fillStyle = ctx.strokeStyle;
  const stripe = s * 0.035;
  for (let k = -2; k <= 2; k++) {
    ctx.fillRect(cx + k * stripe * 2 - stripe / 2, cy - s * 0.04,
                 stripe, s * 0.08);
  }
  ctx.restore();
}

function drawSpawn(ctx: CanvasRenderingContext2D, scene: Scene): void {
  ctx.save();
  ctx.strokeStyle = "#ffffff55";
  ctx.lineWidth = 0.01;
  ctx.beginPath();
  ctx.arc(scene.spawn[0], scene.spawn[1], 0.05, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.restore();
}

function drawBox(ctx: CanvasRenderingContext2D, x: number, y: number,
                 yaw: number, size: [number, number]): void {
  const [l, w] = size;
  ctx.save();
  ctx.translate(x, y);
  ctx.rotate(yaw);
  ctx.fillStyle = "#c87f3a";
  ctx.strokeStyle = "#7a4a1d";
  ctx.lineWidth = 0.008;
  ctx.fillRect(-l / 2, -w / 2, l, w);
  ctx.strokeRect(-l / 2, -w / 2, l, w);
  ctx.restore();
}

function drawLidar(ctx: CanvasRenderingContext2D, scene: Scene,
                   t: Telemetry): void {
  const rays = t.lidar_ranges.length;
  if (!rays) return;
  const mountDist = scene.vehicle.wheelbase / 2;
  const mx = t.vehicle.x + mountDist * Math.cos(t.vehicle.yaw);
  const my = t.vehicle.y + mountDist * Math.sin(t.vehicle.yaw);
  const step = (2 * Math.PI) / rays;
  ctx.save();
  ctx.fillStyle = "#ff3b30";
  for (let k = 0; k < rays; k++) {
    if (t.lidar_intensities[k] <= 0) continue;
    const bearing = t.vehicle.yaw + k * step;
    const px = mx + t.lidar_ranges[k] * Math.cos(bearing);
    const py = my + t.lidar_ranges[k] * Math.sin(bearing);
    ctx.beginPath();
    ctx.arc(px, py, 0.008, 0, 2 * Math.PI);
    ctx.fill();
  }
  ctx.restore();
}

function drawVehicle(ctx: CanvasRenderingContext2D, scene: Scene,
                     t: Telemetry, blinkOn: boolean): void {
  const { length: L, width: W, wheelbase } = scene.vehicle;
  const lights = t.lights;
  ctx.save();
  // chassis center sits half a wheelbase ahead of the rear-axle state point
  ctx.translate(t.vehicle.x + (wheelbase / 2) * Math.cos(t.vehicle.yaw),
                t.vehicle.y + (wheelbase / 2) * Math.sin(t.vehicle.yaw));
  ctx.rotate(t.vehicle.yaw);

  // wheels: rear fixed, front turned by the physical steer angle
  ctx.fillStyle = "#14181c";
  const wl = L * 0.22, ww = W * 0.16;
  for (const side of [-1, 1]) {
    ctx.fillRect(-wheelbase / 2 - wl / 2, side * (W / 2 - ww / 2) - ww / 2, wl, ww);
    ctx.save();
    ctx.translate(wheelbase / 2, side * (W / 2 - ww / 2));
    ctx.rotate(t.vehicle.steer);
    ctx.fillRect(-wl / 2, -ww / 2, wl, ww);
    ctx.restore();
  }

  // body
  ctx.fillStyle = "#2f6fb3";
  ctx.strokeStyle = "#1b4671";
  ctx.lineWidth = 0.006;
  ctx.fillRect(-L / 2, -W / 2, L, W);
  ctx.strokeRect(-L / 2, -W / 2, L, W);

  const glyph = (x: number, y: number, color: string, r = W * 0.09) => {
    ctx.beginPath();
    ctx.fillStyle = color;
    ctx.arc(x, y, r, 0, 2 * Math.PI);
    ctx.fill();
  };

  // headlights (front), off / low / high
  if (lights.headlights > 0) {
    const color = lights.headlights === 2 ? "#ffffff" : "#ffe9a8";
    glyph(L / 2 - W * 0.08, W * 0.3, color);
    glyph(L / 2 - W * 0.08, -W * 0.3, color);
    if (lights.headlights === 2) {
      ctx.fillStyle = "#ffffff30";
      ctx.beginPath();
      ctx.moveTo(L / 2, W * 0.34);
      ctx.lineTo(L / 2 + L * 0.9, W * 0.62);
      ctx.lineTo(L / 2 + L * 0.9, -W * 0.62);
      ctx.lineTo(L / 2, -W * 0.34);
      ctx.closePath();
      ctx.fill();
    }
  }

  // taillights: dim with headlights, bright under braking
  if (lights.brake || lights.headlights > 0) {
    const color = lights.brake ? "#ff2d20" : "#97271f";
    glyph(-L / 2 + W * 0.08, W * 0.3, color);
    glyph(-L / 2 + W * 0.08, -W * 0.3, color);
  }

  // reverse indicators (rear, white)
  if (lights.reverse) {
    glyph(-L / 2 + W * 0.08, W * 0.12, "#f5f5f5", W * 0.07);
    glyph(-L / 2 + W * 0.08, -W * 0.12, "#f5f5f5", W * 0.07);
  }

  // turn indicators blink at 1 Hz; hazard lights all four corners
  if (blinkOn && lights.indicators > 0) {
    const amber = "#ffb340";
    const left = lights.indicators === 1 || lights.indicators === 3;
    const right = lights.indicators === 2 || lights.indicators === 3;
    if (left) {
      glyph(L / 2 - W * 0.08, W * 0.46, amber);
      glyph(-L / 2 + W * 0.08, W * 0.46, amber);
    }
    if (right) {
      glyph(L / 2 - W * 0.08, -W * 0.46, amber);
      glyph(-L / 2 + W * 0.08, -W * 0.46, amber);
    }
  }
  ctx.restore();
}
