// Heads-up display: one row per vehicle/simulation status field, each bound
// to a live telemetry field. Camera previews are not part of this client;
// the LIDAR return count row and the scan overlay stand in for them.

import { Telemetry } from "./types.js";

export function formatSimTime(seconds: number): string {
  const total = Math.floor(seconds);
  const hh = Math.floor(total / 3600);
  const mm = Math.floor((total % 3600) / 60);
  const ss = total % 60;
  const pad = (n: number) => String(n).padStart(2, "0");
  return `${pad(hh)}:${pad(mm)}:${pad(ss)}`;
}

const vec = (v: number[], digits = 3) =>
  "[" + v.map((x) => x.toFixed(digits)).join(", ") + "]";

export interface HudRow {
  id: string;
  label: string;
  bind: (t: Telemetry) => string;
}

export const HUD_ROWS: HudRow[] = [
  { id: "simulation_time", label: "Simulation Time",
    bind: (t) => formatSimTime(t.sim_time) },
  { id: "frame_rate", label: "Frame Rate",
    bind: (t) => `${t.fps.toFixed(1)} Hz` },
  { id: "driving_mode", label: "Driving Mode",
    bind: (t) => t.driving_mode === "autonomous" ? "Autonomous" : "Manual" },
  { id: "gear", label: "Gear",
    bind: (t) => t.gear },
  { id: "speed", label: "Speed",
    bind: (t) => `${t.speed.toFixed(3)} m/s` },
  { id: "throttle", label: "Throttle",
    bind: (t) => `${Math.round(t.throttle_fb * 100)} %` },
  { id: "steering", label: "Steering",
    bind: (t) => `${t.vehicle.steer.toFixed(4)} rad` },
  { id: "encoder_ticks", label: "Encoder Ticks",
    bind: (t) => `[${t.encoder_ticks[0]}, ${t.encoder_ticks[1]}]` },
  { id: "ips_position", label: "Position (m)",
    bind: (t) => vec(t.ips_position) },
  { id: "imu_orientation", label: "Orientation (rad)",
    bind: (t) => vec(t.imu_euler) },
  { id: "imu_angular_velocity", label: "Angular Velocity (rad/s)",
    bind: (t) => vec(t.imu_ang_vel) },
  { id: "imu_linear_acceleration", label: "Linear Acceleration (m/s²)",
    bind: (t) => vec(t.imu_lin_acc) },
  { id: "lidar", label: "LIDAR Returns",
    bind: (t) => {
      const hits = t.lidar_intensities.filter((i) => i > 0).length;
      let nearest = Infinity;
      for (let k = 0; k < t.lidar_ranges.length; k++) {
        if (t.lidar_intensities[k] > 0 && t.lidar_ranges[k] < nearest) {
          nearest = t.lidar_ranges[k];
        }
      }
      const nearestText = hits ? `${nearest.toFixed(3)} m nearest` : "no returns";
      return `${hits}/${t.lidar_ranges.length} (${nearestText})`;
    } },
];

/** Create the HUD rows inside a container (idempotent). */
export function buildHud(container: HTMLElement): void {
  if (container.childElementCount > 0) return;
  for (const row of HUD_ROWS) {
    const div = document.createElement("div");
    div.className = "hud-row";
    div.dataset.row = row.id;
    const label = document.createElement("span");
    label.className = "hud-label";
    label.textContent = row.label;
    const value = document.createElement("span");
    value.className = "hud-value";
    value.textContent = "-";
    div.append(label, value);
    container.append(div);
  }
}

/** Bind the latest telemetry into the DOM. */
export function renderHud(container: HTMLElement, telemetry: Telemetry): void {
  buildHud(container);
  for (const row of HUD_ROWS) {
    const value = container.querySelector<HTMLElement>(
      `[data-row="${row.id}"] .hud-value`);
    if (value) value.textContent = row.bind(telemetry);
  }
}
