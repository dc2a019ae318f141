// Wire schema of the simulator's UI WebSocket stream and scene endpoint.

export interface Lights {
  headlights: 0 | 1 | 2;
  indicators: 0 | 1 | 2 | 3;
  brake: boolean;
  reverse: boolean;
}

export interface VehiclePose {
  x: number;
  y: number;
  yaw: number;
  steer: number;
}

export interface Telemetry {
  type: "telemetry";
  sim_time: number;
  driving_mode: "manual" | "autonomous";
  gear: "D" | "R";
  speed: number;
  throttle_fb: number;
  steering_fb: number;
  encoder_ticks: [number, number];
  encoder_angles: [number, number];
  ips_position: [number, number, number];
  imu_quat: [number, number, number, number];
  imu_euler: [number, number, number];
  imu_ang_vel: [number, number, number];
  imu_lin_acc: [number, number, number];
  lidar_ranges: number[];
  lidar_intensities: number[];
  lights: Lights;
  // UI-stream extras
  vehicle: VehiclePose;
  boxes: [number, number, number][];
  fps: number;
  scene_light: boolean;
  bridge_status: "connected" | "disconnected";
  bridge_target: string;
}

export interface SceneTile {
  kind: string;
  grid: [number, number];
  rotation: 0 | 90 | 180 | 270;
  drivable: boolean;
}

export interface Scene {
  tile_size: number;
  origin: [number, number];
  spawn: [number, number, number];
  vehicle: { length: number; width: number; wheelbase: number };
  tiles: SceneTile[];
  boxes: { center: [number, number]; yaw: number; size: [number, number, number]; mass: number }[];
}

export interface TeleopFrame {
  type: "teleop";
  throttle: number;
  steering: number;
}

export interface CommandFrame {
  type: "command";
  name: string;
  args: Record<string, unknown>;
}

export type UiFrame = TeleopFrame | CommandFrame;
