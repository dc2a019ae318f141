import { Telemetry } from "../src/types.js";

export function sampleTelemetry(overrides: Partial<Telemetry> = {}): Telemetry {
  return {
    type: "telemetry",
    sim_time: 12.3,
    driving_mode: "manual",
    gear: "D",
    speed: 0.25,
    throttle_fb: 0.5,
    steering_fb: -0.2,
    encoder_ticks: [10, 11],
    encoder_angles: [4.1, 4.5],
    ips_position: [1.0, 2.0, 0.0],
    imu_quat: [0, 0, 0, 1],
    imu_euler: [0, 0, 0.5],
    imu_ang_vel: [0, 0, 0.8],
    imu_lin_acc: [0.1, 0.2, 0],
    lidar_ranges: [2.0, 12.0, 3.5, 12.0],
    lidar_intensities: [47, 0, 47, 0],
    lights: { headlights: 0, indicators: 0, brake: false, reverse: false },
    vehicle: { x: 1.0, y: 2.0, yaw: 0.5, steer: -0.1 },
    boxes: [[1.5, 0.3, 0.0]],
    fps: 100.4,
    scene_light: true,
    bridge_status: "disconnected",
    bridge_target: "127.0.0.1:4567",
    ...overrides,
  };
}
