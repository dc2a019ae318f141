"""Sensor suite: actuator feedback, wheel encoders, indoor positioning,
IMU and the 2D LIDAR.

All readers are pure functions over immutable state snapshots. The LIDAR
mount is the geometric vehicle center; the IPS reports the rear-axle point
(the state position) in the spawn-origin world frame.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import ActuatorCommand, VehicleState, wrap_angle
from .params import SensorConfig
from . import world as world_mod

GRAVITY = 9.81

# in-memory non-return marker; serialized as max range with intensity 0
NO_RETURN = math.inf


@dataclass(frozen=True)
class SensorFrame:
    throttle_fb: float = 0.0
    steering_fb: float = 0.0
    encoder_ticks: tuple[int, int] = (0, 0)
    encoder_angles: tuple[float, float] = (0.0, 0.0)
    ips_position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    imu_quat: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 1.0)
    imu_euler: tuple[float, float, float] = (0.0, 0.0, 0.0)
    imu_ang_vel: tuple[float, float, float] = (0.0, 0.0, 0.0)
    imu_lin_acc: tuple[float, float, float] = (0.0, 0.0, 0.0)
    lidar_ranges: tuple[float, ...] = ()
    lidar_intensities: tuple[float, ...] = ()
    sim_time: float = 0.0


def feedback_read(last_cmd: ActuatorCommand) -> tuple[float, float]:
    """Echo of the last applied normalized command (virtual feedback sensors)."""
    return last_cmd.throttle, last_cmd.steering


def encoder_read(wheel_angle: float, ppr: int) -> tuple[int, float]:
    """Signed tick count (floor toward zero) plus the raw wheel angle."""
    ticks = int(wheel_angle / (2.0 * math.pi) * ppr)
    return ticks, wheel_angle


def ips_read(state: VehicleState, noise_std: float = 0.0,
             rng=None) -> tuple[float, float, float]:
    """Absolute position in the spawn-origin world frame, optional noise."""
    x, y = state.x, state.y
    if noise_std > 0.0 and rng is not None:
        x += rng.gauss(0.0, noise_std)
        y += rng.gauss(0.0, noise_std)
    return x, y, 0.0


def imu_read(state: VehicleState, prev_state: VehicleState, dt: float,
             include_gravity: bool = False):
    """Orientation, angular velocity and body-frame linear acceleration.

    Body frame is X-forward, Y-left, Z-up. On the planar map roll and pitch
    are zero; acceleration combines the tangential and centripetal terms.
    Gravity is excluded unless requested (reads zero at rest).
    """
    yaw = state.yaw
    half = yaw / 2.0
    quat = (0.0, 0.0, math.sin(half), math.cos(half))
    euler = (0.0, 0.0, yaw)
    yaw_rate = wrap_angle(yaw - prev_state.yaw) / dt
    ang_vel = (0.0, 0.0, yaw_rate)
    a_x = (state.speed - prev_state.speed) / dt
    a_y = state.speed * yaw_rate
    a_z = GRAVITY if include_gravity else 0.0
    return quat, euler, ang_vel, (a_x, a_y, a_z)


def lidar_scan(pose: tuple[float, float, float], boxes,
               cfg: SensorConfig) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """360 degree scan from the sensor pose against all box footprints.

    Ray k points k*(360/n) degrees CCW from the vehicle's forward axis.
    Hits outside [min_range, max_range] become the non-return marker with
    intensity zero.
    """
    raw = world_mod.scan((pose[0], pose[1]), pose[2], cfg.lidar_rays, boxes)
    ranges = []
    intensities = []
    lo, hi = cfg.lidar_min_range, cfg.lidar_max_range
    for r in raw.tolist():
        if lo <= r <= hi:
            ranges.append(r)
            intensities.append(cfg.lidar_intensity)
        else:
            ranges.append(NO_RETURN)
            intensities.append(0.0)
    return tuple(ranges), tuple(intensities)


def empty_scan(cfg: SensorConfig) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """All-miss scan used before the first scheduled LIDAR revolution."""
    return ((NO_RETURN,) * cfg.lidar_rays, (0.0,) * cfg.lidar_rays)
