"""Single-track vehicle dynamics: command mapping, actuator lag, braking,
kinematic bicycle integration and the slip-friction curve.

Sign conventions: world yaw is counter-clockwise positive (Z-up). A positive
normalized steering command means a right turn, so the physical front-wheel
angle is the negated command times the steering limit. The state position is
the rear-axle point; the chassis center sits half a wheelbase ahead of it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .params import FrictionCurve, VehicleParams

GRAVITY = 9.81  # m/s^2


class Gear(Enum):
    DRIVE = "D"
    REVERSE = "R"


@dataclass(frozen=True)
class VehicleState:
    x: float = 0.0                 # m, rear-axle position, world frame
    y: float = 0.0                 # m
    yaw: float = 0.0               # rad, CCW positive, wrapped to (-pi, pi]
    speed: float = 0.0             # m/s signed, + forward
    steer: float = 0.0             # rad, current physical front-wheel angle
    wheel_angle_left: float = 0.0  # rad, cumulative rear-wheel rotation
    wheel_angle_right: float = 0.0
    gear: Gear = Gear.DRIVE


def clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


@dataclass(frozen=True)
class ActuatorCommand:
    """Normalized throttle/steering pair, clamped to [-1, 1] at construction."""

    throttle: float = 0.0
    steering: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "throttle", clamp(float(self.throttle), -1.0, 1.0))
        object.__setattr__(self, "steering", clamp(float(self.steering), -1.0, 1.0))


def wrap_angle(angle: float) -> float:
    """Wrap to (-pi, pi]."""
    wrapped = math.fmod(angle + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


def normalized_to_physical(cmd: ActuatorCommand,
                           params: VehicleParams) -> tuple[float, float]:
    """Map a normalized command to (target speed m/s, target steer rad)."""
    target_speed = cmd.throttle * params.v_max
    target_steer = -cmd.steering * params.steer_limit
    return target_speed, target_steer


def actuator_lag_step(current: float, target: float, tau: float, dt: float) -> float:
    """Exact first-order response over one step; approaches target monotonically."""
    return target + (current - target) * math.exp(-dt / tau)


def auto_brake(cmd_throttle: float, state: VehicleState,
               params: VehicleParams, dt: float) -> VehicleState:
    """Automatic braking applied while the throttle command is zero.

    Speed magnitude shrinks linearly by brake_decel*dt and is floored at
    exactly 0. The caller retracts the steering target to 0 in the same tick.
    """
    if state.speed > 0.0:
        speed = max(0.0, state.speed - params.brake_decel * dt)
    elif state.speed < 0.0:
        speed = min(0.0, state.speed + params.brake_decel * dt)
    else:
        speed = 0.0
    return replace(state, speed=speed)


def kinematic_step(state: VehicleState, dt: float,
                   params: VehicleParams) -> VehicleState:
    """One explicit-Euler step of the rear-axle-referenced bicycle model.

    Rear wheels accumulate the path speed of their own track; at zero steer
    both sides turn identically.
    """
    v = state.speed
    yaw_rate = v * math.tan(state.steer) / params.wheelbase
    x = state.x + v * math.cos(state.yaw) * dt
    y = state.y + v * math.sin(state.yaw) * dt
    yaw = wrap_angle(state.yaw + yaw_rate * dt)
    half_track = params.chassis_width / 2.0
    v_left = v - yaw_rate * half_track
    v_right = v + yaw_rate * half_track
    return replace(
        state,
        x=x, y=y, yaw=yaw,
        wheel_angle_left=state.wheel_angle_left + v_left * dt / params.wheel_radius,
        wheel_angle_right=state.wheel_angle_right + v_right * dt / params.wheel_radius,
    )


def turning_radii(wheelbase: float, steer: float) -> tuple[float, float]:
    """Rear-axle and front-axle turning radii; straight driving gives inf."""
    if steer == 0.0:
        return math.inf, math.inf
    rear = wheelbase / abs(math.tan(steer))
    front = wheelbase / abs(math.sin(steer))
    return rear, front


def _smooth_segment(slip: float, x0: float, y0: float, x1: float, y1: float) -> float:
    # Hermite cubic with clamped (zero) end slopes: monotone between knots,
    # C1 across the extremum.
    t = (slip - x0) / (x1 - x0)
    return y0 + (y1 - y0) * t * t * (3.0 - 2.0 * t)


def tire_friction(slip: float, curve: FrictionCurve) -> float:
    """Friction coefficient at a slip ratio, scaled by the curve stiffness.

    Passes exactly through (0, 0), the extremum knot and the asymptote knot;
    constant beyond the asymptote.
    """
    if slip < 0.0:
        raise ValueError("slip must be non-negative")
    if slip <= curve.extremum_slip:
        mu = _smooth_segment(slip, 0.0, 0.0, curve.extremum_slip, curve.extremum_value)
    elif slip <= curve.asymptote_slip:
        mu = _smooth_segment(slip, curve.extremum_slip, curve.extremum_value,
                             curve.asymptote_slip, curve.asymptote_value)
    else:
        mu = curve.asymptote_value
    return mu * curve.stiffness


def traction_limit(curve: FrictionCurve) -> float:
    """Peak longitudinal acceleration the tires can transmit, m/s^2."""
    return tire_friction(curve.extremum_slip, curve) * GRAVITY


def drive_step(state: VehicleState, cmd: ActuatorCommand, params: VehicleParams,
               longitudinal: FrictionCurve, dt: float) -> VehicleState:
    """Advance speed, steer and gear by one tick from a normalized command.

    Zero throttle engages the automatic brake and retracts the steering
    target to zero; otherwise both actuators follow first-order lag toward
    their targets, with acceleration capped by the tire traction limit.
    """
    target_speed, target_steer = normalized_to_physical(cmd, params)
    if cmd.throttle == 0.0:
        target_steer = 0.0
        state = auto_brake(cmd.throttle, state, params, dt)
        speed = state.speed
        gear = state.gear
    else:
        speed = actuator_lag_step(state.speed, target_speed,
                                  params.drive_time_constant, dt)
        max_dv = traction_limit(longitudinal) * dt
        speed = state.speed + clamp(speed - state.speed, -max_dv, max_dv)
        speed = clamp(speed, -params.v_max, params.v_max)
        gear = Gear.REVERSE if cmd.throttle < 0.0 else Gear.DRIVE
    steer = actuator_lag_step(state.steer, target_steer,
                              params.steer_time_constant, dt)
    steer = clamp(steer, -params.steer_limit, params.steer_limit)
    return replace(state, speed=speed, steer=steer, gear=gear)


def chassis_center(state: VehicleState, params: VehicleParams) -> tuple[float, float]:
    """World position of the chassis center (half a wheelbase ahead of the rear axle)."""
    offset = params.wheelbase / 2.0
    return (state.x + offset * math.cos(state.yaw),
            state.y + offset * math.sin(state.yaw))


def front_axle(state: VehicleState, params: VehicleParams) -> tuple[float, float]:
    """World position of the front-axle midpoint."""
    return (state.x + params.wheelbase * math.cos(state.yaw),
            state.y + params.wheelbase * math.sin(state.yaw))
