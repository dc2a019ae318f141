"""Fixed-timestep simulation core.

One Simulator instance owns all mutable state and is stepped from a single
thread. Inputs arrive through submit_* calls (latest command wins); outputs
are immutable SimSnapshot values. Wall-clock time never enters the physics,
so a given (config, map, seed, command stream) always produces the same
snapshot sequence.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from enum import IntEnum

from .dynamics import (ActuatorCommand, Gear, VehicleState, chassis_center,
                       drive_step, kinematic_step)
from .params import ParamSet
from .sensors import (SensorFrame, empty_scan, encoder_read, feedback_read,
                      imu_read, ips_read, lidar_scan)
from .world import TileMap, box_step, collide_vehicle

MODE_MANUAL = "manual"
MODE_AUTONOMOUS = "autonomous"


class Headlights(IntEnum):
    OFF = 0
    LOW = 1
    HIGH = 2


class Indicators(IntEnum):
    OFF = 0
    LEFT = 1
    RIGHT = 2
    HAZARD = 3


@dataclass(frozen=True)
class LightState:
    headlights: Headlights = Headlights.OFF
    indicators: Indicators = Indicators.OFF
    brake: bool = True       # auto: throttle command is zero
    reverse: bool = False    # auto: gear is Reverse


@dataclass(frozen=True)
class BoxState:
    x: float
    y: float
    yaw: float
    vx: float
    vy: float
    length: float
    width: float
    height: float


@dataclass(frozen=True)
class SimSnapshot:
    tick: int
    sim_time: float
    dt: float
    mode: str
    state: VehicleState
    sensors: SensorFrame
    lights: LightState
    boxes: tuple[BoxState, ...]
    applied_throttle: float
    applied_steering: float
    scene_light: bool
    fps_avg: float           # wall-clock tick throughput; never recorded


@dataclass
class ControlInput:
    """Decoded control frame content handed to the simulator."""

    throttle: float = 0.0
    steering: float = 0.0
    headlights: int | None = None
    indicators: int | None = None


class Simulator:
    """Deterministic stepper for one vehicle in one world."""

    def __init__(self, params: ParamSet, tilemap: TileMap, *,
                 dt: float = 0.01, seed: int = 0, stale_timeout: float = 0.5):
        self.params = params
        self.tilemap = tilemap
        self.dt = dt
        self.seed = seed
        self.stale_timeout = stale_timeout
        self.counters = {
            "teleop_ignored": 0,
            "control_ignored": 0,
            "protocol_errors": 0,
            "unknown_commands": 0,
        }
        self.hooks: dict[str, object] = {}   # app-level side effects (set_bridge, reset)
        self.lidar_scans_completed = 0
        self._fps_wall_mark = time.monotonic()
        self._fps_tick_mark = 0
        self._fps = 0.0
        self.reset()

    # ------------------------------------------------------------------ setup

    def reset(self) -> SimSnapshot:
        """Restore initial conditions: spawn pose, zeroed sensors, boxes re-seated."""
        spawn = self.tilemap.spawn
        self.state = VehicleState(x=spawn[0], y=spawn[1], yaw=spawn[2])
        self._prev_state = self.state
        self.boxes = [box.copy() for box in self.tilemap.boxes]
        self.last_collision_events = []
        self.tick = 0
        self.mode = MODE_MANUAL
        self.scene_light = True
        self._headlights = Headlights.OFF
        self._indicators = Indicators.OFF
        self._manual_cmd = ActuatorCommand(0.0, 0.0)
        self._auto_cmd = ActuatorCommand(0.0, 0.0)
        self._pending_teleop: ActuatorCommand | None = None
        self._pending_control: ControlInput | None = None
        self._last_control_time = 0.0
        self._rng = random.Random(self.seed)
        self._lidar_phase = 0.0
        self._lidar = lidar_scan(self._mount_pose(), self.boxes, self.params.sensors) \
            if self.boxes else empty_scan(self.params.sensors)
        self._telemetry_every = max(1, round(1.0 / (self.params.sensors.telemetry_rate
                                                    * self.dt)))
        self.telemetry_due = True
        self.snapshot = self._publish(ActuatorCommand(0.0, 0.0))
        hook = self.hooks.get("reset")
        if callable(hook):
            hook()
        return self.snapshot

    @property
    def sim_time(self) -> float:
        return self.tick * self.dt

    def _mount_pose(self) -> tuple[float, float, float]:
        cx, cy = chassis_center(self.state, self.params.vehicle)
        return cx, cy, self.state.yaw

    # ------------------------------------------------------------- input side

    def submit_teleop(self, throttle: float, steering: float) -> bool:
        """Teleoperation frame from the UI; live only in manual mode."""
        if self.mode != MODE_MANUAL:
            self.counters["teleop_ignored"] += 1
            return False
        self._pending_teleop = ActuatorCommand(throttle, steering)
        return True

    def submit_control(self, control: ControlInput) -> bool:
        """Control frame from the autonomy bridge; live only in autonomous mode."""
        if self.mode != MODE_AUTONOMOUS:
            self.counters["control_ignored"] += 1
            return False
        self._pending_control = control
        return True

    def toggle_mode(self) -> str:
        """Flip Manual/Autonomous; pending frames of the losing source are dropped."""
        if self.mode == MODE_MANUAL:
            self.mode = MODE_AUTONOMOUS
            self._pending_teleop = None
            self._last_control_time = self.sim_time
        else:
            self.mode = MODE_MANUAL
            self._pending_control = None
            self._manual_cmd = ActuatorCommand(0.0, 0.0)
        return self.mode

    def submit_command(self, name: str, args: dict | None = None) -> bool:
        """Named UI/menu command (reset, toggle_mode, light toggles, set_bridge)."""
        args = args or {}
        if name == "reset":
            self.reset()
            return True
        if name == "toggle_mode":
            self.toggle_mode()
            return True
        if name == "headlights":
            beam = args.get("beam", "low")
            if beam == "high":
                self._headlights = (Headlights.OFF
                                    if self._headlights is Headlights.HIGH
                                    else Headlights.HIGH)
            else:
                self._headlights = (Headlights.OFF
                                    if self._headlights is Headlights.LOW
                                    else Headlights.LOW)
            return True
        if name == "indicator_left":
            self._indicators = (Indicators.OFF
                                if self._indicators is Indicators.LEFT
                                else Indicators.LEFT)
            return True
        if name == "indicator_right":
            self._indicators = (Indicators.OFF
                                if self._indicators is Indicators.RIGHT
                                else Indicators.RIGHT)
            return True
        if name == "hazard":
            self._indicators = (Indicators.OFF
                                if self._indicators is Indicators.HAZARD
                                else Indicators.HAZARD)
            return True
        if name == "scene_light":
            self.scene_light = not self.scene_light
            return True
        if name == "set_bridge":
            hook = self.hooks.get("set_bridge")
            if callable(hook):
                hook(args.get("host"), args.get("port"))
                return True
            return False
        self.counters["unknown_commands"] += 1
        return False

    # -------------------------------------------------------------- main loop

    def _select_command(self) -> ActuatorCommand:
        if self.mode == MODE_MANUAL:
            if self._pending_teleop is not None:
                self._manual_cmd = self._pending_teleop
                self._pending_teleop = None
            return self._manual_cmd
        if self._pending_control is not None:
            ctl = self._pending_control
            self._pending_control = None
            self._auto_cmd = ActuatorCommand(ctl.throttle, ctl.steering)
            self._last_control_time = self.sim_time
            if ctl.headlights is not None:
                self._headlights = Headlights(ctl.headlights)
            if ctl.indicators is not None:
                self._indicators = Indicators(ctl.indicators)
        cmd = self._auto_cmd
        if (self.stale_timeout and
                self.sim_time - self._last_control_time > self.stale_timeout):
            cmd = ActuatorCommand(0.0, cmd.steering)  # safety stop on stale link
        return cmd

    def step(self) -> SimSnapshot:
        """Advance one tick: commands, dynamics, world, sensors, snapshot."""
        cmd = self._select_command()
        self.tick += 1

        state = drive_step(self.state, cmd, self.params.vehicle,
                           self.params.longitudinal, self.dt)
        state = kinematic_step(state, self.dt, self.params.vehicle)
        state, events = collide_vehicle(state, self.tilemap, self.boxes,
                                        self.params.vehicle, self.dt)
        box_step(self.boxes, self.dt)
        self.state = state
        self.last_collision_events = events

        self._lidar_phase += self.dt
        period = 1.0 / self.params.sensors.lidar_rate
        if self._lidar_phase >= period:
            self._lidar_phase -= period
            self._lidar = lidar_scan(self._mount_pose(), self.boxes,
                                     self.params.sensors)
            self.lidar_scans_completed += 1

        self.telemetry_due = (self.tick % self._telemetry_every) == 0
        snapshot = self._publish(cmd)
        self._prev_state = state
        self.snapshot = snapshot
        self._update_fps()
        return snapshot

    def _publish(self, cmd: ActuatorCommand) -> SimSnapshot:
        cfg = self.params.sensors
        state = self.state
        throttle_fb, steering_fb = feedback_read(cmd)
        ticks_l, angle_l = encoder_read(state.wheel_angle_left, cfg.encoder_ppr)
        ticks_r, angle_r = encoder_read(state.wheel_angle_right, cfg.encoder_ppr)
        quat, euler, ang_vel, lin_acc = imu_read(
            state, self._prev_state, self.dt, cfg.imu_include_gravity)
        frame = SensorFrame(
            throttle_fb=throttle_fb,
            steering_fb=steering_fb,
            encoder_ticks=(ticks_l, ticks_r),
            encoder_angles=(angle_l, angle_r),
            ips_position=ips_read(state, cfg.ips_noise_std, self._rng),
            imu_quat=quat,
            imu_euler=euler,
            imu_ang_vel=ang_vel,
            imu_lin_acc=lin_acc,
            lidar_ranges=self._lidar[0],
            lidar_intensities=self._lidar[1],
            sim_time=self.sim_time,
        )
        lights = LightState(
            headlights=self._headlights,
            indicators=self._indicators,
            brake=(cmd.throttle == 0.0),
            reverse=(state.gear is Gear.REVERSE),
        )
        boxes = tuple(BoxState(b.cx, b.cy, b.yaw, b.vx, b.vy,
                               b.length, b.width, b.height) for b in self.boxes)
        return SimSnapshot(
            tick=self.tick, sim_time=self.sim_time, dt=self.dt, mode=self.mode,
            state=state, sensors=frame, lights=lights, boxes=boxes,
            applied_throttle=cmd.throttle, applied_steering=cmd.steering,
            scene_light=self.scene_light, fps_avg=self._fps,
        )

    def _update_fps(self) -> None:
        now = time.monotonic()
        elapsed = now - self._fps_wall_mark
        if elapsed >= 1.0:
            self._fps = (self.tick - self._fps_tick_mark) / elapsed
            self._fps_wall_mark = now
            self._fps_tick_mark = self.tick


def format_sim_time(sim_time: float) -> str:
    """HH:MM:SS with seconds floored."""
    total = int(sim_time)
    return f"{total // 3600:02d}:{total % 3600 // 60:02d}:{total % 60:02d}"


def format_hud(snapshot: SimSnapshot) -> dict:
    """The heads-up display record: every status row the UI shows.

    Camera previews are not produced (no synthetic frames); the LIDAR ranges
    row stands in as the live exteroceptive readout.
    """
    sensors = snapshot.sensors
    return {
        "simulation_time": format_sim_time(snapshot.sim_time),
        "frame_rate": f"{snapshot.fps_avg:.1f} Hz",
        "driving_mode": "Autonomous" if snapshot.mode == MODE_AUTONOMOUS else "Manual",
        "gear": snapshot.state.gear.value,
        "speed": f"{abs(snapshot.state.speed):.3f} m/s",
        "throttle": f"{round(snapshot.applied_throttle * 100):d} %",
        "steering": f"{snapshot.state.steer:.4f} rad",
        "encoder_ticks": list(sensors.encoder_ticks),
        "ips_position": [round(v, 4) for v in sensors.ips_position],
        "imu_orientation": [round(v, 4) for v in sensors.imu_euler],
        "imu_angular_velocity": [round(v, 4) for v in sensors.imu_ang_vel],
        "imu_linear_acceleration": [round(v, 4) for v in sensors.imu_lin_acc],
        "lidar_ranges": sensors.lidar_ranges,
    }
