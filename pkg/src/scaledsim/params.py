"""Vehicle, friction, sensor and suspension configuration.

Every physical constant of the simulated vehicle lives here. Values are SI
internally (m, kg, s, rad); the only non-SI unit kept is the drive limit in
RPM because that is how the actuator is specified. A YAML config file can
override any field; absent keys take the defaults below.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, fields

import yaml


class ConfigError(ValueError):
    """Raised when a config file cannot be parsed or violates an invariant."""


@dataclass(frozen=True)
class VehicleParams:
    mass: float = 1.75                # kg
    linear_drag: float = 0.1          # 1/s damping coefficient
    angular_drag: float = 0.05        # 1/s damping coefficient (stored, unused)
    chassis_length: float = 0.300     # m
    chassis_width: float = 0.175      # m
    chassis_height: float = 0.182     # m
    wheelbase: float = 0.14154        # m
    wheel_radius: float = 0.0325      # m
    wheel_mass: float = 0.034         # kg
    steer_limit: float = math.radians(30.0)   # rad
    drive_limit: float = 130.0        # RPM (actuators driven at 5 V; rated 160 RPM at 6 V)
    steer_time_constant: float = 0.10  # s
    drive_time_constant: float = 0.20  # s
    brake_decel: float = 4.0          # m/s^2, automatic brake strength (tunable)

    @property
    def v_max(self) -> float:
        """Top wheel-rim speed in m/s from the RPM drive limit."""
        return self.drive_limit / 60.0 * 2.0 * math.pi * self.wheel_radius

    def validate(self) -> None:
        if not self.mass > 0:
            raise ConfigError("mass must be positive")
        if not self.wheelbase > 0:
            raise ConfigError("wheelbase must be positive")
        if not self.wheelbase < self.chassis_length:
            raise ConfigError("wheelbase must be shorter than chassis_length")
        for name in ("wheel_radius", "wheel_mass", "chassis_width",
                     "chassis_height", "steer_limit", "drive_limit",
                     "steer_time_constant", "drive_time_constant", "brake_decel"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("linear_drag", "angular_drag"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")


@dataclass(frozen=True)
class FrictionCurve:
    """Slip-to-friction-coefficient curve defined by extremum and asymptote knots."""

    extremum_slip: float
    extremum_value: float
    asymptote_slip: float
    asymptote_value: float
    stiffness: float = 1.0

    def validate(self, which: str = "friction") -> None:
        if not 0 < self.extremum_slip < self.asymptote_slip:
            raise ConfigError(f"{which}: need 0 < extremum_slip < asymptote_slip")
        if not self.extremum_value >= self.asymptote_value > 0:
            raise ConfigError(f"{which}: need extremum_value >= asymptote_value > 0")
        if not self.stiffness > 0:
            raise ConfigError(f"{which}: stiffness must be positive")


LONGITUDINAL_FRICTION = FrictionCurve(0.4, 1.0, 0.8, 0.5, 1.0)
LATERAL_FRICTION = FrictionCurve(0.2, 1.0, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class SensorConfig:
    encoder_ppr: int = 16             # pulses per wheel revolution
    lidar_rate: float = 7.0           # Hz
    lidar_rays: int = 360             # measurements per scan
    lidar_min_range: float = 0.15     # m
    lidar_max_range: float = 12.0     # m
    lidar_intensity: float = 47.0     # constant intensity for valid hits
    telemetry_rate: float = 20.0      # Hz
    ips_noise_std: float = 0.0        # m, additive gaussian noise
    imu_include_gravity: bool = False  # add +9.81 on body Z when true

    def validate(self) -> None:
        if self.encoder_ppr <= 0:
            raise ConfigError("encoder_ppr must be positive")
        if self.lidar_rays <= 0:
            raise ConfigError("lidar_rays must be positive")
        for name in ("lidar_rate", "lidar_max_range", "telemetry_rate"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.lidar_min_range < 0:
            raise ConfigError("lidar_min_range must be non-negative")
        if self.lidar_min_range >= self.lidar_max_range:
            raise ConfigError("lidar_min_range must be below lidar_max_range")
        if self.ips_noise_std < 0:
            raise ConfigError("ips_noise_std must be non-negative")


@dataclass(frozen=True)
class SuspensionParams:
    """Wheel suspension constants. Stored for fidelity; no operation consumes them."""

    spring: float = 5040.0            # N/m
    damper: float = 20.0              # kg/s
    target_position: float = 0.5
    damping_rate: float = 0.025
    suspension_distance: float = 0.01  # m


@dataclass(frozen=True)
class ParamSet:
    """Everything load_params returns: the full configuration of one vehicle."""

    vehicle: VehicleParams = field(default_factory=VehicleParams)
    longitudinal: FrictionCurve = LONGITUDINAL_FRICTION
    lateral: FrictionCurve = LATERAL_FRICTION
    sensors: SensorConfig = field(default_factory=SensorConfig)
    suspension: SuspensionParams = field(default_factory=SuspensionParams)

    def validate(self) -> None:
        self.vehicle.validate()
        self.longitudinal.validate("friction.longitudinal")
        self.lateral.validate("friction.lateral")
        self.sensors.validate()


_SECTIONS = {
    "vehicle": (VehicleParams, "vehicle"),
    "friction.longitudinal": (FrictionCurve, "longitudinal"),
    "friction.lateral": (FrictionCurve, "lateral"),
    "sensors": (SensorConfig, "sensors"),
    "suspension": (SuspensionParams, "suspension"),
}


def _build(cls, base, overrides: dict, section: str):
    known = {f.name: f.type for f in fields(cls)}
    values = {}
    for key, val in overrides.items():
        if key not in known:
            raise ConfigError(f"unknown key '{section}.{key}'")
        if isinstance(val, bool):
            pass
        elif isinstance(val, (int, float)):
            val = int(val) if known[key] == "int" else float(val)
        else:
            raise ConfigError(f"'{section}.{key}' must be a number")
        values[key] = val
    if not values:
        return base
    merged = {f.name: getattr(base, f.name) for f in fields(cls)}
    merged.update(values)
    return cls(**merged)


def params_from_dict(doc: dict) -> ParamSet:
    """Build a validated ParamSet from a parsed config document."""
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a mapping")
    known_top = {"vehicle", "friction", "sensors", "suspension"}
    unknown = set(doc) - known_top
    if unknown:
        raise ConfigError(f"unknown section '{sorted(unknown)[0]}'")
    friction = doc.get("friction") or {}
    if not isinstance(friction, dict):
        raise ConfigError("friction must be a mapping")
    bad = set(friction) - {"longitudinal", "lateral"}
    if bad:
        raise ConfigError(f"unknown key 'friction.{sorted(bad)[0]}'")

    defaults = ParamSet()
    out = {}
    for section, (cls, attr) in _SECTIONS.items():
        if section.startswith("friction."):
            overrides = friction.get(section.split(".", 1)[1]) or {}
        else:
            overrides = doc.get(section.split(".", 1)[0]) or {}
        if not isinstance(overrides, dict):
            raise ConfigError(f"section '{section}' must be a mapping")
        out[attr] = _build(cls, getattr(defaults, attr), overrides, section)
    params = ParamSet(**out)
    params.validate()
    return params


def load_params(path) -> ParamSet:
    """Load a YAML config file. An empty file yields the full default set."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config file: {exc}") from exc
    return params_from_dict(doc)


def serialize_params(params: ParamSet) -> str:
    """Render a ParamSet back to YAML. load(serialize(p)) == p exactly."""
    doc = {
        "vehicle": {f.name: getattr(params.vehicle, f.name)
                    for f in fields(VehicleParams)},
        "friction": {
            "longitudinal": {f.name: getattr(params.longitudinal, f.name)
                             for f in fields(FrictionCurve)},
            "lateral": {f.name: getattr(params.lateral, f.name)
                        for f in fields(FrictionCurve)},
        },
        "sensors": {f.name: getattr(params.sensors, f.name)
                    for f in fields(SensorConfig)},
        "suspension": {f.name: getattr(params.suspension, f.name)
                       for f in fields(SuspensionParams)},
    }
    buf = io.StringIO()
    yaml.safe_dump(doc, buf, sort_keys=False)
    return buf.getvalue()


def parse_params(text: str) -> ParamSet:
    """Parse a YAML config document from a string."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    return params_from_dict(doc)
