"""Telemetry/control codec and the WebSocket serving loop."""
from __future__ import annotations

import asyncio
import json
import logging
from dataclasses import dataclass, field

import websockets

log = logging.getLogger("scaledsim_client")


class SchemaError(ValueError):
    """A frame that does not match the simulator's wire schema."""


@dataclass(frozen=True)
class TelemetryFrame:
    """One telemetry frame, field-for-field as the simulator sends it."""

    sim_time: float
    driving_mode: str            # "manual" | "autonomous"
    gear: str                    # "D" | "R"
    speed: float                 # m/s, magnitude
    throttle_fb: float
    steering_fb: float
    encoder_ticks: tuple[int, int]
    encoder_angles: tuple[float, float]
    ips_position: tuple[float, float, float]
    imu_quat: tuple[float, float, float, float]
    imu_euler: tuple[float, float, float]
    imu_ang_vel: tuple[float, float, float]
    imu_lin_acc: tuple[float, float, float]
    lidar_ranges: tuple[float, ...]
    lidar_intensities: tuple[float, ...]
    lights: dict

    @property
    def yaw(self) -> float:
        return self.imu_euler[2]


@dataclass(frozen=True)
class ControlCommand:
    """Normalized actuation plus optional light requests."""

    throttle: float = 0.0
    steering: float = 0.0
    headlights: int | None = None    # 0 off, 1 low, 2 high
    indicators: int | None = None    # 0 off, 1 left, 2 right, 3 hazard


def encode_control(cmd: ControlCommand) -> str:
    """Canonical control frame: compact JSON, fixed key order."""
    doc: dict = {"type": "control",
                 "throttle": float(cmd.throttle),
                 "steering": float(cmd.steering)}
    if cmd.headlights is not None:
        doc["headlights"] = int(cmd.headlights)
    if cmd.indicators is not None:
        doc["indicators"] = int(cmd.indicators)
    return json.dumps(doc, separators=(",", ":"), allow_nan=False)


def _triple(doc: dict, key: str, n: int) -> tuple:
    value = doc.get(key)
    if not isinstance(value, list) or len(value) != n:
        raise SchemaError(f"telemetry field '{key}' must be a list of {n}")
    return tuple(value)


def decode_telemetry(payload: str) -> TelemetryFrame:
    """Parse one telemetry text frame into a typed record."""
    try:
        doc = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"telemetry frame is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("type") != "telemetry":
        raise SchemaError("frame is not a telemetry object")
    try:
        ranges = doc["lidar_ranges"]
        intensities = doc["lidar_intensities"]
        if not isinstance(ranges, list) or not isinstance(intensities, list):
            raise SchemaError("lidar arrays must be lists")
        return TelemetryFrame(
            sim_time=float(doc["sim_time"]),
            driving_mode=str(doc["driving_mode"]),
            gear=str(doc["gear"]),
            speed=float(doc["speed"]),
            throttle_fb=float(doc["throttle_fb"]),
            steering_fb=float(doc["steering_fb"]),
            encoder_ticks=_triple(doc, "encoder_ticks", 2),
            encoder_angles=_triple(doc, "encoder_angles", 2),
            ips_position=_triple(doc, "ips_position", 3),
            imu_quat=_triple(doc, "imu_quat", 4),
            imu_euler=_triple(doc, "imu_euler", 3),
            imu_ang_vel=_triple(doc, "imu_ang_vel", 3),
            imu_lin_acc=_triple(doc, "imu_lin_acc", 3),
            lidar_ranges=tuple(ranges),
            lidar_intensities=tuple(intensities),
            lights=dict(doc.get("lights") or {}),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"telemetry frame is incomplete: {exc}") from exc


@dataclass
class ClientSession:
    """One listening endpoint serving one simulator connection at a time.

    The on_telemetry callback may return a ControlCommand (sent immediately)
    or None; send_control() can also be called at any point, e.g. from the
    callback for asynchronous policies.
    """

    host: str = "0.0.0.0"
    port: int = 4567
    on_telemetry: object = None
    telemetry_count: int = 0
    error_count: int = 0
    last_control: ControlCommand | None = None
    connected: bool = False
    _socket: object = field(default=None, repr=False)
    _server: object = field(default=None, repr=False)

    async def start(self) -> None:
        self._server = await websockets.serve(self._handle, self.host, self.port)

    async def stop(self) -> None:
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
            self._server = None

    async def _handle(self, websocket) -> None:
        if self.connected:
            await websocket.close(1013, "simulator already connected")
            return
        self.connected = True
        self._socket = websocket
        log.info("simulator connected from %s", websocket.remote_address)
        try:
            async for message in websocket:
                if not isinstance(message, str):
                    continue
                try:
                    frame = decode_telemetry(message)
                except SchemaError as exc:
                    self.error_count += 1
                    log.debug("skipped malformed telemetry: %s", exc)
                    continue
                self.telemetry_count += 1
                if self.on_telemetry is None:
                    continue
                reply = self.on_telemetry(frame)
                if reply is not None:
                    await self._send(reply)
        finally:
            self.connected = False
            self._socket = None
            log.info("simulator disconnected")

    async def _send(self, cmd: ControlCommand) -> None:
        if self._socket is None:
            return
        self.last_control = cmd
        await self._socket.send(encode_control(cmd))

    def send_control(self, cmd: ControlCommand) -> None:
        """Queue a control frame from synchronous code (e.g. the callback)."""
        loop = asyncio.get_event_loop()
        loop.create_task(self._send(cmd))


def serve(host: str = "0.0.0.0", port: int = 4567, on_telemetry=None,
          *, ready=None) -> None:
    """Blocking entry point: listen until interrupted.

    on_telemetry(frame) runs once per telemetry frame; a returned
    ControlCommand is sent back to the simulator. `ready`, if given, is
    called with the ClientSession once the port is bound.
    """
    async def main():
        session = ClientSession(host=host, port=port, on_telemetry=on_telemetry)
        await session.start()
        if ready is not None:
            ready(session)
        try:
            await asyncio.Future()
        finally:
            await session.stop()

    try:
        asyncio.run(main())
    except KeyboardInterrupt:
        pass
