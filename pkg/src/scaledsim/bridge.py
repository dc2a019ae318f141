"""Wire schemas and network transports.

Two links, one schema family (JSON text frames with a "type" discriminator):

* outbound bridge: the simulator is the WebSocket *client*; the user's
  autonomy stack hosts the server. Telemetry goes out, control comes back.
* local UI endpoint: HTTP for static assets plus a WebSocket stream for the
  browser; teleoperation and menu commands come back.

The physics loop never blocks on either link: telemetry is queued with
drop-oldest semantics and inbound control is latest-wins.
"""
from __future__ import annotations

import asyncio
import json
import logging
import math
import time
from dataclasses import dataclass
from pathlib import Path

import aiohttp
from aiohttp import WSMsgType, web

from .simcore import ControlInput, SimSnapshot, Simulator
from .world import TileMap, drivable

log = logging.getLogger("scaledsim.bridge")

DEFAULT_BRIDGE_HOST = "127.0.0.1"
DEFAULT_BRIDGE_PORT = 4567
DEFAULT_UI_PORT = 8080
RECONNECT_BACKOFF = (1.0, 2.0, 4.0, 8.0)   # seconds, last value repeats


class ProtocolError(ValueError):
    """Malformed wire frame; the connection survives, the frame does not."""


@dataclass(frozen=True)
class BridgeConfig:
    host: str = DEFAULT_BRIDGE_HOST
    port: int = DEFAULT_BRIDGE_PORT
    reconnect_backoff: tuple[float, ...] = RECONNECT_BACKOFF


# ---------------------------------------------------------------------------
# codecs


def _clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


def _wire_ranges(ranges, max_range: float) -> list[float]:
    return [r if math.isfinite(r) else max_range for r in ranges]


def telemetry_to_dict(snapshot: SimSnapshot, max_range: float = 12.0) -> dict:
    """Bridge telemetry payload; key order is part of the documented schema."""
    sensors = snapshot.sensors
    return {
        "type": "telemetry",
        "sim_time": snapshot.sim_time,
        "driving_mode": snapshot.mode,
        "gear": snapshot.state.gear.value,
        "speed": abs(snapshot.state.speed),
        "throttle_fb": sensors.throttle_fb,
        "steering_fb": sensors.steering_fb,
        "encoder_ticks": list(sensors.encoder_ticks),
        "encoder_angles": list(sensors.encoder_angles),
        "ips_position": list(sensors.ips_position),
        "imu_quat": list(sensors.imu_quat),
        "imu_euler": list(sensors.imu_euler),
        "imu_ang_vel": list(sensors.imu_ang_vel),
        "imu_lin_acc": list(sensors.imu_lin_acc),
        "lidar_ranges": _wire_ranges(sensors.lidar_ranges, max_range),
        "lidar_intensities": list(sensors.lidar_intensities),
        "lights": {
            "headlights": int(snapshot.lights.headlights),
            "indicators": int(snapshot.lights.indicators),
            "brake": snapshot.lights.brake,
            "reverse": snapshot.lights.reverse,
        },
    }


def encode_telemetry(snapshot: SimSnapshot, max_range: float = 12.0) -> str:
    """One compact text frame; floats keep full round-trip precision."""
    return json.dumps(telemetry_to_dict(snapshot, max_range),
                      separators=(",", ":"), allow_nan=False)


def decode_telemetry(payload: str) -> dict:
    """Parse and structurally check a telemetry frame (used by tests/clients)."""
    try:
        doc = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"telemetry frame is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("type") != "telemetry":
        raise ProtocolError("frame is not a telemetry object")
    return doc


def decode_control(payload: str) -> ControlInput:
    """Parse a control frame; out-of-range numerics are clamped, not rejected."""
    try:
        doc = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"control frame is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ProtocolError("control frame must be an object")
    if "type" in doc and doc["type"] != "control":
        raise ProtocolError(f"unexpected frame type '{doc['type']}'")

    def number(key: str, default: float) -> float:
        value = doc.get(key, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ProtocolError(f"control field '{key}' must be a number")
        return float(value)

    throttle = number("throttle", 0.0)
    steering = number("steering", 0.0)
    clamped_throttle = _clamp(throttle, -1.0, 1.0)
    clamped_steering = _clamp(steering, -1.0, 1.0)
    if clamped_throttle != throttle or clamped_steering != steering:
        log.debug("control out of range, clamped: throttle=%s steering=%s",
                  throttle, steering)

    def light(key: str, hi: int) -> int | None:
        if key not in doc or doc[key] is None:
            return None
        value = doc[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ProtocolError(f"control field '{key}' must be an integer")
        return int(_clamp(int(value), 0, hi))

    return ControlInput(
        throttle=clamped_throttle,
        steering=clamped_steering,
        headlights=light("headlights", 2),
        indicators=light("indicators", 3),
    )


def decode_ui_frame(payload: str):
    """UI frame: ("teleop", throttle, steering) or ("command", name, args)."""
    try:
        doc = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"UI frame is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ProtocolError("UI frame must be an object")
    kind = doc.get("type")
    if kind == "teleop":
        throttle = doc.get("throttle", 0.0)
        steering = doc.get("steering", 0.0)
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                   for v in (throttle, steering)):
            raise ProtocolError("teleop throttle/steering must be numbers")
        return ("teleop", float(throttle), float(steering))
    if kind == "command":
        name = doc.get("name")
        if not isinstance(name, str):
            raise ProtocolError("command frame needs a string 'name'")
        args = doc.get("args") or {}
        if not isinstance(args, dict):
            raise ProtocolError("command 'args' must be an object")
        return ("command", name, args)
    raise ProtocolError(f"unknown UI frame type '{kind}'")


def scene_to_dict(tilemap: TileMap, vehicle=None) -> dict:
    """Static scene description the UI fetches once: tiles, spawn, geometry."""
    return {
        "tile_size": tilemap.tile_size,
        "origin": list(tilemap.origin),
        "spawn": list(tilemap.spawn),
        "vehicle": {
            "length": vehicle.chassis_length if vehicle else 0.300,
            "width": vehicle.chassis_width if vehicle else 0.175,
            "wheelbase": vehicle.wheelbase if vehicle else 0.14154,
        },
        "tiles": [
            {"kind": tile.kind.value, "grid": list(key), "rotation": tile.rotation,
             "drivable": drivable(tile.kind)}
            for key, tile in sorted(tilemap.tiles.items())
        ],
        "boxes": [
            {"center": [b.cx, b.cy], "yaw": b.yaw,
             "size": [b.length, b.width, b.height], "mass": b.mass}
            for b in tilemap.boxes
        ],
    }


def ui_telemetry_to_dict(snapshot: SimSnapshot, max_range: float,
                         bridge_status: str, bridge_target: str) -> dict:
    """UI stream payload: the bridge telemetry plus render/HUD-only extras."""
    doc = telemetry_to_dict(snapshot, max_range)
    doc["vehicle"] = {
        "x": snapshot.state.x,
        "y": snapshot.state.y,
        "yaw": snapshot.state.yaw,
        "steer": snapshot.state.steer,
    }
    doc["boxes"] = [[b.x, b.y, b.yaw] for b in snapshot.boxes]
    doc["fps"] = snapshot.fps_avg
    doc["scene_light"] = snapshot.scene_light
    doc["bridge_status"] = bridge_status
    doc["bridge_target"] = bridge_target
    return doc


def record_line(snapshot: SimSnapshot, max_range: float = 12.0) -> str:
    """One snapshot-log line. Deterministic: wall-clock fields are excluded."""
    state = snapshot.state
    doc = telemetry_to_dict(snapshot, max_range)
    del doc["type"]
    doc["tick"] = snapshot.tick
    doc["state"] = [state.x, state.y, state.yaw, state.speed, state.steer,
                    state.wheel_angle_left, state.wheel_angle_right]
    doc["boxes"] = [[b.x, b.y, b.yaw, b.vx, b.vy] for b in snapshot.boxes]
    doc["scene_light"] = snapshot.scene_light
    return json.dumps(doc, separators=(",", ":"), allow_nan=False)


# ---------------------------------------------------------------------------
# queues


class DropOldestQueue:
    """Bounded asyncio queue that discards the oldest item on overflow."""

    def __init__(self, maxsize: int = 64):
        self._queue: asyncio.Queue = asyncio.Queue(maxsize=maxsize)
        self.dropped = 0

    def put(self, item) -> None:
        while True:
            try:
                self._queue.put_nowait(item)
                return
            except asyncio.QueueFull:
                try:
                    self._queue.get_nowait()
                    self.dropped += 1
                except asyncio.QueueEmpty:
                    pass

    async def get(self):
        return await self._queue.get()


# ---------------------------------------------------------------------------
# outbound bridge client


class BridgeClient:
    """Persistent WebSocket client to the autonomy server, reconnecting forever."""

    def __init__(self, cfg: BridgeConfig, sim: Simulator,
                 outbox: DropOldestQueue):
        self.cfg = cfg
        self.sim = sim
        self.outbox = outbox
        self.target = (cfg.host, cfg.port)
        self.status = "disconnected"
        self._ws = None
        self._wake = asyncio.Event()
        self.frames_sent = 0
        self.frames_received = 0

    @property
    def target_text(self) -> str:
        return f"{self.target[0]}:{self.target[1]}"

    def retarget(self, host: str | None, port: int | None) -> None:
        """Point the bridge somewhere else; drops the live connection."""
        host = host or self.cfg.host
        port = int(port) if port else self.cfg.port
        self.target = (host, port)
        self._wake.set()
        if self._ws is not None and not self._ws.closed:
            asyncio.ensure_future(self._ws.close())

    def retarget_default(self) -> None:
        self.retarget(self.cfg.host, self.cfg.port)

    async def run(self) -> None:
        backoff_index = 0
        async with aiohttp.ClientSession() as session:
            while True:
                url = f"ws://{self.target[0]}:{self.target[1]}/"
                try:
                    async with session.ws_connect(url, heartbeat=None) as ws:
                        self._ws = ws
                        self.status = "connected"
                        backoff_index = 0
                        log.info("bridge connected to %s", url)
                        await self._pump(ws)
                except (aiohttp.ClientError, OSError, asyncio.TimeoutError):
                    pass
                finally:
                    self._ws = None
                    self.status = "disconnected"
                delay = self.cfg.reconnect_backoff[
                    min(backoff_index, len(self.cfg.reconnect_backoff) - 1)]
                backoff_index += 1
                self._wake.clear()
                try:
                    await asyncio.wait_for(self._wake.wait(), timeout=delay)
                    backoff_index = 0   # retarget requested, try at once
                except asyncio.TimeoutError:
                    pass

    async def _pump(self, ws) -> None:
        sender = asyncio.create_task(self._send_loop(ws))
        try:
            async for msg in ws:
                if msg.type == WSMsgType.TEXT:
                    self.frames_received += 1
                    try:
                        self.sim.submit_control(decode_control(msg.data))
                    except ProtocolError as exc:
                        self.sim.counters["protocol_errors"] += 1
                        log.debug("dropped control frame: %s", exc)
                elif msg.type == WSMsgType.ERROR:
                    break
        finally:
            sender.cancel()
            # asyncio.wait: reaps the sender without masking our own cancellation
            await asyncio.wait({sender})

    async def _send_loop(self, ws) -> None:
        while True:
            frame = await self.outbox.get()
            await ws.send_str(frame)
            self.frames_sent += 1


# ---------------------------------------------------------------------------
# UI server


_PLACEHOLDER = """<!doctype html>
<html><head><title>scaledsim</title></head>
<body style="font-family: sans-serif; background: #222; color: #ddd">
<h2>scaledsim</h2>
<p>The simulator is running. No web UI build was found; point
<code>--ui-assets</code> at a built frontend (frontend/dist) to serve it.
Telemetry streams at <code>/ws</code>, the scene at <code>/api/scene</code>.</p>
</body></html>
"""


class UIServer:
    """HTTP + WebSocket endpoint for the browser teleoperation client."""

    def __init__(self, sim: Simulator, tilemap: TileMap, *,
                 port: int = DEFAULT_UI_PORT, assets_dir: Path | None = None,
                 bridge: BridgeClient | None = None, max_range: float = 12.0):
        self.sim = sim
        self.tilemap = tilemap
        self.port = port
        self.assets_dir = assets_dir
        self.bridge = bridge
        self.max_range = max_range
        self._clients: set[DropOldestQueue] = set()
        self._sockets: set[web.WebSocketResponse] = set()
        self._runner: web.AppRunner | None = None
        self.ui_errors = 0

    def broadcast(self, snapshot: SimSnapshot) -> None:
        if not self._clients:
            return
        status = self.bridge.status if self.bridge else "disconnected"
        target = self.bridge.target_text if self.bridge else ""
        frame = json.dumps(
            ui_telemetry_to_dict(snapshot, self.max_range, status, target),
            separators=(",", ":"), allow_nan=False)
        for queue in self._clients:
            queue.put(frame)

    async def start(self) -> None:
        app = web.Application()
        app.router.add_get("/", self._index)
        app.router.add_get("/ws", self._ws_handler)
        app.router.add_get("/api/scene", self._scene)
        if self.assets_dir and self.assets_dir.is_dir():
            app.router.add_static("/", self.assets_dir)
        self._runner = web.AppRunner(app, shutdown_timeout=2.0)
        await self._runner.setup()
        site = web.TCPSite(self._runner, "0.0.0.0", self.port)
        await site.start()
        log.info("UI endpoint on http://127.0.0.1:%d", self.port)

    async def stop(self) -> None:
        for ws in list(self._sockets):
            await ws.close()
        if self._runner is not None:
            await self._runner.cleanup()

    async def _index(self, request: web.Request) -> web.Response:
        if self.assets_dir:
            index = self.assets_dir / "index.html"
            if index.is_file():
                return web.FileResponse(index)
        return web.Response(text=_PLACEHOLDER, content_type="text/html")

    async def _scene(self, request: web.Request) -> web.Response:
        return web.json_response(
            scene_to_dict(self.tilemap, self.sim.params.vehicle))

    async def _ws_handler(self, request: web.Request) -> web.WebSocketResponse:
        ws = web.WebSocketResponse()
        await ws.prepare(request)
        queue = DropOldestQueue(maxsize=8)
        self._clients.add(queue)
        self._sockets.add(ws)
        self.broadcast(self.sim.snapshot)   # greet with the latest state
        writer = asyncio.create_task(self._write_loop(ws, queue))
        try:
            async for msg in ws:
                if msg.type != WSMsgType.TEXT:
                    continue
                try:
                    frame = decode_ui_frame(msg.data)
                except ProtocolError as exc:
                    self.ui_errors += 1
                    log.debug("dropped UI frame: %s", exc)
                    continue
                if frame[0] == "teleop":
                    self.sim.submit_teleop(frame[1], frame[2])
                else:
                    self.sim.submit_command(frame[1], frame[2])
        finally:
            self._clients.discard(queue)
            self._sockets.discard(ws)
            writer.cancel()
            await asyncio.wait({writer})
        return ws

    async def _write_loop(self, ws: web.WebSocketResponse,
                          queue: DropOldestQueue) -> None:
        while True:
            frame = await queue.get()
            await ws.send_str(frame)


# ---------------------------------------------------------------------------
# simulation runner


async def run_loop(sim: Simulator, *, realtime: bool,
                   on_telemetry=None, stop: asyncio.Event | None = None,
                   max_ticks: int | None = None, yield_every: int = 64) -> None:
    """Drive the simulator inside the event loop.

    Realtime mode paces ticks against the monotonic clock (never feeding wall
    time into the physics); otherwise the loop free-runs and yields
    periodically so the transports stay live.
    """
    dt = sim.dt
    next_wall = time.monotonic()
    while not (stop is not None and stop.is_set()):
        snapshot = sim.step()
        if sim.telemetry_due and on_telemetry is not None:
            on_telemetry(snapshot)
        if max_ticks is not None and sim.tick >= max_ticks:
            break
        if realtime:
            next_wall += dt
            delay = next_wall - time.monotonic()
            if delay > 0:
                await asyncio.sleep(delay)
            else:
                if delay < -1.0:
                    next_wall = time.monotonic()  # fell far behind; re-anchor
                if sim.tick % yield_every == 0:
                    await asyncio.sleep(0)
        elif sim.tick % yield_every == 0:
            await asyncio.sleep(0)
