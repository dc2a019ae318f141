import asyncio
import json
import math
import random
import socket

import pytest
from aiohttp import WSMsgType, web
from hypothesis import given, settings
from hypothesis import strategies as st

from scaledsim.bridge import (BridgeClient, BridgeConfig, DropOldestQueue,
                              ProtocolError, UIServer, decode_control,
                              decode_telemetry, decode_ui_frame,
                              encode_telemetry, record_line, run_loop,
                              scene_to_dict, telemetry_to_dict,
                              ui_telemetry_to_dict)
from scaledsim.params import ParamSet
from scaledsim.simcore import Simulator


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture
def sim(minimap):
    return Simulator(ParamSet(), minimap)


class TestTelemetryCodec:
    def test_spawn_snapshot_payload(self, sim):
        doc = decode_telemetry(encode_telemetry(sim.snapshot))
        assert doc["type"] == "telemetry"
        assert doc["ips_position"] == [0.0, 0.0, 0.0]
        assert doc["driving_mode"] == "manual"
        assert len(doc["lidar_ranges"]) == 360
        assert len(doc["lidar_intensities"]) == 360
        assert doc["gear"] == "D"
        assert doc["lights"]["brake"] is True

    def test_round_trip_exact(self, sim):
        rng = random.Random(17)
        for _ in range(30):
            if rng.random() < 0.3:
                sim.submit_teleop(rng.uniform(-1, 1), rng.uniform(-1, 1))
            sim.step()
            want = telemetry_to_dict(sim.snapshot)
            got = decode_telemetry(encode_telemetry(sim.snapshot))
            assert got == want

    def test_non_returns_serialize_as_max_range(self, sim):
        doc = telemetry_to_dict(sim.snapshot)
        saw_no_return = False
        for r, i in zip(doc["lidar_ranges"], doc["lidar_intensities"]):
            assert math.isfinite(r)
            assert 0.0 <= r <= 12.0
            if i == 0.0:
                assert r == 12.0
                saw_no_return = True
            else:
                assert i == 47.0
        assert saw_no_return

    def test_malformed_telemetry_rejected(self):
        with pytest.raises(ProtocolError):
            decode_telemetry("{nope")
        with pytest.raises(ProtocolError):
            decode_telemetry('{"type": "other"}')


class TestControlCodec:
    def test_basic(self):
        ctl = decode_control('{"throttle": 0.5, "steering": -0.2}')
        assert (ctl.throttle, ctl.steering) == (0.5, -0.2)
        assert ctl.headlights is None and ctl.indicators is None

    def test_clamping(self):
        ctl = decode_control('{"throttle": 1.5}')
        assert ctl.throttle == 1.0
        assert ctl.steering == 0.0
        ctl = decode_control('{"steering": -9}')
        assert ctl.steering == -1.0

    def test_lights_optional(self):
        ctl = decode_control('{"throttle": 0, "headlights": 2, "indicators": 3}')
        assert ctl.headlights == 2 and ctl.indicators == 3
        ctl = decode_control('{"throttle": 0, "headlights": 7}')
        assert ctl.headlights == 2  # clamped into range

    def test_typed_frame_accepted(self):
        ctl = decode_control('{"type": "control", "throttle": 0.25, "steering": 0}')
        assert ctl.throttle == 0.25

    @pytest.mark.parametrize("payload", [
        "not json at all",
        '["throttle", 1]',
        '{"type": "telemetry"}',
        '{"throttle": "fast"}',
        '{"throttle": 0, "headlights": "on"}',
    ])
    def test_malformed_rejected(self, payload):
        with pytest.raises(ProtocolError):
            decode_control(payload)

    @settings(max_examples=80, deadline=None)
    @given(st.floats(allow_nan=False, allow_infinity=False, width=32),
           st.floats(allow_nan=False, allow_infinity=False, width=32))
    def test_any_numeric_frame_decodes_clamped(self, throttle, steering):
        payload = json.dumps({"throttle": throttle, "steering": steering})
        ctl = decode_control(payload)
        assert -1.0 <= ctl.throttle <= 1.0
        assert -1.0 <= ctl.steering <= 1.0
        if -1.0 <= throttle <= 1.0:
            assert ctl.throttle == throttle


class TestUiFrames:
    def test_teleop(self):
        kind, throttle, steering = decode_ui_frame(
            '{"type": "teleop", "throttle": 1, "steering": -0.5}')
        assert (kind, throttle, steering) == ("teleop", 1.0, -0.5)

    def test_command(self):
        kind, name, args = decode_ui_frame(
            '{"type": "command", "name": "set_bridge", '
            '"args": {"host": "10.0.0.2", "port": 5000}}')
        assert (kind, name) == ("command", "set_bridge")
        assert args == {"host": "10.0.0.2", "port": 5000}

    @pytest.mark.parametrize("payload", [
        "junk", '{"type": "dance"}', '{"type": "command"}',
        '{"type": "teleop", "throttle": "w"}',
    ])
    def test_malformed(self, payload):
        with pytest.raises(ProtocolError):
            decode_ui_frame(payload)


class TestSceneAndRecord:
    def test_scene_dict(self, minimap):
        scene = scene_to_dict(minimap)
        assert scene["tile_size"] == 0.6
        assert len(scene["tiles"]) == 16
        assert len(scene["boxes"]) == 3
        kinds = {t["kind"] for t in scene["tiles"]}
        assert "lawn" in kinds and "x_intersection" in kinds
        lawn = next(t for t in scene["tiles"] if t["kind"] == "lawn")
        assert lawn["drivable"] is False

    def test_record_line_excludes_wall_clock(self, sim):
        sim.step()
        line = record_line(sim.snapshot)
        doc = json.loads(line)
        assert "fps" not in line
        assert "bridge_status" not in line
        assert doc["tick"] == 1
        assert len(doc["state"]) == 7

    def test_ui_payload_superset(self, sim):
        doc = ui_telemetry_to_dict(sim.snapshot, 12.0, "connected", "127.0.0.1:4567")
        assert doc["bridge_status"] == "connected"
        assert doc["vehicle"]["x"] == 0.0
        assert len(doc["boxes"]) == 3
        assert "fps" in doc


class TestDropOldestQueue:
    def test_drops_oldest(self):
        async def scenario():
            queue = DropOldestQueue(maxsize=2)
            queue.put(1)
            queue.put(2)
            queue.put(3)
            assert queue.dropped == 1
            assert await queue.get() == 2
            assert await queue.get() == 3
        asyncio.run(scenario())


class EchoAutonomyServer:
    """Test harness: WebSocket server echoing a control for each telemetry."""

    def __init__(self, port: int, make_control=None):
        self.port = port
        self.make_control = make_control or (lambda doc: {"throttle": 0.5,
                                                          "steering": 0.0})
        self.received: list[dict] = []
        self._runner = None
        self._sockets = set()

    async def _handler(self, request):
        ws = web.WebSocketResponse()
        await ws.prepare(request)
        self._sockets.add(ws)
        try:
            async for msg in ws:
                if msg.type != WSMsgType.TEXT:
                    continue
                doc = json.loads(msg.data)
                self.received.append(doc)
                await ws.send_str(json.dumps(self.make_control(doc)))
        finally:
            self._sockets.discard(ws)
        return ws

    async def start(self):
        app = web.Application()
        app.router.add_get("/", self._handler)
        self._runner = web.AppRunner(app, shutdown_timeout=1.0)
        await self._runner.setup()
        await web.TCPSite(self._runner, "127.0.0.1", self.port).start()

    async def stop(self):
        for ws in list(self._sockets):
            await ws.close()
        if self._runner is not None:
            await self._runner.cleanup()
            self._runner = None


def bridge_setup(sim, port, backoff=(0.1, 0.2)):
    outbox = DropOldestQueue()
    cfg = BridgeConfig(host="127.0.0.1", port=port, reconnect_backoff=backoff)
    client = BridgeClient(cfg, sim, outbox)
    return client, outbox


class TestBridgeClient:
    def test_loopback_round_trip(self, sim):
        async def scenario():
            port = free_port()
            server = EchoAutonomyServer(port)
            await server.start()
            client, outbox = bridge_setup(sim, port)
            sim.toggle_mode()
            task = asyncio.create_task(client.run())
            runner = asyncio.create_task(run_loop(
                sim, realtime=False, yield_every=4,
                on_telemetry=lambda snap: outbox.put(encode_telemetry(snap))))
            try:
                for _ in range(100):
                    await asyncio.sleep(0.05)
                    if sim.snapshot.applied_throttle == 0.5:
                        break
                assert client.status == "connected"
                assert sim.snapshot.applied_throttle == 0.5
                assert server.received
                assert server.received[0]["type"] == "telemetry"
            finally:
                runner.cancel()
                task.cancel()
                await asyncio.gather(runner, task, return_exceptions=True)
                await server.stop()
        asyncio.run(scenario())

    def test_no_server_keeps_stepping(self, sim):
        async def scenario():
            client, outbox = bridge_setup(sim, free_port())
            task = asyncio.create_task(client.run())
            runner = asyncio.create_task(run_loop(
                sim, realtime=False, yield_every=16,
                on_telemetry=lambda snap: outbox.put(encode_telemetry(snap))))
            await asyncio.sleep(0.5)
            runner.cancel()
            task.cancel()
            await asyncio.gather(runner, task, return_exceptions=True)
            assert client.status == "disconnected"
            assert sim.tick > 1000
        asyncio.run(scenario())

    def test_reconnect_after_server_restart(self, sim):
        async def scenario():
            port = free_port()
            server = EchoAutonomyServer(port)
            await server.start()
            client, outbox = bridge_setup(sim, port)
            task = asyncio.create_task(client.run())
            runner = asyncio.create_task(run_loop(
                sim, realtime=False, yield_every=16,
                on_telemetry=lambda snap: outbox.put(encode_telemetry(snap))))
            try:
                for _ in range(100):
                    await asyncio.sleep(0.02)
                    if client.status == "connected":
                        break
                assert client.status == "connected"
                await server.stop()
                for _ in range(100):
                    await asyncio.sleep(0.02)
                    if client.status == "disconnected":
                        break
                assert client.status == "disconnected"
                server2 = EchoAutonomyServer(port)
                await server2.start()
                for _ in range(200):
                    await asyncio.sleep(0.02)
                    if client.status == "connected":
                        break
                assert client.status == "connected"
                await server2.stop()
            finally:
                runner.cancel()
                task.cancel()
                await asyncio.gather(runner, task, return_exceptions=True)
        asyncio.run(scenario())

    def test_retarget_switches_servers(self, sim):
        async def scenario():
            port_a, port_b = free_port(), free_port()
            server_a = EchoAutonomyServer(port_a)
            server_b = EchoAutonomyServer(port_b)
            await server_a.start()
            await server_b.start()
            client, outbox = bridge_setup(sim, port_a)
            task = asyncio.create_task(client.run())
            runner = asyncio.create_task(run_loop(
                sim, realtime=False, yield_every=16,
                on_telemetry=lambda snap: outbox.put(encode_telemetry(snap))))
            try:
                for _ in range(100):
                    await asyncio.sleep(0.02)
                    if server_a.received:
                        break
                assert server_a.received and client.status == "connected"

                client.retarget("127.0.0.1", port_b)
                for _ in range(200):
                    await asyncio.sleep(0.02)
                    if server_b.received:
                        break
                assert server_b.received
                assert client.target_text == f"127.0.0.1:{port_b}"

                client.retarget_default()   # back to the configured endpoint
                mark = len(server_a.received)
                for _ in range(200):
                    await asyncio.sleep(0.02)
                    if len(server_a.received) > mark:
                        break
                assert len(server_a.received) > mark
            finally:
                runner.cancel()
                task.cancel()
                await asyncio.gather(runner, task, return_exceptions=True)
                await server_a.stop()
                await server_b.stop()
        asyncio.run(scenario())

    def test_malformed_frame_counted_link_alive(self, sim):
        async def scenario():
            port = free_port()
            server = EchoAutonomyServer(
                port, make_control=lambda doc: "this is not json")

            async def bad_handler(request):
                ws = web.WebSocketResponse()
                await ws.prepare(request)
                async for msg in ws:
                    await ws.send_str("{broken")
                return ws

            server._handler = bad_handler
            await server.start()
            client, outbox = bridge_setup(sim, port)
            task = asyncio.create_task(client.run())
            runner = asyncio.create_task(run_loop(
                sim, realtime=False, yield_every=16,
                on_telemetry=lambda snap: outbox.put(encode_telemetry(snap))))
            try:
                for _ in range(100):
                    await asyncio.sleep(0.02)
                    if sim.counters["protocol_errors"] > 0:
                        break
                assert sim.counters["protocol_errors"] > 0
                assert client.status == "connected"
            finally:
                runner.cancel()
                task.cancel()
                await asyncio.gather(runner, task, return_exceptions=True)
                await server.stop()
        asyncio.run(scenario())


class TestUIServer:
    def test_ui_ws_stream_and_teleop(self, sim, minimap):
        async def scenario():
            import aiohttp
            port = free_port()
            ui = UIServer(sim, minimap, port=port)
            await ui.start()
            runner = asyncio.create_task(run_loop(
                sim, realtime=False, yield_every=8,
                on_telemetry=lambda snap: ui.broadcast(snap)))
            try:
                async with aiohttp.ClientSession() as session:
                    async with session.get(
                            f"http://127.0.0.1:{port}/api/scene") as resp:
                        scene = await resp.json()
                        assert len(scene["tiles"]) == 16
                    async with session.ws_connect(
                            f"ws://127.0.0.1:{port}/ws") as ws:
                        msg = await asyncio.wait_for(ws.receive(), timeout=5)
                        doc = json.loads(msg.data)
                        assert doc["type"] == "telemetry"
                        await ws.send_str(json.dumps(
                            {"type": "teleop", "throttle": 1.0, "steering": 0.0}))
                        for _ in range(100):
                            await asyncio.sleep(0.02)
                            if sim.snapshot.applied_throttle == 1.0:
                                break
                        assert sim.snapshot.applied_throttle == 1.0
                        await ws.send_str(json.dumps(
                            {"type": "command", "name": "headlights",
                             "args": {"beam": "low"}}))
                        for _ in range(100):
                            await asyncio.sleep(0.02)
                            if sim.snapshot.lights.headlights == 1:
                                break
                        assert sim.snapshot.lights.headlights == 1
                    async with session.get(f"http://127.0.0.1:{port}/") as resp:
                        assert resp.status == 200
            finally:
                runner.cancel()
                await asyncio.gather(runner, return_exceptions=True)
                await ui.stop()
        asyncio.run(scenario())

    def test_malformed_ui_frame_dropped(self, sim, minimap):
        async def scenario():
            import aiohttp
            port = free_port()
            ui = UIServer(sim, minimap, port=port)
            await ui.start()
            try:
                async with aiohttp.ClientSession() as session:
                    async with session.ws_connect(
                            f"ws://127.0.0.1:{port}/ws") as ws:
                        await ws.receive()  # greeting frame
                        await ws.send_str("garbage")
                        await asyncio.sleep(0.1)
                        assert ui.ui_errors == 1
            finally:
                await ui.stop()
        asyncio.run(scenario())
