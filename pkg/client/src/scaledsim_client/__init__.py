"""Autonomy-side SDK for the scaledsim simulator.

The user's script is the WebSocket *server*; the simulator dials in as a
client and streams telemetry frames. Pass a callback to serve(): it gets one
typed TelemetryFrame per frame and whatever ControlCommand it returns is
sent straight back. The callback runs on a single dispatch thread, so user
code needs no locking.

    from scaledsim_client import ControlCommand, serve

    def policy(frame):
        return ControlCommand(throttle=0.3, steering=0.0)

    serve(port=4567, on_telemetry=policy)
"""
from .session import (ClientSession, ControlCommand, SchemaError,
                      TelemetryFrame, decode_telemetry, encode_control, serve)

__all__ = [
    "ClientSession",
    "ControlCommand",
    "SchemaError",
    "TelemetryFrame",
    "decode_telemetry",
    "encode_control",
    "serve",
]

__version__ = "0.1.0"
