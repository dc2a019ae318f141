"""Weave policy: sinusoidal steering with small heading/lateral trim.

The trim terms keep the weave centered on the spawn line so the vehicle's
lateral position oscillates through zero instead of drifting off with the
sine's one-sided heading bias.

    python examples/sine_steer.py --port 4567
    scaledsim --map <map> --bridge 127.0.0.1:4567 --mode autonomous
"""
import argparse
import math

from scaledsim_client import ControlCommand, serve

THROTTLE = 0.3
FREQ_HZ = 0.35
YAW_TRIM = 2.0
LATERAL_TRIM = 8.0


def policy(frame):
    steering = (math.sin(2.0 * math.pi * FREQ_HZ * frame.sim_time)
                + YAW_TRIM * frame.yaw
                + LATERAL_TRIM * frame.ips_position[1])
    return ControlCommand(throttle=THROTTLE,
                          steering=max(-1.0, min(1.0, steering)))


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--host", default="0.0.0.0")
    parser.add_argument("--port", type=int, default=4567)
    args = parser.parse_args()
    print(f"listening on {args.host}:{args.port} - start the simulator now", flush=True)
    serve(args.host, args.port, policy)
