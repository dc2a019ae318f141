"""Minimal policy: hold a gentle constant throttle, wheels straight.

Start this first, then the simulator pointed at it:

    python examples/constant_drive.py --port 4567
    scaledsim --map <map> --bridge 127.0.0.1:4567 --mode autonomous
"""
import argparse

from scaledsim_client import ControlCommand, serve


def policy(frame):
    if int(frame.sim_time * 2) % 10 == 0:
        print(f"t={frame.sim_time:7.2f}s speed={frame.speed:.3f} m/s "
              f"pos=({frame.ips_position[0]:.2f}, {frame.ips_position[1]:.2f})")
    return ControlCommand(throttle=0.3, steering=0.0)


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--host", default="0.0.0.0")
    parser.add_argument("--port", type=int, default=4567)
    args = parser.parse_args()
    print(f"listening on {args.host}:{args.port} - start the simulator now", flush=True)
    serve(args.host, args.port, policy)
