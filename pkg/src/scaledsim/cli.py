"""Process entry point: flags, environment overrides, lifecycle.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 runtime fault.
Every flag can also be set through a SCALEDSIM_* environment variable; the
flag wins when both are present.
"""
from __future__ import annotations

import argparse
import asyncio
import os
import signal
import sys
from dataclasses import dataclass
from pathlib import Path

from .bridge import (DEFAULT_BRIDGE_HOST, DEFAULT_BRIDGE_PORT, DEFAULT_UI_PORT,
                     BridgeClient, BridgeConfig, DropOldestQueue, UIServer,
                     encode_telemetry, record_line, run_loop)
from .params import ConfigError, ParamSet, load_params
from .simcore import Simulator
from .world import MapError, load_map, validate_map


@dataclass(frozen=True)
class RunOptions:
    map_path: str
    params_path: str | None = None
    bridge_host: str = DEFAULT_BRIDGE_HOST
    bridge_port: int = DEFAULT_BRIDGE_PORT
    ui_port: int = DEFAULT_UI_PORT
    ui_assets: str | None = None
    headless: bool = False
    realtime: bool = True
    rate: float = 100.0
    seed: int = 0
    record_path: str | None = None
    stale_timeout: float = 0.5
    mode: str = "manual"
    validate_only: bool = False


def _env(name: str, default=None):
    return os.environ.get(f"SCALEDSIM_{name}", default)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scaledsim",
        description="Headless deterministic scaled-vehicle simulator with a "
                    "WebSocket autonomy bridge and a browser teleoperation UI.")
    parser.add_argument("--map", dest="map_path", default=_env("MAP"),
                        help="map file path (YAML; required). Env: SCALEDSIM_MAP")
    parser.add_argument("--params", dest="params_path", default=_env("PARAMS"),
                        help="vehicle config file (YAML; default: built-in "
                             "values). Env: SCALEDSIM_PARAMS")
    parser.add_argument("--bridge", default=_env("BRIDGE",
                        f"{DEFAULT_BRIDGE_HOST}:{DEFAULT_BRIDGE_PORT}"),
                        help="autonomy server endpoint as host:port "
                             f"(default {DEFAULT_BRIDGE_HOST}:{DEFAULT_BRIDGE_PORT}). "
                             "Env: SCALEDSIM_BRIDGE")
    parser.add_argument("--ui-port", type=int,
                        default=int(_env("UI_PORT", DEFAULT_UI_PORT)),
                        help=f"local UI HTTP+WS port (default {DEFAULT_UI_PORT}). "
                             "Env: SCALEDSIM_UI_PORT")
    parser.add_argument("--ui-assets", default=_env("UI_ASSETS"),
                        help="directory with the built web UI (default: "
                             "./frontend/dist when present). Env: SCALEDSIM_UI_ASSETS")
    parser.add_argument("--headless", action="store_true",
                        default=_env("HEADLESS", "") not in ("", "0"),
                        help="run without the UI server. Env: SCALEDSIM_HEADLESS")
    realtime = parser.add_mutually_exclusive_group()
    realtime.add_argument("--realtime", dest="realtime", action="store_true",
                          default=None,
                          help="pace ticks against the wall clock "
                               "(default: on unless --headless)")
    realtime.add_argument("--no-realtime", dest="realtime", action="store_false",
                          help="step as fast as possible")
    parser.add_argument("--rate", type=float, default=float(_env("RATE", 100.0)),
                        help="physics rate in Hz (default 100, i.e. dt = 10 ms). "
                             "Env: SCALEDSIM_RATE")
    parser.add_argument("--seed", type=int, default=int(_env("SEED", 0)),
                        help="RNG seed for sensor noise (default 0). "
                             "Env: SCALEDSIM_SEED")
    parser.add_argument("--record", dest="record_path", default=_env("RECORD"),
                        help="write one snapshot-log line per telemetry tick "
                             "to this file. Env: SCALEDSIM_RECORD")
    parser.add_argument("--stale-timeout", type=float,
                        default=float(_env("STALE_TIMEOUT", 0.5)),
                        help="autonomous-mode safety stop after this many "
                             "seconds without control frames (default 0.5; "
                             "0 disables). Env: SCALEDSIM_STALE_TIMEOUT")
    parser.add_argument("--mode", choices=("manual", "autonomous"),
                        default=_env("MODE", "manual"),
                        help="initial driving mode (default manual; useful "
                             "with --headless). Env: SCALEDSIM_MODE")
    parser.add_argument("--validate-only", action="store_true",
                        help="load the map, print the validation report, exit")
    return parser


def parse_args(argv=None) -> RunOptions:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    if not ns.map_path:
        parser.error("a map is required (--map PATH)")
    bridge = str(ns.bridge)
    host, sep, port_text = bridge.rpartition(":")
    if not sep or not host:
        parser.error(f"--bridge must be host:port, got '{bridge}'")
    try:
        port = int(port_text)
    except ValueError:
        parser.error(f"--bridge port must be an integer, got '{port_text}'")
    if ns.rate <= 0:
        parser.error("--rate must be positive")
    realtime = ns.realtime if ns.realtime is not None else not ns.headless
    return RunOptions(
        map_path=ns.map_path,
        params_path=ns.params_path,
        bridge_host=host,
        bridge_port=port,
        ui_port=ns.ui_port,
        ui_assets=ns.ui_assets,
        headless=ns.headless,
        realtime=realtime,
        rate=ns.rate,
        seed=ns.seed,
        record_path=ns.record_path,
        stale_timeout=ns.stale_timeout,
        mode=ns.mode,
        validate_only=ns.validate_only,
    )


def render_args(opts: RunOptions) -> list[str]:
    """Inverse of parse_args for valid option sets."""
    argv = ["--map", opts.map_path,
            "--bridge", f"{opts.bridge_host}:{opts.bridge_port}",
            "--ui-port", str(opts.ui_port),
            "--rate", str(opts.rate),
            "--seed", str(opts.seed),
            "--stale-timeout", str(opts.stale_timeout),
            "--mode", opts.mode,
            "--realtime" if opts.realtime else "--no-realtime"]
    if opts.params_path:
        argv += ["--params", opts.params_path]
    if opts.ui_assets:
        argv += ["--ui-assets", opts.ui_assets]
    if opts.headless:
        argv.append("--headless")
    if opts.record_path:
        argv += ["--record", opts.record_path]
    if opts.validate_only:
        argv.append("--validate-only")
    return argv


def _print_report(report) -> None:
    print(f"drivable components: {report.drivable_components}")
    print(f"dead-end leaves:     {report.dead_end_leaves}")
    print(f"closed loop:         {'yes' if report.has_closed_loop else 'no'}")
    print(f"curvature violations: {len(report.curvature_violations)}")
    for line in report.warnings:
        print(f"warning: {line}")


def _default_assets(opts: RunOptions) -> Path | None:
    if opts.ui_assets:
        return Path(opts.ui_assets)
    candidate = Path.cwd() / "frontend" / "dist"
    return candidate if candidate.is_dir() else None


async def _run_app(opts: RunOptions, params: ParamSet, tilemap) -> None:
    sim = Simulator(params, tilemap, dt=1.0 / opts.rate, seed=opts.seed,
                    stale_timeout=opts.stale_timeout)
    if opts.mode == "autonomous":
        sim.toggle_mode()
    cfg = BridgeConfig(host=opts.bridge_host, port=opts.bridge_port)
    outbox = DropOldestQueue(maxsize=64)
    bridge = BridgeClient(cfg, sim, outbox)
    sim.hooks["set_bridge"] = bridge.retarget
    sim.hooks["reset"] = bridge.retarget_default

    ui: UIServer | None = None
    if not opts.headless:
        ui = UIServer(sim, tilemap, port=opts.ui_port,
                      assets_dir=_default_assets(opts), bridge=bridge,
                      max_range=params.sensors.lidar_max_range)
        await ui.start()

    # line-buffered so an interrupted run still leaves a complete log
    record_file = open(opts.record_path, "w", buffering=1) \
        if opts.record_path else None
    max_range = params.sensors.lidar_max_range

    def on_telemetry(snapshot):
        outbox.put(encode_telemetry(snapshot, max_range))
        if ui is not None:
            ui.broadcast(snapshot)
        if record_file is not None:
            record_file.write(record_line(snapshot, max_range))
            record_file.write("\n")

    stop = asyncio.Event()
    loop = asyncio.get_running_loop()
    for sig in (signal.SIGINT, signal.SIGTERM):
        try:
            loop.add_signal_handler(sig, stop.set)
        except NotImplementedError:
            pass
    tasks = [asyncio.create_task(bridge.run()),
             asyncio.create_task(run_loop(sim, realtime=opts.realtime,
                                          on_telemetry=on_telemetry,
                                          stop=stop))]
    waiter = asyncio.create_task(stop.wait())
    try:
        done, _ = await asyncio.wait({waiter, *tasks},
                                     return_when=asyncio.FIRST_COMPLETED)
        for task in done:
            if task is not waiter:
                task.result()   # propagate a crashed task as a runtime fault
    finally:
        for task in [waiter, *tasks]:
            task.cancel()
        await asyncio.gather(waiter, *tasks, return_exceptions=True)
        if ui is not None:
            await ui.stop()
        if record_file is not None:
            record_file.close()


def main(argv=None) -> int:
    opts = parse_args(argv)
    try:
        params = load_params(opts.params_path) if opts.params_path else ParamSet()
        tilemap = load_map(opts.map_path)
    except (ConfigError, MapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if opts.validate_only:
        report = validate_map(tilemap)
        _print_report(report)
        return 0 if report.ok else 1

    try:
        asyncio.run(_run_app(opts, params, tilemap))
    except KeyboardInterrupt:
        pass
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - surfaced as the runtime exit code
        print(f"runtime fault: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
