"""Headless deterministic simulator for a 1:14-scale autonomous vehicle.

Subsystems: parameter loading (params), single-track dynamics (dynamics),
sensor suite (sensors), tile world and collisions (world), fixed-step
scheduler (simcore), wire schemas and transports (bridge), CLI entry (cli).
"""
from importlib import resources
from pathlib import Path

__version__ = "0.1.0"


def asset_path(name: str) -> Path:
    """Path to a bundled asset, e.g. asset_path('minimap.yaml')."""
    return Path(resources.files("scaledsim") / "assets" / name)
