import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scaledsim import asset_path
from scaledsim.params import ParamSet
from scaledsim.world import load_map, map_from_dict


@pytest.fixture
def pset():
    return ParamSet()


@pytest.fixture
def minimap():
    return load_map(asset_path("minimap.yaml"))


def make_map(tiles, boxes=None, spawn=None, tile_size=0.6):
    """Small helper: build a TileMap from literal tile tuples (kind, i, j, rot)."""
    doc = {
        "tile_size": tile_size,
        "tiles": [{"kind": k, "grid": [i, j], "rotation": r}
                  for (k, i, j, r) in tiles],
        "boxes": boxes or [],
        "spawn": spawn or {"position": [tile_size / 2, tile_size / 2], "yaw": 0.0},
    }
    return map_from_dict(doc)


@pytest.fixture
def straight_map():
    # three straights in a row, spawn in the middle cell, facing +x
    return make_map(
        [("straight", i, 0, 90) for i in range(-3, 8)],
        spawn={"position": [0.3, 0.3], "yaw": 0.0},
    )
