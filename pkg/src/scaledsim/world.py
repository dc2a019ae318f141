"""Tile environment and collision world.

A map is a sparse grid of square modules plus dynamic obstruction boxes.
Tiles are purely classification + render metadata (drivable or not); the
only LIDAR-visible and collidable solids are the boxes. World coordinates
are normalized at load so the spawn point is the origin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
import yaml

from .dynamics import GRAVITY, VehicleState, chassis_center
from .params import VehicleParams
from .raycast import cast_ray, cast_rays

DEFAULT_TILE_SIZE = 0.6   # m; one curved tile then meets the 0.6 m curvature floor
MIN_CURVE_RADIUS = 0.6    # m, minimum road curvature
OFFROAD_DRAG_MULT = 3.0   # lawn multiplier on linear_drag
BOX_FRICTION = 0.5        # sliding friction coefficient for boxes
DEFAULT_BOX_SIZE = (0.1, 0.1, 0.1)
DEFAULT_BOX_MASS = 0.1


class MapError(ValueError):
    """Raised when a map file cannot be loaded."""


class TileKind(Enum):
    STRAIGHT = "straight"
    CURVED = "curved"
    DEAD_END = "dead_end"
    T_INTERSECTION = "t_intersection"
    X_INTERSECTION = "x_intersection"
    ROADSIDE_PARKING = "roadside_parking"
    PARKING_LOT = "parking_lot"
    LAWN = "lawn"


def drivable(kind: TileKind) -> bool:
    return kind is not TileKind.LAWN


# Edge indices: 0=E, 1=N, 2=W, 3=S. A 90 deg CCW rotation shifts E->N etc.
_EDGE_OFFSETS = {0: (1, 0), 1: (0, 1), 2: (-1, 0), 3: (0, -1)}
_BASE_OPENINGS = {
    TileKind.STRAIGHT: (1, 3),
    TileKind.CURVED: (3, 0),
    TileKind.DEAD_END: (3,),
    TileKind.T_INTERSECTION: (0, 2, 3),
    TileKind.X_INTERSECTION: (0, 1, 2, 3),
    TileKind.ROADSIDE_PARKING: (1, 3),
    TileKind.PARKING_LOT: (3,),
    TileKind.LAWN: (),
}


@dataclass(frozen=True)
class Tile:
    kind: TileKind
    grid: tuple[int, int]
    rotation: int = 0  # degrees CCW, one of 0/90/180/270

    def openings(self) -> frozenset[int]:
        shift = self.rotation // 90
        return frozenset((e + shift) % 4 for e in _BASE_OPENINGS[self.kind])


@dataclass
class ObstructionBox:
    """The environment's only 3D, dynamic module; the sole LIDAR-visible solid."""

    cx: float
    cy: float
    yaw: float = 0.0
    length: float = DEFAULT_BOX_SIZE[0]
    width: float = DEFAULT_BOX_SIZE[1]
    height: float = DEFAULT_BOX_SIZE[2]
    mass: float = DEFAULT_BOX_MASS
    vx: float = 0.0
    vy: float = 0.0

    def copy(self) -> "ObstructionBox":
        return ObstructionBox(self.cx, self.cy, self.yaw, self.length,
                              self.width, self.height, self.mass, self.vx, self.vy)


@dataclass(frozen=True)
class TileMap:
    tile_size: float
    tiles: dict[tuple[int, int], Tile]
    boxes: tuple[ObstructionBox, ...]   # initial placement; runtime copies mutate
    spawn: tuple[float, float, float]   # (x, y, yaw); (0, 0, yaw) after load
    origin: tuple[float, float]         # world coords of grid cell (0,0) corner

    def tile_rect(self, grid: tuple[int, int]) -> tuple[float, float, float, float]:
        """(xmin, ymin, xmax, ymax) of one grid cell in world coordinates."""
        s = self.tile_size
        x0 = self.origin[0] + grid[0] * s
        y0 = self.origin[1] + grid[1] * s
        return x0, y0, x0 + s, y0 + s

    def tile_at(self, x: float, y: float) -> Tile | None:
        s = self.tile_size
        i = math.floor((x - self.origin[0]) / s)
        j = math.floor((y - self.origin[1]) / s)
        return self.tiles.get((i, j))


@dataclass(frozen=True)
class MapReport:
    drivable_components: int
    dead_end_leaves: int
    has_closed_loop: bool
    curvature_violations: tuple[tuple[int, int], ...]
    warnings: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.curvature_violations


# ---------------------------------------------------------------------------
# loading


def _find_line(text: str, token: str) -> int | None:
    for lineno, line in enumerate(text.splitlines(), start=1):
        if token in line:
            return lineno
    return None


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise MapError(message)


def map_from_dict(doc: dict, raw_text: str = "") -> TileMap:
    _require(isinstance(doc, dict), "map root must be a mapping")
    unknown = set(doc) - {"tile_size", "tiles", "boxes", "spawn"}
    _require(not unknown, f"unknown map key '{sorted(unknown)[0] if unknown else ''}'")

    tile_size = float(doc.get("tile_size", DEFAULT_TILE_SIZE))
    _require(tile_size > 0, "tile_size must be positive")

    entries = doc.get("tiles")
    _require(isinstance(entries, list) and entries, "map needs a non-empty 'tiles' list")
    tiles: dict[tuple[int, int], Tile] = {}
    for idx, entry in enumerate(entries):
        _require(isinstance(entry, dict), f"tiles[{idx}] must be a mapping")
        kind_name = entry.get("kind")
        try:
            kind = TileKind(kind_name)
        except ValueError:
            line = _find_line(raw_text, str(kind_name))
            where = f"line {line}" if line else f"tiles[{idx}]"
            raise MapError(f"{where}: unknown tile kind '{kind_name}'") from None
        grid = entry.get("grid")
        _require(isinstance(grid, list) and len(grid) == 2
                 and all(isinstance(g, int) for g in grid),
                 f"tiles[{idx}]: grid must be a pair of integers")
        rotation = entry.get("rotation", 0)
        _require(rotation in (0, 90, 180, 270),
                 f"tiles[{idx}]: rotation must be one of 0/90/180/270")
        key = (grid[0], grid[1])
        if key in tiles:
            raise MapError(f"duplicate grid cell {key}")
        tiles[key] = Tile(kind, key, rotation)

    boxes = []
    for idx, entry in enumerate(doc.get("boxes") or []):
        _require(isinstance(entry, dict), f"boxes[{idx}] must be a mapping")
        center = entry.get("center")
        _require(isinstance(center, list) and len(center) == 2,
                 f"boxes[{idx}]: center must be [x, y]")
        size = entry.get("size", list(DEFAULT_BOX_SIZE))
        _require(isinstance(size, list) and len(size) == 3,
                 f"boxes[{idx}]: size must be [l, w, h]")
        _require(all(float(s) > 0 for s in size), f"boxes[{idx}]: size must be positive")
        mass = float(entry.get("mass", DEFAULT_BOX_MASS))
        _require(mass > 0, f"boxes[{idx}]: mass must be positive")
        boxes.append(ObstructionBox(
            float(center[0]), float(center[1]), float(entry.get("yaw", 0.0)),
            float(size[0]), float(size[1]), float(size[2]), mass))

    spawn = doc.get("spawn")
    _require(isinstance(spawn, dict) and isinstance(spawn.get("position"), list)
             and len(spawn["position"]) == 2,
             "map needs 'spawn: {position: [x, y], yaw: ...}'")
    sx, sy = float(spawn["position"][0]), float(spawn["position"][1])
    syaw = float(spawn.get("yaw", 0.0))

    si = math.floor(sx / tile_size)
    sj = math.floor(sy / tile_size)
    spawn_tile = tiles.get((si, sj))
    if spawn_tile is None or not drivable(spawn_tile.kind):
        raise MapError(f"spawn at ({sx}, {sy}) is not on a drivable tile")

    # shift the world so the spawn point becomes the origin
    origin = (-sx, -sy)
    for box in boxes:
        box.cx -= sx
        box.cy -= sy
    return TileMap(tile_size=tile_size, tiles=tiles, boxes=tuple(boxes),
                   spawn=(0.0, 0.0, syaw), origin=origin)


def load_map(path) -> TileMap:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise MapError(f"cannot read map file: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise MapError(f"cannot parse map file: {exc}") from exc
    return map_from_dict(doc, text)


# ---------------------------------------------------------------------------
# validation


def _adjacency(tilemap: TileMap) -> dict[tuple[int, int], list[tuple[int, int]]]:
    nodes = sorted(k for k, t in tilemap.tiles.items() if drivable(t.kind))
    adj: dict[tuple[int, int], list[tuple[int, int]]] = {k: [] for k in nodes}
    for key in nodes:
        tile = tilemap.tiles[key]
        for edge in sorted(tile.openings()):
            di, dj = _EDGE_OFFSETS[edge]
            other = (key[0] + di, key[1] + dj)
            neighbor = tilemap.tiles.get(other)
            if neighbor is None or not drivable(neighbor.kind):
                continue
            if (edge + 2) % 4 in neighbor.openings():
                adj[key].append(other)
    return adj


def validate_map(tilemap: TileMap) -> MapReport:
    """Lint the road network: connectivity, loops, dead ends, curvature."""
    adj = _adjacency(tilemap)
    seen: set[tuple[int, int]] = set()
    components = 0
    has_loop = False
    for start in adj:
        if start in seen:
            continue
        components += 1
        comp_nodes = 0
        comp_edge_ends = 0
        stack = [start]
        seen.add(start)
        while stack:
            node = stack.pop()
            comp_nodes += 1
            comp_edge_ends += len(adj[node])
            for nxt in adj[node]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if comp_edge_ends // 2 >= comp_nodes:  # E >= V means a cycle exists
            has_loop = True

    leaves = sum(1 for node in adj if len(adj[node]) == 1)

    violations = []
    for key in sorted(tilemap.tiles):
        tile = tilemap.tiles[key]
        if tile.kind is TileKind.CURVED and tilemap.tile_size < MIN_CURVE_RADIUS - 1e-9:
            violations.append(key)

    warnings = []
    if components > 1:
        warnings.append(f"{components} disconnected drivable components")
    if not has_loop:
        warnings.append("no closed loop")
    if leaves:
        warnings.append(f"{leaves} dead-end leaves")
    for key in violations:
        warnings.append(f"curved tile {key}: turn radius {tilemap.tile_size} m "
                        f"below the {MIN_CURVE_RADIUS} m minimum")

    return MapReport(
        drivable_components=components,
        dead_end_leaves=leaves,
        has_closed_loop=has_loop,
        curvature_violations=tuple(violations),
        warnings=tuple(warnings),
    )


# ---------------------------------------------------------------------------
# geometry


def obb_corners(cx: float, cy: float, yaw: float,
                length: float, width: float) -> list[tuple[float, float]]:
    """Corners of an oriented rectangle, CCW starting front-left."""
    c, s = math.cos(yaw), math.sin(yaw)
    hl, hw = length / 2.0, width / 2.0
    out = []
    for lx, ly in ((hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)):
        out.append((cx + lx * c - ly * s, cy + lx * s + ly * c))
    return out


def box_segments(boxes) -> np.ndarray:
    """Flatten box footprints into a (4n, 4) segment array for the ray kernel."""
    segs = np.empty((4 * len(boxes), 4), dtype=np.float64)
    row = 0
    for box in boxes:
        corners = obb_corners(box.cx, box.cy, box.yaw, box.length, box.width)
        for k in range(4):
            ax, ay = corners[k]
            bx, by = corners[(k + 1) % 4]
            segs[row] = (ax, ay, bx, by)
            row += 1
    return segs


def raycast(origin: tuple[float, float], bearing: float, boxes) -> float:
    """Nearest intersection distance with any box footprint; inf on miss."""
    if not len(boxes):
        return math.inf
    return cast_ray(origin[0], origin[1], bearing, box_segments(boxes))


def scan(origin: tuple[float, float], yaw: float, n_rays: int, boxes) -> np.ndarray:
    """Raw full-circle scan (no range clipping); ray 0 along yaw, CCW order."""
    if not len(boxes):
        return np.full(n_rays, np.inf)
    return cast_rays(origin[0], origin[1], yaw, n_rays, box_segments(boxes))


def _project(corners, ax: float, ay: float) -> tuple[float, float]:
    lo = hi = corners[0][0] * ax + corners[0][1] * ay
    for px, py in corners[1:]:
        d = px * ax + py * ay
        if d < lo:
            lo = d
        elif d > hi:
            hi = d
    return lo, hi


def obb_overlap(c1, c2) -> tuple[float, float, float] | None:
    """SAT overlap test of two corner lists.

    Returns (nx, ny, depth) with the minimum-translation normal pointing from
    rect 1 toward rect 2, or None when separated.
    """
    best_depth = math.inf
    best_axis = (0.0, 0.0)
    for corners in (c1, c2):
        for k in range(2):  # two unique edge normals per rectangle
            ex = corners[k + 1][0] - corners[k][0]
            ey = corners[k + 1][1] - corners[k][1]
            norm = math.hypot(ex, ey)
            if norm == 0.0:
                continue
            ax, ay = -ey / norm, ex / norm
            lo1, hi1 = _project(c1, ax, ay)
            lo2, hi2 = _project(c2, ax, ay)
            overlap = min(hi1, hi2) - max(lo1, lo2)
            if overlap <= 0.0:
                return None
            if overlap < best_depth:
                best_depth = overlap
                best_axis = (ax, ay)
    cx1 = sum(p[0] for p in c1) / 4.0
    cy1 = sum(p[1] for p in c1) / 4.0
    cx2 = sum(p[0] for p in c2) / 4.0
    cy2 = sum(p[1] for p in c2) / 4.0
    nx, ny = best_axis
    if (cx2 - cx1) * nx + (cy2 - cy1) * ny < 0.0:
        nx, ny = -nx, -ny
    return nx, ny, best_depth


@dataclass(frozen=True)
class CollisionEvent:
    box_index: int
    normal: tuple[float, float]      # unit, from vehicle toward box
    impulse: float                   # N*s along the normal
    vehicle_dspeed: float            # change of the signed forward speed
    box_dv: tuple[float, float]


def _nearest_point_in_cells(tilemap: TileMap, x: float, y: float) -> tuple[float, float]:
    best = None
    best_d2 = math.inf
    for key in tilemap.tiles:
        x0, y0, x1, y1 = tilemap.tile_rect(key)
        px = min(max(x, x0), x1)
        py = min(max(y, y0), y1)
        d2 = (px - x) ** 2 + (py - y) ** 2
        if d2 < best_d2:
            best_d2 = d2
            best = (px, py)
    return best if best is not None else (x, y)


def collide_vehicle(state: VehicleState, tilemap: TileMap, boxes,
                    params: VehicleParams, dt: float
                    ) -> tuple[VehicleState, list[CollisionEvent]]:
    """Resolve vehicle/box contacts, lawn drag and the map boundary.

    Contacts are inelastic (restitution 0): the normal impulse equalizes the
    normal velocities of the two free bodies, then the vehicle's velocity
    change is projected back onto its heading (the wheels forbid sideways
    motion; a head-on contact conserves momentum along the normal exactly).
    Positions separate along the minimum-translation vector split by inverse
    mass.
    """
    events: list[CollisionEvent] = []
    x, y, yaw, speed = state.x, state.y, state.yaw, state.speed
    hx, hy = math.cos(yaw), math.sin(yaw)
    offset = params.wheelbase / 2.0

    for index, box in enumerate(boxes):
        ccx = x + offset * hx
        ccy = y + offset * hy
        reach = (math.hypot(params.chassis_length, params.chassis_width)
                 + math.hypot(box.length, box.width)) / 2.0
        if math.hypot(box.cx - ccx, box.cy - ccy) > reach:
            continue
        veh = obb_corners(ccx, ccy, yaw, params.chassis_length, params.chassis_width)
        hit = obb_overlap(veh, obb_corners(box.cx, box.cy, box.yaw,
                                           box.length, box.width))
        if hit is None:
            continue
        nx, ny, depth = hit

        u_v = speed * (hx * nx + hy * ny)
        u_b = box.vx * nx + box.vy * ny
        impulse = 0.0
        dspeed = 0.0
        dvb = (0.0, 0.0)
        if u_v - u_b > 0.0:
            m_red = 1.0 / (1.0 / params.mass + 1.0 / box.mass)
            impulse = m_red * (u_v - u_b)
            dvb = (impulse / box.mass * nx, impulse / box.mass * ny)
            box.vx += dvb[0]
            box.vy += dvb[1]
            dspeed = -(impulse / params.mass) * (nx * hx + ny * hy)
            speed += dspeed

        w_v = box.mass / (params.mass + box.mass)
        x -= nx * depth * w_v
        y -= ny * depth * w_v
        box.cx += nx * depth * (1.0 - w_v)
        box.cy += ny * depth * (1.0 - w_v)
        events.append(CollisionEvent(index, (nx, ny), impulse, dspeed, dvb))

    # off-road drag on lawn tiles (the 2WD vehicle slows down on grass)
    tile = tilemap.tile_at(x + offset * hx, y + offset * hy)
    if tile is not None and tile.kind is TileKind.LAWN:
        speed -= OFFROAD_DRAG_MULT * params.linear_drag * speed * dt

    # hard clamp at the edge of the tiled region
    if tilemap.tile_at(x, y) is None:
        x, y = _nearest_point_in_cells(tilemap, x, y)
        speed = 0.0

    new_state = replace(state, x=x, y=y, speed=speed)
    return new_state, events


def box_step(boxes, dt: float, friction: float = BOX_FRICTION) -> None:
    """Integrate box motion with sliding friction; resolve box/box contacts.

    Mutates the boxes in place (single-threaded physics step only).
    """
    for box in boxes:
        v = math.hypot(box.vx, box.vy)
        if v > 0.0:
            dec = friction * GRAVITY * dt
            if dec >= v:
                box.vx = 0.0
                box.vy = 0.0
            else:
                scale = (v - dec) / v
                box.vx *= scale
                box.vy *= scale
        box.cx += box.vx * dt
        box.cy += box.vy * dt

    for _ in range(8):
        any_overlap = False
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                a, b = boxes[i], boxes[j]
                if math.hypot(b.cx - a.cx, b.cy - a.cy) > (
                        math.hypot(a.length, a.width)
                        + math.hypot(b.length, b.width)) / 2.0:
                    continue
                hit = obb_overlap(
                    obb_corners(a.cx, a.cy, a.yaw, a.length, a.width),
                    obb_corners(b.cx, b.cy, b.yaw, b.length, b.width))
                if hit is None:
                    continue
                any_overlap = True
                nx, ny, depth = hit
                u_a = a.vx * nx + a.vy * ny
                u_b = b.vx * nx + b.vy * ny
                if u_a - u_b > 0.0:
                    common = (a.mass * u_a + b.mass * u_b) / (a.mass + b.mass)
                    a.vx += (common - u_a) * nx
                    a.vy += (common - u_a) * ny
                    b.vx += (common - u_b) * nx
                    b.vy += (common - u_b) * ny
                w_a = b.mass / (a.mass + b.mass)
                a.cx -= nx * depth * w_a
                a.cy -= ny * depth * w_a
                b.cx += nx * depth * (1.0 - w_a)
                b.cy += ny * depth * (1.0 - w_a)
        if not any_overlap:
            break
