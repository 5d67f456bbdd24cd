"""Deterministic 2-D gridworld: traversability, agent kinematics, panoramas, paths.

Coordinate conventions used across the whole package:

* World frame: ``x`` east, ``y`` north, meters. Cell ``(cx, cy)`` spans
  ``[cx*cell_size, (cx+1)*cell_size)`` on each axis; cell ``(0, 0)`` is the
  south-west corner. Environment text files are drawn north-up, so the first
  grid row in a file is the northernmost row.
* Bearings are measured counterclockwise from north: 0 = north, 90 = west,
  180 = south, 270 = east. Agent headings use this convention, which makes
  ROTATE_LEFT (+15 degrees) a counterclockwise turn.
* Panorama sectors: 24 sectors of 15 degrees, sector ``i`` centered on
  bearing ``15*i``; sector 0 faces north regardless of agent heading.
* ``compass_bearing_deg`` (clockwise from north) exists only for the polar
  edge labels of the topological map, which follow compass order N, NE, E, ...
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

FORWARD_STEP = 0.25
ROTATE_STEP_DEG = 15.0
SECTOR_COUNT = 24
SECTOR_DEG = 360.0 / SECTOR_COUNT
DEPTH_MAX = 5.0
LANDMARK_NONE = -1
LANDMARK_CLASSES = 8
PANO_CHANNELS = 1 + LANDMARK_CLASSES

_CORNER_EPS = 1e-12


class EnvironmentParseError(ValueError):
    """Raised when an environment file is malformed; message carries the line number."""


class SimulationError(RuntimeError):
    """Raised for physically invalid simulator queries (e.g. observing from a wall)."""


class NoPathError(RuntimeError):
    """Raised when shortest_path endpoints are not connected."""


def ccw_bearing_deg(dx: float, dy: float) -> float:
    """Bearing of displacement (dx, dy), counterclockwise from north, in [0, 360)."""
    return math.degrees(math.atan2(-dx, dy)) % 360.0


def compass_bearing_deg(dx: float, dy: float) -> float:
    """Bearing of displacement (dx, dy), clockwise from north, in [0, 360)."""
    return math.degrees(math.atan2(dx, dy)) % 360.0


def bearing_vector(bearing_deg: float) -> tuple[float, float]:
    """Unit (dx, dy) for a counterclockwise-from-north bearing."""
    r = math.radians(bearing_deg)
    return (-math.sin(r), math.cos(r))


def sector_of_bearing(bearing_deg: float) -> int:
    """Sector index of a ccw bearing; half-open bins centered on multiples of 15 degrees."""
    return int(((bearing_deg + SECTOR_DEG / 2.0) % 360.0) // SECTOR_DEG) % SECTOR_COUNT


def quantize_heading(bearing_deg: float) -> float:
    """Nearest heading (multiple of 15 degrees) to a ccw bearing, in [0, 360)."""
    return (round(bearing_deg / ROTATE_STEP_DEG) * ROTATE_STEP_DEG) % 360.0


class AgentAction(Enum):
    FORWARD = "forward"
    ROTATE_LEFT = "rotate_left"
    ROTATE_RIGHT = "rotate_right"


@dataclass(frozen=True)
class Pose:
    """Agent position (meters) and heading (degrees ccw from north, multiple of 15)."""

    x: float
    y: float
    heading: float

    def __post_init__(self) -> None:
        if self.heading % ROTATE_STEP_DEG != 0.0 or not (0.0 <= self.heading < 360.0):
            raise ValueError(f"heading must be a multiple of 15 in [0, 360), got {self.heading}")

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Landmark:
    class_id: int
    name: str
    region: tuple[int, int, int, int]  # inclusive cell rectangle (x0, y0, x1, y1)


@dataclass(frozen=True)
class Room:
    name: str
    region: tuple[int, int, int, int]


@dataclass
class Panorama:
    """24-sector observation ring, globally aligned (sector 0 = north).

    ``depth`` is meters clipped to DEPTH_MAX; ``landmark_class`` is the class id
    of the nearest landmark region the sector ray enters before occlusion, or
    LANDMARK_NONE.
    """

    depth: np.ndarray
    landmark_class: np.ndarray

    def features(self) -> np.ndarray:
        """(PANO_CHANNELS, 24) ring: normalized depth row plus one-hot landmark rows."""
        out = np.zeros((PANO_CHANNELS, SECTOR_COUNT))
        out[0] = self.depth / DEPTH_MAX
        for i, cls in enumerate(self.landmark_class):
            if cls != LANDMARK_NONE:
                out[1 + cls, i] = 1.0
        return out

    def descriptor(self) -> np.ndarray:
        """Flattened feature ring (length PANO_CHANNELS * 24), the map-node descriptor."""
        return self.features().reshape(-1)

    def rotated(self, sectors: int) -> "Panorama":
        """Ring rotated so the content of sector i moves to sector (i + sectors) % 24."""
        return Panorama(
            np.roll(self.depth, sectors), np.roll(self.landmark_class, sectors)
        )


DESCRIPTOR_LEN = PANO_CHANNELS * SECTOR_COUNT


def ring_from_descriptor(descriptor: np.ndarray) -> np.ndarray:
    """Reshape a node descriptor back to the (PANO_CHANNELS, 24) ring."""
    if descriptor.size != DESCRIPTOR_LEN:
        raise ValueError(f"descriptor length {descriptor.size} != {DESCRIPTOR_LEN}")
    return np.asarray(descriptor, dtype=float).reshape(PANO_CHANNELS, SECTOR_COUNT)


@dataclass
class ExplorationTrajectory:
    """Dense exploration walk: one (Pose, Panorama) entry per executed action."""

    steps: list[tuple[Pose, Panorama]] = field(default_factory=list)

    def positions(self) -> np.ndarray:
        return np.array([(p.x, p.y) for p, _ in self.steps])

    def __len__(self) -> int:
        return len(self.steps)


class TraversabilityGrid:
    """Immutable occupancy grid with named landmark and room regions.

    ``free[cy][cx]`` is True for traversable cells. Out-of-bounds space is
    treated as blocked everywhere (rays, walls, line of sight).
    """

    def __init__(
        self,
        free: np.ndarray,
        cell_size: float = 0.25,
        landmarks: list[Landmark] | None = None,
        rooms: list[Room] | None = None,
    ):
        if cell_size <= 0:
            raise ValueError("cell_size must be positive")
        self.free = np.asarray(free, dtype=bool)
        self.free.setflags(write=False)
        self.height, self.width = self.free.shape
        self.cell_size = float(cell_size)
        self.landmarks = list(landmarks or [])
        self.rooms = list(rooms or [])
        if not self.free.any():
            raise ValueError("grid has no FREE cell")
        for lm in self.landmarks:
            self._check_region(lm.region, f"landmark {lm.name!r}")
        for room in self.rooms:
            self._check_region(room.region, f"room {room.name!r}")
        # per-cell landmark class, LANDMARK_NONE where no region covers the cell
        self._landmark_grid = np.full((self.height, self.width), LANDMARK_NONE, dtype=int)
        for lm in self.landmarks:
            x0, y0, x1, y1 = lm.region
            self._landmark_grid[y0 : y1 + 1, x0 : x1 + 1] = lm.class_id
        self._landmark_grid.setflags(write=False)

    def _check_region(self, region: tuple[int, int, int, int], what: str) -> None:
        x0, y0, x1, y1 = region
        if not (0 <= x0 <= x1 < self.width and 0 <= y0 <= y1 < self.height):
            raise ValueError(f"{what} region {region} outside {self.width}x{self.height} grid")
        if not self.free[y0 : y1 + 1, x0 : x1 + 1].all():
            raise ValueError(f"{what} region {region} covers BLOCKED cells")

    # -- cell queries ----------------------------------------------------

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        return (int(math.floor(x / self.cell_size)), int(math.floor(y / self.cell_size)))

    def cell_center(self, cx: int, cy: int) -> tuple[float, float]:
        return ((cx + 0.5) * self.cell_size, (cy + 0.5) * self.cell_size)

    def in_bounds(self, x: float, y: float) -> bool:
        return 0.0 <= x < self.width * self.cell_size and 0.0 <= y < self.height * self.cell_size

    def is_free_cell(self, cx: int, cy: int) -> bool:
        if 0 <= cx < self.width and 0 <= cy < self.height:
            return bool(self.free[cy, cx])
        return False

    def is_free_point(self, x: float, y: float) -> bool:
        return self.in_bounds(x, y) and self.is_free_cell(*self.cell_of(x, y))

    def near_wall(self, cx: int, cy: int) -> bool:
        """True if any 8-neighbor (or out-of-bounds space) around the cell is blocked."""
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if (dx or dy) and not self.is_free_cell(cx + dx, cy + dy):
                    return True
        return False

    def landmark_class_at(self, cx: int, cy: int) -> int:
        if 0 <= cx < self.width and 0 <= cy < self.height:
            return int(self._landmark_grid[cy, cx])
        return LANDMARK_NONE

    def rooms_at(self, x: float, y: float) -> list[Room]:
        cx, cy = self.cell_of(x, y)
        return [
            r for r in self.rooms if r.region[0] <= cx <= r.region[2] and r.region[1] <= cy <= r.region[3]
        ]

    def free_cell_list(self) -> list[tuple[int, int]]:
        """All FREE cells in deterministic (cx, cy) lexicographic order."""
        ys, xs = np.nonzero(self.free)
        cells = sorted(zip(xs.tolist(), ys.tolist()))
        return cells

    def free_component(self) -> list[tuple[int, int]]:
        """Largest 8-connected component of FREE cells, lexicographically sorted."""
        seen: set[tuple[int, int]] = set()
        best: list[tuple[int, int]] = []
        for start in self.free_cell_list():
            if start in seen:
                continue
            comp = [start]
            seen.add(start)
            stack = [start]
            while stack:
                cx, cy = stack.pop()
                for dx, dy in _NEIGHBOR_OFFSETS:
                    nxt = (cx + dx, cy + dy)
                    if nxt not in seen and self.is_free_cell(*nxt):
                        seen.add(nxt)
                        comp.append(nxt)
                        stack.append(nxt)
            if len(comp) > len(best):
                best = comp
        return sorted(best)


def load_environment(spec_text: str) -> TraversabilityGrid:
    """Parse the ENV v1 text format into a TraversabilityGrid.

    Line 1: ``ENV v1 <width> <height> <cell_size>``. Then ``height`` rows of
    ``.`` (free) / ``#`` (blocked), first row northernmost. Then any number of
    ``LANDMARK <class_id> <name> <x0> <y0> <x1> <y1>`` and
    ``ROOM <name> <x0> <y0> <x1> <y1>`` lines (inclusive cell rectangles in
    world cell coordinates, origin at the south-west corner).
    """
    lines = spec_text.splitlines()
    if not lines:
        raise EnvironmentParseError("line 1: empty environment file")
    header = lines[0].split()
    if len(header) != 5 or header[0] != "ENV" or header[1] != "v1":
        raise EnvironmentParseError(f"line 1: expected 'ENV v1 <width> <height> <cell_size>', got {lines[0]!r}")
    try:
        width, height = int(header[2]), int(header[3])
        cell_size = float(header[4])
    except ValueError as exc:
        raise EnvironmentParseError(f"line 1: bad header numbers: {exc}") from exc
    if width <= 0 or height <= 0 or cell_size <= 0:
        raise EnvironmentParseError("line 1: dimensions and cell size must be positive")
    if len(lines) < 1 + height:
        raise EnvironmentParseError(f"line {len(lines)}: expected {height} grid rows, file ended early")

    free = np.zeros((height, width), dtype=bool)
    for r in range(height):
        row = lines[1 + r].rstrip("\n")
        if len(row) != width:
            raise EnvironmentParseError(f"line {2 + r}: row has {len(row)} cells, expected {width}")
        for cx, ch in enumerate(row):
            if ch == ".":
                free[height - 1 - r, cx] = True
            elif ch != "#":
                raise EnvironmentParseError(f"line {2 + r}: invalid cell character {ch!r}")

    landmarks: list[Landmark] = []
    rooms: list[Room] = []
    for idx in range(1 + height, len(lines)):
        line = lines[idx].strip()
        if not line:
            continue
        parts = line.split()
        lineno = idx + 1
        try:
            if parts[0] == "LANDMARK":
                if len(parts) != 7:
                    raise ValueError("expected LANDMARK <class_id> <name> <x0> <y0> <x1> <y1>")
                class_id = int(parts[1])
                if not 0 <= class_id < LANDMARK_CLASSES:
                    raise ValueError(f"landmark class_id must be in [0, {LANDMARK_CLASSES})")
                landmarks.append(Landmark(class_id, parts[2], tuple(int(v) for v in parts[3:7])))
            elif parts[0] == "ROOM":
                if len(parts) != 6:
                    raise ValueError("expected ROOM <name> <x0> <y0> <x1> <y1>")
                rooms.append(Room(parts[1], tuple(int(v) for v in parts[2:6])))
            else:
                raise ValueError(f"unknown directive {parts[0]!r}")
        except ValueError as exc:
            raise EnvironmentParseError(f"line {lineno}: {exc}") from exc

    try:
        return TraversabilityGrid(free, cell_size, landmarks, rooms)
    except ValueError as exc:
        raise EnvironmentParseError(f"line 1: {exc}") from exc


def load_environment_file(path) -> TraversabilityGrid:
    with open(path, encoding="utf-8") as fh:
        return load_environment(fh.read())


# -- segment traversal ----------------------------------------------------


def _segment_cells(grid: TraversabilityGrid, p1, p2):
    """Supercover traversal: yield every cell the open segment p1->p2 touches.

    At exact corner crossings both edge-adjacent cells are yielded as well, so
    a segment cannot slip between two blocked cells meeting at a corner.
    """
    cs = grid.cell_size
    ax, ay = p1[0] / cs, p1[1] / cs
    bx, by = p2[0] / cs, p2[1] / cs
    cx, cy = int(math.floor(ax)), int(math.floor(ay))
    ex, ey = int(math.floor(bx)), int(math.floor(by))
    yield (cx, cy)
    dx, dy = bx - ax, by - ay
    if dx == 0.0 and dy == 0.0:
        return
    sx = 1 if dx > 0 else -1
    sy = 1 if dy > 0 else -1
    inv_dx = abs(1.0 / dx) if dx != 0.0 else math.inf
    inv_dy = abs(1.0 / dy) if dy != 0.0 else math.inf
    # parametric position (in t of the segment) of the next vertical/horizontal line
    t_max_x = ((cx + (sx > 0)) - ax) / dx if dx != 0.0 else math.inf
    t_max_y = ((cy + (sy > 0)) - ay) / dy if dy != 0.0 else math.inf
    while min(t_max_x, t_max_y) <= 1.0 + _CORNER_EPS:
        if abs(t_max_x - t_max_y) < _CORNER_EPS:
            yield (cx + sx, cy)
            yield (cx, cy + sy)
            cx += sx
            cy += sy
            t_max_x += inv_dx
            t_max_y += inv_dy
        elif t_max_x < t_max_y:
            cx += sx
            t_max_x += inv_dx
        else:
            cy += sy
            t_max_y += inv_dy
        yield (cx, cy)
        if (cx, cy) == (ex, ey):
            return
    if (cx, cy) != (ex, ey):
        yield (ex, ey)  # endpoint exactly on a boundary never crossed


def line_of_sight(grid: TraversabilityGrid, p1, p2) -> bool:
    """True iff the segment p1->p2 touches only FREE cells (both points in bounds)."""
    if not (grid.in_bounds(*p1) and grid.in_bounds(*p2)):
        raise SimulationError(f"line_of_sight endpoints must be in bounds: {p1}, {p2}")
    for cell in _segment_cells(grid, p1, p2):
        if not grid.is_free_cell(*cell):
            return False
    return True


# -- kinematics ------------------------------------------------------------


def step(grid: TraversabilityGrid, pose: Pose, action: AgentAction) -> Pose:
    """One discrete action: rotate +/-15 degrees or move 0.25 m along heading.

    A FORWARD whose destination cell is BLOCKED (or out of bounds) is a no-op.
    """
    if action is AgentAction.ROTATE_LEFT:
        return Pose(pose.x, pose.y, (pose.heading + ROTATE_STEP_DEG) % 360.0)
    if action is AgentAction.ROTATE_RIGHT:
        return Pose(pose.x, pose.y, (pose.heading - ROTATE_STEP_DEG) % 360.0)
    dx, dy = bearing_vector(pose.heading)
    nx, ny = pose.x + FORWARD_STEP * dx, pose.y + FORWARD_STEP * dy
    if not grid.is_free_point(nx, ny):
        return pose
    return Pose(nx, ny, pose.heading)


# -- panoramas -------------------------------------------------------------


def _cast_ray(grid: TraversabilityGrid, x: float, y: float, bearing_deg: float):
    """March a ray; return (depth clipped to DEPTH_MAX, first landmark class entered)."""
    dx, dy = bearing_vector(bearing_deg)
    cs = grid.cell_size
    ax, ay = x / cs, y / cs
    cx, cy = int(math.floor(ax)), int(math.floor(ay))
    landmark = grid.landmark_class_at(cx, cy)
    sx = 1 if dx > 0 else -1
    sy = 1 if dy > 0 else -1
    inv_dx = cs * abs(1.0 / dx) if dx != 0.0 else math.inf
    inv_dy = cs * abs(1.0 / dy) if dy != 0.0 else math.inf
    # t is distance in meters along the ray to the next cell boundary
    t_max_x = cs * (((cx + (sx > 0)) - ax) / dx) if dx != 0.0 else math.inf
    t_max_y = cs * (((cy + (sy > 0)) - ay) / dy) if dy != 0.0 else math.inf
    while True:
        corner = abs(t_max_x - t_max_y) < _CORNER_EPS
        if corner:
            t_entry = t_max_x
            side_cells = ((cx + sx, cy), (cx, cy + sy))
            cx += sx
            cy += sy
            t_max_x += inv_dx
            t_max_y += inv_dy
        elif t_max_x < t_max_y:
            t_entry = t_max_x
            side_cells = ()
            cx += sx
            t_max_x += inv_dx
        else:
            t_entry = t_max_y
            side_cells = ()
            cy += sy
            t_max_y += inv_dy
        if t_entry >= DEPTH_MAX:
            return DEPTH_MAX, landmark
        for cell in (*side_cells, (cx, cy)):
            if not grid.is_free_cell(*cell):
                return t_entry, landmark
        if landmark == LANDMARK_NONE:
            landmark = grid.landmark_class_at(cx, cy)


def render_panorama(grid: TraversabilityGrid, pose: Pose) -> Panorama:
    """Globally aligned 24-sector (depth, landmark) ring; independent of heading.

    The agent's own cell counts as "entered" for landmark visibility, so an
    agent standing inside a landmark region reports it in every sector.
    """
    if not grid.is_free_point(pose.x, pose.y):
        raise SimulationError(f"cannot render panorama from blocked position ({pose.x}, {pose.y})")
    depth = np.empty(SECTOR_COUNT)
    landmark = np.empty(SECTOR_COUNT, dtype=int)
    for i in range(SECTOR_COUNT):
        d, cls = _cast_ray(grid, pose.x, pose.y, i * SECTOR_DEG)
        depth[i] = d
        landmark[i] = cls
    return Panorama(depth, landmark)


# -- shortest paths ----------------------------------------------------------

_NEIGHBOR_OFFSETS = (
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
)


def shortest_path(grid: TraversabilityGrid, p1, p2, wall_penalty: float = 0.0):
    """Lowest-cost 8-connected cell-center path from p1's cell to p2's cell.

    Edge weight is the Euclidean cell distance plus ``wall_penalty`` when the
    destination cell has a blocked 8-neighbor. Diagonal moves may not cut
    corners (both orthogonally adjacent cells must be free). Ties are resolved
    by expanding lower (cx, cy) first, so paths are deterministic.

    Returns ``(points, cost)`` where points are cell centers in meters. The
    degenerate ``p1 == p2`` case returns ``([p1], 0.0)``.
    """
    if not grid.is_free_point(*p1) or not grid.is_free_point(*p2):
        raise SimulationError(f"shortest_path endpoints must lie on FREE cells: {p1}, {p2}")
    if tuple(p1) == tuple(p2):
        return [tuple(p1)], 0.0
    start = grid.cell_of(*p1)
    goal = grid.cell_of(*p2)
    if start == goal:
        return [grid.cell_center(*start)], 0.0

    cs = grid.cell_size
    diag = math.sqrt(2.0) * cs
    dist: dict[tuple[int, int], float] = {start: 0.0}
    parent: dict[tuple[int, int], tuple[int, int]] = {}
    heap: list[tuple[float, int, int]] = [(0.0, start[0], start[1])]
    done: set[tuple[int, int]] = set()
    while heap:
        d, cx, cy = heapq.heappop(heap)
        cell = (cx, cy)
        if cell in done:
            continue
        done.add(cell)
        if cell == goal:
            break
        for dx, dy in _NEIGHBOR_OFFSETS:
            nxt = (cx + dx, cy + dy)
            if not grid.is_free_cell(*nxt):
                continue
            if dx and dy and not (grid.is_free_cell(cx + dx, cy) and grid.is_free_cell(cx, cy + dy)):
                continue
            w = diag if (dx and dy) else cs
            if wall_penalty and grid.near_wall(*nxt):
                w += wall_penalty
            nd = d + w
            if nd < dist.get(nxt, math.inf):
                dist[nxt] = nd
                parent[nxt] = cell
                heapq.heappush(heap, (nd, nxt[0], nxt[1]))
    if goal not in done:
        raise NoPathError(f"no path between cells {start} and {goal}")

    cells = [goal]
    while cells[-1] != start:
        cells.append(parent[cells[-1]])
    cells.reverse()
    return [grid.cell_center(*c) for c in cells], dist[goal]


# -- exploration -------------------------------------------------------------


def _rotation_toward(heading: float, target: float) -> AgentAction:
    """Single rotation step moving heading toward target along the shorter arc."""
    diff = (target - heading) % 360.0
    if diff == 0.0:
        raise ValueError("already facing target")
    return AgentAction.ROTATE_LEFT if diff <= 180.0 else AgentAction.ROTATE_RIGHT

_ARRIVE_TOL = 0.2
_MAX_ACTIONS_PER_VERTEX = 40


def _walk_to(grid: TraversabilityGrid, pose: Pose, target, record) -> Pose:
    """Drive to a nearby vertex with quantized rotations and FORWARD steps."""
    for _ in range(_MAX_ACTIONS_PER_VERTEX):
        dx, dy = target[0] - pose.x, target[1] - pose.y
        if math.hypot(dx, dy) <= _ARRIVE_TOL:
            break
        desired = quantize_heading(ccw_bearing_deg(dx, dy))
        if pose.heading != desired:
            action = _rotation_toward(pose.heading, desired)
        else:
            action = AgentAction.FORWARD
        new_pose = step(grid, pose, action)
        if new_pose == pose:
            break  # blocked FORWARD; give up on this vertex
        pose = new_pose
        record(pose)
    return pose


def sample_exploration_trajectories(
    grid: TraversabilityGrid,
    n: int,
    seed: int,
    waypoints_per_trajectory: int = 6,
) -> list[ExplorationTrajectory]:
    """n dense exploration trajectories, each chaining uniformly sampled waypoints.

    Waypoints are drawn from the largest connected FREE component (so they are
    mutually reachable) and joined by wall-averse shortest paths discretized to
    FORWARD / ROTATE steps. Deterministic per (seed, trajectory index).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if waypoints_per_trajectory < 4:
        raise ValueError("need at least 4 waypoints per trajectory")
    component = grid.free_component()
    if len(component) < 4:
        raise SimulationError("grid needs at least 4 mutually reachable FREE cells")

    trajectories = []
    for idx in range(n):
        rng = np.random.default_rng([seed, idx])
        choice = rng.choice(len(component), size=waypoints_per_trajectory, replace=False)
        waypoints = [grid.cell_center(*component[int(i)]) for i in choice]
        traj = ExplorationTrajectory()
        pose = Pose(waypoints[0][0], waypoints[0][1], 0.0)
        traj.steps.append((pose, render_panorama(grid, pose)))

        def record(p: Pose, t=traj) -> None:
            prev_pose, prev_pano = t.steps[-1]
            # rotations keep the position; the globally aligned panorama is unchanged
            if (p.x, p.y) == (prev_pose.x, prev_pose.y):
                t.steps.append((p, prev_pano))
            else:
                t.steps.append((p, render_panorama(grid, p)))

        for target in waypoints[1:]:
            vertices, _ = shortest_path(grid, pose.position, target, wall_penalty=1.0)
            for vertex in vertices:
                pose = _walk_to(grid, pose, vertex, record)
        trajectories.append(traj)
    return trajectories
