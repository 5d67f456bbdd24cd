"""Topological map construction: reachability-driven sparsification, merging, polar edges.

A map is a directed graph whose nodes carry observation descriptors and whose
edges carry quantized polar categories (8 compass directions x 3 distance
bins). Construction uses ground-truth positions; the planner-facing view
(:meth:`TopoMap.planner_view`) deliberately omits them so nothing downstream
of a saved map can depend on metric coordinates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .gridworld import ExplorationTrajectory, TraversabilityGrid, compass_bearing_deg, line_of_sight

MAP_FORMAT = "topomap.v1"
DIRECTION_COUNT = 8
DISTANCE_BIN_EDGES = (2.0, 5.0)
CATEGORY_COUNT = DIRECTION_COUNT * 3


class MapFormatError(ValueError):
    """Raised on malformed or wrong-version map documents."""


@dataclass(frozen=True)
class EdgeCategory:
    """Quantized polar edge label: compass direction bin and distance bin."""

    direction: int  # 0..7, compass N=0, NE=1, ... NW=7
    distance_bin: int  # 0: [0,2) m, 1: [2,5) m, 2: [5,inf) m

    def __post_init__(self) -> None:
        if not (0 <= self.direction < DIRECTION_COUNT and 0 <= self.distance_bin < 3):
            raise ValueError(f"invalid edge category ({self.direction}, {self.distance_bin})")

    @property
    def index(self) -> int:
        return self.direction * 3 + self.distance_bin

    @classmethod
    def from_index(cls, index: int) -> "EdgeCategory":
        if not 0 <= index < CATEGORY_COUNT:
            raise ValueError(f"edge category index {index} out of range")
        return cls(index // 3, index % 3)

    def reverse(self) -> "EdgeCategory":
        """Category of the opposite edge: direction rotated 180 degrees, same bin."""
        return EdgeCategory((self.direction + 4) % DIRECTION_COUNT, self.distance_bin)


def quantize_edge(displacement) -> EdgeCategory:
    """Polar category of a nonzero displacement vector (meters, x east / y north).

    Direction bins are half-open, centered on the compass bearings 0, 45, ...,
    315 degrees; a boundary bearing joins the bin above it (22.5 -> NE).
    Distance 2.0 falls in the [2,5) bin.
    """
    dx, dy = float(displacement[0]), float(displacement[1])
    dist = math.hypot(dx, dy)
    if dist == 0.0:
        raise ValueError("zero displacement has no polar category (self-edge)")
    compass = compass_bearing_deg(dx, dy)
    direction = int(((compass + 22.5) % 360.0) // 45.0) % DIRECTION_COUNT
    if dist < DISTANCE_BIN_EDGES[0]:
        distance_bin = 0
    elif dist < DISTANCE_BIN_EDGES[1]:
        distance_bin = 1
    else:
        distance_bin = 2
    return EdgeCategory(direction, distance_bin)


@dataclass
class TopoNode:
    id: int
    descriptor: np.ndarray
    debug_position: tuple[float, float]  # construction/evaluation only, never planner input


@dataclass(frozen=True)
class ReachabilityParams:
    d_sp: float = 4.0
    p_sparse: float = 0.0
    p_merge: float = 0.5

    def __post_init__(self) -> None:
        if self.d_sp <= 0:
            raise ValueError("d_sp must be positive")
        if not 0.0 <= self.p_sparse < self.p_merge <= 1.0:
            raise ValueError("need 0 <= p_sparse < p_merge <= 1")


@dataclass
class PlannerMapView:
    """What the planner is allowed to see: descriptors and categorized edges only."""

    descriptors: np.ndarray  # (n, descriptor_len)
    edge_src: np.ndarray  # (m,) int
    edge_dst: np.ndarray  # (m,) int
    edge_category: np.ndarray  # (m,) int in [0, 24)

    @property
    def num_nodes(self) -> int:
        return self.descriptors.shape[0]


class TopoMap:
    """Directed topological graph (u, V, E) with quantized polar edge labels.

    ``u`` is the placeholder id of the global token (its feature is learned by
    the encoder, the map itself carries no global content). Edges always come
    in reverse pairs whose directions differ by 4 (mod 8).
    """

    def __init__(self, nodes: list[TopoNode], edges: list[tuple[int, int, EdgeCategory]], u: int = 0):
        self.u = u
        self.nodes = nodes
        self.edges = edges
        self.validate()

    def validate(self) -> None:
        n = len(self.nodes)
        if [node.id for node in self.nodes] != list(range(n)):
            raise ValueError("node ids must be dense and in order")
        lengths = {len(node.descriptor) for node in self.nodes}
        if len(lengths) > 1:
            raise ValueError(f"descriptor lengths differ: {sorted(lengths)}")
        directed = {(src, dst): cat for src, dst, cat in self.edges}
        if len(directed) != len(self.edges):
            raise ValueError("duplicate directed edges")
        for src, dst, cat in self.edges:
            if src == dst:
                raise ValueError(f"self-edge at node {src}")
            if not (0 <= src < n and 0 <= dst < n):
                raise ValueError(f"edge ({src}, {dst}) references missing node")
            rev = directed.get((dst, src))
            if rev is None or rev != cat.reverse():
                raise ValueError(f"edge ({src}, {dst}) lacks a consistent reverse edge")

    @property
    def descriptor_len(self) -> int:
        return len(self.nodes[0].descriptor) if self.nodes else 0

    def positions(self) -> np.ndarray:
        return np.array([node.debug_position for node in self.nodes])

    def neighbors(self, node_id: int) -> list[int]:
        return sorted(dst for src, dst, _ in self.edges if src == node_id)

    def planner_view(self) -> PlannerMapView:
        descriptors = np.array([node.descriptor for node in self.nodes])
        src = np.array([e[0] for e in self.edges], dtype=int)
        dst = np.array([e[1] for e in self.edges], dtype=int)
        cat = np.array([e[2].index for e in self.edges], dtype=int)
        return PlannerMapView(descriptors, src, dst, cat)


def reachability(grid: TraversabilityGrid, p1, p2, d_sp: float = 4.0) -> float:
    """Oracle reachability: line-of-sight gate times the linear distance falloff."""
    if not line_of_sight(grid, p1, p2):
        return 0.0
    dist = math.hypot(p2[0] - p1[0], p2[1] - p1[1])
    return max((d_sp - dist) / d_sp, 0.0)


def sparsify_trajectory(grid: TraversabilityGrid, traj, params: ReachabilityParams) -> list[int]:
    """Greedy trajectory sparsification; returns kept indices.

    From the current kept index i, keep the maximal j such that every
    intermediate position k in (i, j] satisfies RE(p_i, p_k) > p_sparse. The
    final position is always kept. Accepts an ExplorationTrajectory or an
    (n, 2) array of positions.
    """
    positions = traj.positions() if isinstance(traj, ExplorationTrajectory) else np.asarray(traj, dtype=float)
    n = len(positions)
    if n == 0:
        raise ValueError("empty trajectory")
    kept = [0]
    i = 0
    while i < n - 1:
        j = i
        for k in range(i + 1, n):
            if reachability(grid, positions[i], positions[k], params.d_sp) > params.p_sparse:
                j = k
            else:
                break
        if j == i:
            j = i + 1  # no reachable successor; keep the next position to guarantee progress
        kept.append(j)
        i = j
    return kept


def _reachability_matrix(grid: TraversabilityGrid, positions: np.ndarray, d_sp: float) -> np.ndarray:
    """Dense symmetric RE matrix over node positions (diagonal forced to 0)."""
    n = len(positions)
    re = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            dist = math.hypot(*(positions[j] - positions[i]))
            if dist >= d_sp:
                continue
            if line_of_sight(grid, positions[i], positions[j]):
                re[i, j] = re[j, i] = (d_sp - dist) / d_sp
    return re


def _materialize(nodes: list[TopoNode], pairs: set[tuple[int, int]]) -> TopoMap:
    """Build a TopoMap from undirected node pairs, deriving both edge directions.

    The forward category is quantized from the ground-truth displacement and
    the reverse is its 180-degree rotation, which makes the reverse-edge
    invariant hold by construction.
    """
    edges: list[tuple[int, int, EdgeCategory]] = []
    for i, j in sorted(pairs):
        disp = (
            nodes[j].debug_position[0] - nodes[i].debug_position[0],
            nodes[j].debug_position[1] - nodes[i].debug_position[1],
        )
        if disp == (0.0, 0.0):
            continue  # coincident nodes have no polar direction; node merging absorbs them
        cat = quantize_edge(disp)
        edges.append((i, j, cat))
        edges.append((j, i, cat.reverse()))
    edges.sort(key=lambda e: (e[0], e[1]))
    return TopoMap(nodes, edges)


def merge_graphs(grid: TraversabilityGrid, graphs: list[TopoMap], params: ReachabilityParams) -> TopoMap:
    """Disjoint union of maps plus every intra- and cross-graph edge with RE > p_sparse."""
    if not graphs:
        raise ValueError("merge_graphs needs at least one graph")
    lengths = {g.descriptor_len for g in graphs}
    if len(lengths) > 1:
        raise ValueError(f"graphs disagree on descriptor length: {sorted(lengths)}")
    nodes: list[TopoNode] = []
    pairs: set[tuple[int, int]] = set()
    for g in graphs:
        offset = len(nodes)
        for node in g.nodes:
            nodes.append(TopoNode(offset + node.id, node.descriptor, node.debug_position))
        pairs.update((offset + min(s, d), offset + max(s, d)) for s, d, _ in g.edges)
    positions = np.array([node.debug_position for node in nodes])
    re = _reachability_matrix(grid, positions, params.d_sp)
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            if re[i, j] > params.p_sparse:
                pairs.add((i, j))
    return _materialize(nodes, pairs)


def merge_nodes(grid: TraversabilityGrid, topo: TopoMap, params: ReachabilityParams) -> TopoMap:
    """Collapse node pairs with RE > p_merge until none remain (lowest ids first).

    The surviving node keeps the lower id's descriptor and position. Neighbors
    of either node stay connected to the survivor only while their reachability
    from the survivor's position exceeds p_sparse.
    """
    positions = topo.positions()
    re = _reachability_matrix(grid, positions, params.d_sp) if len(topo.nodes) else np.zeros((0, 0))
    alive = list(range(len(topo.nodes)))
    neighbor: dict[int, set[int]] = {i: set() for i in alive}
    for src, dst, _ in topo.edges:
        neighbor[src].add(dst)

    while True:
        pair = next(
            (
                (i, j)
                for a, i in enumerate(alive)
                for j in alive[a + 1 :]
                if re[i, j] > params.p_merge
            ),
            None,
        )
        if pair is None:
            break
        i, j = pair
        merged = (neighbor[i] | neighbor[j]) - {i, j}
        neighbor[i] = {k for k in merged if re[i, k] > params.p_sparse}
        del neighbor[j]
        alive.remove(j)
        for k in alive:
            if k == i:
                continue
            neighbor[k].discard(j)
            if k in neighbor[i]:
                neighbor[k].add(i)
            else:
                neighbor[k].discard(i)

    remap = {old: new for new, old in enumerate(alive)}
    nodes = [TopoNode(remap[old], topo.nodes[old].descriptor, topo.nodes[old].debug_position) for old in alive]
    pairs = {
        (min(remap[a], remap[b]), max(remap[a], remap[b]))
        for a in alive
        for b in neighbor[a]
    }
    return _materialize(nodes, pairs)


def build_map(
    grid: TraversabilityGrid,
    trajectories: list[ExplorationTrajectory],
    params: ReachabilityParams = ReachabilityParams(),
) -> TopoMap:
    """Full pipeline: sparsify each trajectory, chain, merge graphs, merge nodes."""
    if not trajectories:
        raise ValueError("build_map needs at least one trajectory")
    chains: list[TopoMap] = []
    for traj in trajectories:
        kept = sparsify_trajectory(grid, traj, params)
        nodes = [
            TopoNode(idx, traj.steps[k][1].descriptor(), (traj.steps[k][0].x, traj.steps[k][0].y))
            for idx, k in enumerate(kept)
        ]
        pairs = {
            (a, a + 1)
            for a in range(len(nodes) - 1)
            if nodes[a].debug_position != nodes[a + 1].debug_position
        }
        chains.append(_materialize(nodes, pairs))
    merged = merge_graphs(grid, chains, params)
    return merge_nodes(grid, merged, params)


def nearest_node(topo: TopoMap, position) -> tuple[int, float]:
    """Closest node by Euclidean distance to debug positions; ties pick the lower id."""
    if not topo.nodes:
        raise ValueError("map has no nodes")
    best_id, best_d = 0, math.inf
    for node in topo.nodes:
        d = math.hypot(position[0] - node.debug_position[0], position[1] - node.debug_position[1])
        if d < best_d:
            best_id, best_d = node.id, d
    return best_id, best_d


def save_map(topo: TopoMap, path) -> None:
    """Write the versioned JSON document; floats round-trip exactly via repr."""
    doc = {
        "format": MAP_FORMAT,
        "descriptor_len": topo.descriptor_len,
        "nodes": [
            {
                "id": node.id,
                "descriptor": [float(v) for v in node.descriptor],
                "debug_position": [float(node.debug_position[0]), float(node.debug_position[1])],
            }
            for node in topo.nodes
        ],
        "edges": [{"src": src, "dst": dst, "category": cat.index} for src, dst, cat in topo.edges],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, separators=(",", ":"))
        fh.write("\n")


def load_map(path) -> TopoMap:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MapFormatError(f"malformed map document: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != MAP_FORMAT:
        raise MapFormatError(f"unsupported map format {doc.get('format')!r}, expected {MAP_FORMAT!r}")
    try:
        nodes = [
            TopoNode(int(n["id"]), np.array(n["descriptor"], dtype=float), tuple(n["debug_position"]))
            for n in doc["nodes"]
        ]
        edges = [
            (int(e["src"]), int(e["dst"]), EdgeCategory.from_index(int(e["category"])))
            for e in doc["edges"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise MapFormatError(f"malformed map document: {exc}") from exc
    topo = TopoMap(nodes, edges)
    if topo.descriptor_len != doc["descriptor_len"]:
        raise MapFormatError("descriptor_len disagrees with node descriptors")
    return topo
