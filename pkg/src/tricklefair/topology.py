"""Node layouts and radio adjacency for Trickle networks.

A topology is an undirected graph over nodes 0..N-1. It is built either from
2D geometry with a unit-disk rule (nodes are linked when their distance is at
most the radio range) or from an explicit edge list when no coordinates are
available.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

# The unit-disk test is inclusive with a tiny relative slack so that exact
# radii such as sqrt(2) on an integer grid keep their boundary pairs despite
# floating-point rounding.
RANGE_SLACK = 1e-12


class TopologyError(ValueError):
    """Malformed topology file or inconsistent adjacency input."""


@dataclass(frozen=True, eq=False)
class Topology:
    """Immutable undirected graph with optional 2D node positions.

    neighbor_lists holds, for each node id, the sorted tuple of its radio
    neighbors. positions is an (N, 2) float array or None for edge-list-only
    topologies. radio_range is the disk radius the edges were derived from,
    or None when edges were given explicitly.
    """

    neighbor_lists: tuple[tuple[int, ...], ...]
    positions: np.ndarray | None = None
    radio_range: float | None = None

    @property
    def n(self) -> int:
        return len(self.neighbor_lists)

    def neighbors(self, node: int) -> tuple[int, ...]:
        return self.neighbor_lists[node]

    def degree(self, node: int) -> int:
        return len(self.neighbor_lists[node])

    @property
    def degrees(self) -> np.ndarray:
        return np.array([len(nl) for nl in self.neighbor_lists], dtype=int)

    @property
    def mean_degree(self) -> float:
        return float(self.degrees.mean())

    @property
    def num_edges(self) -> int:
        return sum(len(nl) for nl in self.neighbor_lists) // 2

    @property
    def edges(self) -> list[tuple[int, int]]:
        """Sorted list of unordered edges as (low id, high id) pairs."""
        return [(i, j) for i in range(self.n) for j in self.neighbor_lists[i] if i < j]

    @property
    def has_positions(self) -> bool:
        return self.positions is not None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Topology):
            return NotImplemented
        if self.n != other.n or self.radio_range != other.radio_range:
            return False
        if self.neighbor_lists != other.neighbor_lists:
            return False
        if (self.positions is None) != (other.positions is None):
            return False
        if self.positions is None:
            return True
        return bool(np.array_equal(self.positions, other.positions))

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges,
        positions: np.ndarray | None = None,
    ) -> "Topology":
        """Build a topology from an explicit list of undirected edges.

        Edges may appear in either orientation and more than once; they are
        normalized to a symmetric, irreflexive adjacency. Self loops and ids
        outside 0..n-1 are rejected.
        """
        if n < 1:
            raise TopologyError("topology needs at least one node")
        adjacency: list[set[int]] = [set() for _ in range(n)]
        for edge in edges:
            i, j = int(edge[0]), int(edge[1])
            if not (0 <= i < n and 0 <= j < n):
                raise TopologyError(f"edge [{i}, {j}] references a node id outside 0..{n - 1}")
            if i == j:
                raise TopologyError(f"edge [{i}, {j}] is a self loop")
            adjacency[i].add(j)
            adjacency[j].add(i)
        neighbor_lists = tuple(tuple(sorted(adj)) for adj in adjacency)
        if positions is not None:
            positions = _check_positions(positions, n)
        return cls(neighbor_lists, positions, None)

    @classmethod
    def from_positions(cls, positions, radio_range: float) -> "Topology":
        """Build a unit-disk topology: edge iff distance <= radio_range."""
        pos = _check_positions(positions, None)
        if radio_range <= 0:
            raise TopologyError("radio range must be positive")
        n = pos.shape[0]
        limit = radio_range * radio_range * (1.0 + RANGE_SLACK)
        adjacency: list[list[int]] = [[] for _ in range(n)]
        for i in range(n):
            d2 = np.sum((pos[i + 1 :] - pos[i]) ** 2, axis=1)
            for off in np.nonzero(d2 <= limit)[0]:
                j = i + 1 + int(off)
                adjacency[i].append(j)
                adjacency[j].append(i)
        neighbor_lists = tuple(tuple(sorted(adj)) for adj in adjacency)
        return cls(neighbor_lists, pos, float(radio_range))


def _check_positions(positions, n: int | None) -> np.ndarray:
    pos = np.asarray(positions, dtype=float)
    if pos.ndim != 2 or pos.shape[1] != 2:
        raise TopologyError("positions must be an (N, 2) array")
    if n is not None and pos.shape[0] != n:
        raise TopologyError(f"got {pos.shape[0]} positions for {n} nodes")
    if pos.shape[0] < 1:
        raise TopologyError("topology needs at least one node")
    if not np.all(np.isfinite(pos)):
        raise TopologyError("positions must be finite")
    return pos


def generate_grid(rows: int, cols: int, spacing: float = 1.0, radio_range: float = 1.0) -> Topology:
    """Regular rows x cols grid with row-major ids and unit-disk edges.

    Node r*cols + c sits at (r*spacing, c*spacing). With spacing 1 and
    radio_range sqrt(2) the diagonals are included, which on a 7x7 grid gives
    degrees 3 (corners), 5 (edges) and 8 (interior).
    """
    if rows < 1 or cols < 1:
        raise TopologyError("rows and cols must be positive")
    if spacing <= 0:
        raise TopologyError("spacing must be positive")
    positions = np.array(
        [(r * spacing, c * spacing) for r in range(rows) for c in range(cols)], dtype=float
    )
    return Topology.from_positions(positions, radio_range)


def generate_random_udg(n: int, side: float, radio_range: float, seed: int) -> Topology:
    """Random unit-disk topology: n nodes placed i.i.d. uniformly in [0, side]^2.

    Deterministic for a fixed seed. Use the reported mean degree to tune side
    and radio_range toward a target density.
    """
    if n < 1:
        raise TopologyError("topology needs at least one node")
    if side <= 0:
        raise TopologyError("side must be positive")
    rng = np.random.default_rng(seed)
    positions = rng.uniform(0.0, side, size=(n, 2))
    return Topology.from_positions(positions, radio_range)


def save_topology(topology: Topology, path) -> None:
    """Write a topology as JSON (schema documented in the README)."""
    nodes = []
    for i in range(topology.n):
        if topology.positions is None:
            nodes.append({"id": i, "x": None, "y": None})
        else:
            nodes.append(
                {"id": i, "x": float(topology.positions[i, 0]), "y": float(topology.positions[i, 1])}
            )
    doc = {
        "nodes": nodes,
        "range": topology.radio_range,
        "edges": None if topology.radio_range is not None else [list(e) for e in topology.edges],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_topology(path) -> Topology:
    """Read a topology JSON file; the inverse of save_topology.

    Exactly one of "range" / "edges" must be non-null. With "range", edges
    are re-derived from node positions; with "edges", positions are optional
    (all nodes or none).
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TopologyError(
                f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
            ) from exc
    if not isinstance(doc, dict):
        raise TopologyError(f"{path}: top-level value must be an object")

    nodes = doc.get("nodes")
    if not isinstance(nodes, list) or not nodes:
        raise TopologyError(f"{path}: field 'nodes' must be a non-empty list")
    n = len(nodes)
    seen: set[int] = set()
    coords: dict[int, tuple[float, float] | None] = {}
    for rec in nodes:
        if not isinstance(rec, dict) or "id" not in rec:
            raise TopologyError(f"{path}: every node record needs an 'id' field")
        i = rec["id"]
        if not isinstance(i, int):
            raise TopologyError(f"{path}: node id {i!r} is not an integer")
        if i in seen:
            raise TopologyError(f"{path}: duplicate node id {i}")
        seen.add(i)
        x, y = rec.get("x"), rec.get("y")
        if (x is None) != (y is None):
            raise TopologyError(f"{path}: node {i} has only one of 'x'/'y'")
        coords[i] = None if x is None else (float(x), float(y))
    if seen != set(range(n)):
        raise TopologyError(f"{path}: node ids must be exactly 0..{n - 1}")

    with_pos = [i for i in range(n) if coords[i] is not None]
    if with_pos and len(with_pos) != n:
        raise TopologyError(f"{path}: positions must be given for all nodes or for none")
    positions = (
        np.array([coords[i] for i in range(n)], dtype=float) if len(with_pos) == n else None
    )

    radio_range = doc.get("range")
    edges = doc.get("edges")
    if (radio_range is None) == (edges is None):
        raise TopologyError(f"{path}: exactly one of 'range' / 'edges' must be non-null")

    if radio_range is not None:
        if positions is None:
            raise TopologyError(f"{path}: 'range' mode requires node positions")
        return Topology.from_positions(positions, float(radio_range))

    if not isinstance(edges, list):
        raise TopologyError(f"{path}: field 'edges' must be a list of [i, j] pairs")
    for e in edges:
        if not (isinstance(e, list) and len(e) == 2):
            raise TopologyError(f"{path}: edge {e!r} is not an [i, j] pair")
    try:
        return Topology.from_edges(n, edges, positions)
    except TopologyError as exc:
        raise TopologyError(f"{path}: {exc}") from exc
