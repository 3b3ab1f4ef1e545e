"""Independent brute-force oracles.

Everything here re-derives results from first principles and shares no
code with the implementations it checks: occlusion by dense sampling,
shortest paths by exhaustive simple-path enumeration, path loss by an
inline re-statement of the channel formula. Oracles are deliberately
slow and only run at small scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

SAMPLES = 10_000
SURFACE_TOLERANCE = 1e-6  # disagreements allowed only this close to a face


@dataclass(frozen=True)
class OracleCase:
    """A frozen expected value together with the oracle that produced it.

    Derived test expectations are recorded this way so it stays checkable
    that none of them were hand-entered: re-running the named oracle on
    the serialized inputs must reproduce ``expected``.
    """

    description: str
    oracle: str  # oracle function name in this module
    inputs: tuple
    expected: object


def _sample_local(a, b, center, half, yaw, ts):
    """Box-local coordinates of segment points a + t*(b-a) for t in ts."""
    ts = np.asarray(ts)
    px = a[0] + (b[0] - a[0]) * ts
    py = a[1] + (b[1] - a[1]) * ts
    pz = a[2] + (b[2] - a[2]) * ts
    c, s = math.cos(yaw), math.sin(yaw)
    dx = px - center[0]
    dy = py - center[1]
    return (
        c * dx + s * dy,
        -s * dx + c * dy,
        pz - center[2],
    )


def _surface_distances(lx, ly, lz, half):
    """Euclidean distance from each local point to the box surface."""
    ex = np.abs(lx) - half[0]
    ey = np.abs(ly) - half[1]
    ez = np.abs(lz) - half[2]
    outside = np.sqrt(
        np.maximum(ex, 0.0) ** 2 + np.maximum(ey, 0.0) ** 2 + np.maximum(ez, 0.0) ** 2
    )
    inside_depth = -np.maximum.reduce([ex, ey, ez])  # valid where all <= 0
    inside = (ex <= 0) & (ey <= 0) & (ez <= 0)
    return np.where(inside, inside_depth, outside), inside


def oracle_occlusion(a, b, center, half, yaw, samples: int = SAMPLES) -> bool:
    """Dense-sampling occlusion: does the segment enter the box?

    Coarse evenly spaced samples decide most cases; when the segment only
    grazes (closest sample near the surface but outside), the bracket
    around the closest sample is resampled twice so that penetrations far
    narrower than the coarse step are still found.
    """
    ts = np.linspace(0.0, 1.0, samples)
    step = 1.0 / (samples - 1)
    for _ in range(3):
        lx, ly, lz = _sample_local(a, b, center, half, yaw, ts)
        dist, inside = _surface_distances(lx, ly, lz, half)
        if inside.any():
            return True
        k = int(np.argmin(dist))
        lo = max(ts[k] - 2 * step, 0.0)
        hi = min(ts[k] + 2 * step, 1.0)
        ts = np.linspace(lo, hi, samples)
        step = (hi - lo) / (samples - 1)
    return False


def oracle_min_surface_distance(a, b, center, half, yaw, samples: int = SAMPLES) -> float:
    """Minimum distance from the (refined) sampled segment to the box surface."""
    ts = np.linspace(0.0, 1.0, samples)
    step = 1.0 / (samples - 1)
    best = math.inf
    for _ in range(3):
        lx, ly, lz = _sample_local(a, b, center, half, yaw, ts)
        dist, _ = _surface_distances(lx, ly, lz, half)
        k = int(np.argmin(dist))
        best = min(best, float(dist[k]))
        lo = max(ts[k] - 2 * step, 0.0)
        hi = min(ts[k] + 2 * step, 1.0)
        ts = np.linspace(lo, hi, samples)
        step = (hi - lo) / (samples - 1)
    return best


def oracle_path_loss(d: float, blockers: int, classes, atmospheric_db_per_km: float) -> float:
    """Inline restatement of the attenuation formula for cross-checks.

    ``classes`` are (max_blockers, rho, gamma) triples, last unbounded.
    """
    for max_b, rho, gamma in classes:
        if max_b is None or blockers <= max_b:
            return 10.0 * rho * math.log10(d) + gamma + atmospheric_db_per_km * d / 1000.0
    raise AssertionError("no class matched")


def oracle_topology_edges(snapshot, classes, atmospheric_db_per_km, max_range, budget):
    """First-principles edge set: sampling occlusion plus inline path loss.

    Returns {frozenset({node_a, node_b}): blocker_count} for feasible links.
    """
    entities = [("rsu", None, snapshot.rsu_position)]
    for v in snapshot.connected_vehicles():
        entities.append((str(v.id), v.id, v.antenna))

    edges = {}
    for (name_a, id_a, pa), (name_b, id_b, pb) in combinations(entities, 2):
        d = math.dist(pa, pb)
        blockers = 0
        for v in snapshot.vehicles:
            if v.id == id_a or v.id == id_b:
                continue
            length, width, height = v.dimensions
            center = (v.position[0], v.position[1], height / 2.0)
            half = (length / 2.0, width / 2.0, height / 2.0)
            if oracle_occlusion(pa, pb, center, half, v.heading):
                blockers += 1
        loss = oracle_path_loss(d, blockers, classes, atmospheric_db_per_km)
        if loss <= budget and d <= max_range:
            edges[frozenset({name_a, name_b})] = blockers
    return edges


def oracle_shortest_path(graph, source, max_hops=None):
    """Exhaustive simple-path enumeration to the RSU.

    Paths are ranked by (hop count, summed path loss added source-first,
    node-key sequence); returns the winning node tuple or None. Refuses
    graphs with more than 8 nodes: this search is exponential on purpose.
    """
    if len(graph.nodes) > 8:
        raise ValueError("oracle refuses graphs larger than 8 nodes")
    rsu = [n for n in graph.nodes if n.sort_key[0] == 0][0]
    best = None

    def walk(node, visited, hops, loss, path):
        nonlocal best
        if node == rsu:
            key = (hops, loss, tuple(n.sort_key for n in path))
            if best is None or key < best[0]:
                best = (key, tuple(path))
            return
        if max_hops is not None and hops >= max_hops:
            return
        for neighbor, edge_loss in graph.neighbors(node):
            if neighbor in visited:
                continue
            visited.add(neighbor)
            path.append(neighbor)
            walk(neighbor, visited, hops + 1, loss + edge_loss, path)
            path.pop()
            visited.remove(neighbor)

    walk(source, {source}, 0, 0.0, [source])
    return None if best is None else best[1]


def oracle_reliability(counts: list[tuple[int, int]]) -> float:
    """Ratio of sums over (satisfied, total) pairs."""
    sat = sum(s for s, _ in counts)
    tot = sum(t for _, t in counts)
    return sat / tot
