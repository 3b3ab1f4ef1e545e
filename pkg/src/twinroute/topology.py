"""Connectivity graph extraction from a world snapshot.

Nodes are the RSU plus every connected vehicle; an undirected edge exists
for every feasible antenna-to-antenna link. Unconnected vehicles never
become nodes but their bodies still occlude, and connected vehicles
occlude every link they are not an endpoint of. The RSU is a point
antenna with no body.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .channel import ChannelParams, LinkAssessment
from .geometry import blockage_count_matrix
from .model import NodeId, WorldSnapshot


@dataclass(frozen=True)
class ConnectivityGraph:
    timestep: int
    nodes: tuple[NodeId, ...]  # sorted, RSU first
    edges: dict[tuple[NodeId, NodeId], LinkAssessment]  # key is a sorted pair
    adjacency: dict[NodeId, tuple[tuple[NodeId, float], ...]] = field(repr=False)

    def has_node(self, node: NodeId) -> bool:
        return node in self.adjacency

    def has_edge(self, a: NodeId, b: NodeId) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def edge(self, a: NodeId, b: NodeId) -> LinkAssessment:
        return self.edges[(min(a, b), max(a, b))]

    def neighbors(self, node: NodeId) -> tuple[tuple[NodeId, float], ...]:
        """(neighbor, path_loss_db) pairs in ascending neighbor order."""
        return self.adjacency[node]


def _finish_graph(
    timestep: int,
    nodes: list[NodeId],
    edges: dict[tuple[NodeId, NodeId], LinkAssessment],
) -> ConnectivityGraph:
    adjacency: dict[NodeId, list[tuple[NodeId, float]]] = {n: [] for n in nodes}
    for (a, b), link in edges.items():
        adjacency[a].append((b, link.path_loss_db))
        adjacency[b].append((a, link.path_loss_db))
    frozen = {n: tuple(sorted(nbrs, key=lambda t: t[0].sort_key)) for n, nbrs in adjacency.items()}
    return ConnectivityGraph(timestep, tuple(nodes), edges, frozen)


def build_topology(
    snapshot: WorldSnapshot, params: ChannelParams, budget_db: float
) -> ConnectivityGraph:
    """Evaluate every node pair and keep the feasible links.

    Pure function of (snapshot, params, budget): the edge set does not
    depend on evaluation order. Pairs farther apart than the maximum range
    in ground distance are skipped before any occlusion work.
    """
    rsu = NodeId.rsu()
    connected = sorted(snapshot.connected_vehicles(), key=lambda v: v.id.sort_key)
    nodes: list[NodeId] = [rsu] + [v.id for v in connected]

    antennas = np.empty((len(nodes), 3))
    antennas[0] = snapshot.rsu_position
    owner_keys = np.full(len(nodes), -1, dtype=np.int64)
    for i, v in enumerate(connected, start=1):
        antennas[i] = v.antenna
        owner_keys[i] = v.id.index

    edges: dict[tuple[NodeId, NodeId], LinkAssessment] = {}
    if len(nodes) > 1:
        idx_i, idx_j = np.triu_indices(len(nodes), k=1)
        dx = antennas[idx_i, 0] - antennas[idx_j, 0]
        dy = antennas[idx_i, 1] - antennas[idx_j, 1]
        max_range = params.max_range_m
        near = dx * dx + dy * dy <= max_range * max_range
        pairs = np.stack([idx_i[near], idx_j[near]], axis=1)

        if len(pairs):
            all_vehicles = snapshot.vehicles
            if all_vehicles:
                centers = np.array(
                    [(v.position[0], v.position[1], v.dimensions[2] / 2.0) for v in all_vehicles]
                )
                halves = np.array(
                    [
                        (v.dimensions[0] / 2.0, v.dimensions[1] / 2.0, v.dimensions[2] / 2.0)
                        for v in all_vehicles
                    ]
                )
                yaws = np.array([v.heading for v in all_vehicles])
                box_owners = np.array([v.id.index for v in all_vehicles], dtype=np.int64)
                blockers = blockage_count_matrix(
                    antennas, pairs, owner_keys[pairs], centers, halves, yaws, box_owners
                )
            else:
                blockers = np.zeros(len(pairs), dtype=np.int64)

            diffs = antennas[pairs[:, 0]] - antennas[pairs[:, 1]]
            distances = np.sqrt((diffs * diffs).sum(axis=1))

            # vectorized twin of channel.path_loss: same class table, same
            # term order, so values match the scalar op bit for bit
            bounds = np.array(
                [c.max_blockers for c in params.classes[:-1]], dtype=np.int64
            )
            cls_idx = np.searchsorted(bounds, blockers, side="left")
            rho = np.array([c.rho for c in params.classes])[cls_idx]
            gamma = np.array([c.gamma for c in params.classes])[cls_idx]
            losses = (
                10.0 * rho * np.log10(distances)
                + gamma
                + params.atmospheric_db_per_km * distances / 1000.0
            )

            feasible = (losses <= budget_db) & (distances <= max_range)
            for p in np.flatnonzero(feasible):
                i, j = int(pairs[p, 0]), int(pairs[p, 1])
                a, b = nodes[i], nodes[j]
                key = (a, b) if a < b else (b, a)
                edges[key] = LinkAssessment(
                    float(distances[p]), int(blockers[p]), float(losses[p]), True
                )

    return _finish_graph(snapshot.timestep, nodes, edges)


def dump_topology(graph: ConnectivityGraph, out: IO[str]) -> None:
    """Append one edge-list row per link: timestep, endpoints, link stats."""
    for (a, b), link in sorted(graph.edges.items(), key=lambda kv: (kv[0][0].sort_key, kv[0][1].sort_key)):
        out.write(
            f"{graph.timestep},{a},{b},{link.distance_m!r},{link.blockers},{link.path_loss_db!r}\n"
        )


TOPOLOGY_DUMP_HEADER = "timestep,node_a,node_b,distance_m,blockers,path_loss_db\n"


def dump_topology_stream(graphs: Iterable[ConnectivityGraph], out: IO[str]) -> None:
    out.write(TOPOLOGY_DUMP_HEADER)
    for g in graphs:
        dump_topology(g, out)
