"""Sight-line occlusion: how many vehicle bodies cut an antenna segment.

Boxes are oriented (yaw about z only) and rest on the ground plane. The
segment test is a slab test in the box local frame, closed on both the
box surface and the segment, so grazing contact counts as blocked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .model import NodeId, VehicleState


@dataclass(frozen=True)
class ObstacleBox:
    """Oriented box resting on the ground: center z equals half the height."""

    center: tuple[float, float, float]
    half_extents: tuple[float, float, float]
    yaw: float
    owner: NodeId

    def __post_init__(self) -> None:
        if min(self.half_extents) <= 0:
            raise ValueError(f"half extents must be positive: {self.half_extents}")


def box_from_vehicle(v: VehicleState) -> ObstacleBox:
    length, width, height = v.dimensions
    x, y, _ = v.position
    return ObstacleBox(
        center=(x, y, height / 2.0),
        half_extents=(length / 2.0, width / 2.0, height / 2.0),
        yaw=v.heading,
        owner=v.id,
    )


def _to_local(box: ObstacleBox, p: Sequence[float]) -> tuple[float, float, float]:
    c, s = math.cos(box.yaw), math.sin(box.yaw)
    dx = p[0] - box.center[0]
    dy = p[1] - box.center[1]
    dz = p[2] - box.center[2]
    # inverse rotation about z
    return (c * dx + s * dy, -s * dx + c * dy, dz)


def segment_intersects_box(
    a: Sequence[float], b: Sequence[float], box: ObstacleBox
) -> bool:
    """True iff segment (a, b) hits the closed oriented box (slab test)."""
    ax, ay, az = _to_local(box, a)
    bx, by, bz = _to_local(box, b)
    if (ax, ay, az) == (bx, by, bz):
        raise ValueError("segment endpoints coincide")
    t_enter = 0.0
    t_exit = 1.0
    for o, d, h in (
        (ax, bx - ax, box.half_extents[0]),
        (ay, by - ay, box.half_extents[1]),
        (az, bz - az, box.half_extents[2]),
    ):
        if d == 0.0:
            if abs(o) > h:
                return False
            continue
        t0 = (-h - o) / d
        t1 = (h - o) / d
        if t0 > t1:
            t0, t1 = t1, t0
        t_enter = max(t_enter, t0)
        t_exit = min(t_exit, t1)
        if t_enter > t_exit:
            return False
    return True


def blockage_count(
    tx: Sequence[float],
    rx: Sequence[float],
    obstacles: Iterable[ObstacleBox],
    exclude: frozenset[NodeId] | set[NodeId],
) -> int:
    """Number of non-excluded boxes crossing the tx-rx segment.

    The owners of both link endpoints must be in ``exclude``: an antenna
    never counts its own roof as a blocker.
    """
    if tuple(tx) == tuple(rx):
        raise ValueError("tx and rx coincide")
    count = 0
    for box in obstacles:
        if box.owner in exclude:
            continue
        if segment_intersects_box(tx, rx, box):
            count += 1
    return count


def blockage_count_matrix(
    points: np.ndarray,
    pairs: np.ndarray,
    pair_owner_keys: np.ndarray,
    box_centers: np.ndarray,
    box_half_extents: np.ndarray,
    box_yaws: np.ndarray,
    box_owner_keys: np.ndarray,
) -> np.ndarray:
    """Vectorized blocker counts for many segments against many boxes.

    points: (N, 3) antenna positions; pairs: (P, 2) indices into points;
    pair_owner_keys: (P, 2) integer owner keys per endpoint (RSU = -1);
    boxes given as (B, 3) centers, (B, 3) half extents, (B,) yaws and
    (B,) integer owner keys. Returns (P,) counts, identical to applying
    :func:`segment_intersects_box` per pair/box with owner exclusion.
    """
    n_pairs = len(pairs)
    n_boxes = len(box_centers)
    if n_pairs == 0 or n_boxes == 0:
        return np.zeros(n_pairs, dtype=np.int64)

    counts = np.zeros(n_pairs, dtype=np.int64)

    # z is unrotated (yaw about z only), so the z slab over all (box, pair)
    # combinations is cheap and rejects most of them before any rotation:
    # antenna sight lines mostly fly above car roofs.
    az = points[pairs[:, 0], 2]  # (P,)
    dz = points[pairs[:, 1], 2] - az
    oz = az[None, :] - box_centers[:, 2][:, None]  # (B, P)
    hz = box_half_extents[:, 2][:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        tz0 = (-hz - oz) / dz[None, :]
        tz1 = (hz - oz) / dz[None, :]
    tz_lo = np.minimum(tz0, tz1)
    tz_hi = np.maximum(tz0, tz1)
    level = dz == 0.0
    if level.any():
        inside = np.abs(oz) <= hz
        lvl = np.broadcast_to(level[None, :], oz.shape)
        tz_lo = np.where(lvl, np.where(inside, -np.inf, np.inf), tz_lo)
        tz_hi = np.where(lvl, np.where(inside, np.inf, -np.inf), tz_hi)
    tz_lo = np.maximum(tz_lo, 0.0)
    tz_hi = np.minimum(tz_hi, 1.0)

    alive = tz_lo <= tz_hi
    alive &= box_owner_keys[:, None] != pair_owner_keys[None, :, 0]
    alive &= box_owner_keys[:, None] != pair_owner_keys[None, :, 1]
    if not alive.any():
        return counts

    idx_b, idx_p = np.nonzero(alive)  # K surviving (box, pair) combos
    cos = np.cos(box_yaws)[idx_b]
    sin = np.sin(box_yaws)[idx_b]
    cx = box_centers[idx_b, 0]
    cy = box_centers[idx_b, 1]
    rax = points[pairs[idx_p, 0], 0] - cx
    ray = points[pairs[idx_p, 0], 1] - cy
    rbx = points[pairs[idx_p, 1], 0] - cx
    rby = points[pairs[idx_p, 1], 1] - cy

    t_lo = tz_lo[idx_b, idx_p]
    t_hi = tz_hi[idx_b, idx_p]
    for o, e, h in (
        (cos * rax + sin * ray, cos * rbx + sin * rby, box_half_extents[idx_b, 0]),
        (cos * ray - sin * rax, cos * rby - sin * rbx, box_half_extents[idx_b, 1]),
    ):
        d = e - o
        with np.errstate(divide="ignore", invalid="ignore"):
            t0 = (-h - o) / d
            t1 = (h - o) / d
        lo = np.minimum(t0, t1)
        hi = np.maximum(t0, t1)
        parallel = d == 0.0
        if parallel.any():
            inside = np.abs(o) <= h
            lo = np.where(parallel, np.where(inside, -np.inf, np.inf), lo)
            hi = np.where(parallel, np.where(inside, np.inf, -np.inf), hi)
        t_lo = np.maximum(t_lo, lo)
        t_hi = np.minimum(t_hi, hi)

    hit = t_lo <= t_hi
    np.add.at(counts, idx_p[hit], 1)
    return counts
