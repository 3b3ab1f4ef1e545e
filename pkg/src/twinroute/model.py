"""Shared domain types for the intersection V2X routing simulator.

Conventions used throughout the package:

- World frame: x east, y north, z up, meters. The intersection center is
  the origin; the RSU mast stands at (0, 0) with its antenna at the apex.
- Headings are radians, 0 along +x, counter-clockwise positive.
- Time is a fixed-step integer counter ``timestep``; ``sim_time`` equals
  ``timestep * dt`` seconds. Schedules expressed in seconds (update
  intervals, prediction intervals) convert to whole steps, rounding down,
  minimum one step.
- Every type in this module is an immutable value; instances can be shared
  freely across threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

Point3 = tuple[float, float, float]


class NodeKind(enum.Enum):
    RSU = "rsu"
    VEHICLE = "vehicle"


@dataclass(frozen=True, slots=True, eq=False)
class NodeId:
    """Identity of a network node: the single RSU or one vehicle.

    Vehicle indices are unique within a run and never reused after the
    vehicle despawns. Ordering sorts the RSU before all vehicles, then by
    index; routing tie-breaks rely on this order being total. Equality and
    hashing are hand-rolled: node ids key every hot dict in the pipeline.
    """

    kind: NodeKind
    index: int

    @staticmethod
    def rsu() -> "NodeId":
        return NodeId(NodeKind.RSU, 0)

    @staticmethod
    def vehicle(index: int) -> "NodeId":
        if index < 0:
            raise ValueError(f"vehicle index must be non-negative, got {index}")
        return NodeId(NodeKind.VEHICLE, index)

    @property
    def sort_key(self) -> tuple[int, int]:
        return (0 if self.kind is NodeKind.RSU else 1, self.index)

    def __eq__(self, other: object) -> bool:
        return (
            type(other) is NodeId
            and self.index == other.index
            and self.kind is other.kind
        )

    def __hash__(self) -> int:
        return (self.index << 1) | (self.kind is NodeKind.VEHICLE)

    def __lt__(self, other: "NodeId") -> bool:
        if self.kind is not other.kind:
            return self.kind is NodeKind.RSU
        return self.index < other.index

    def __str__(self) -> str:
        return "rsu" if self.kind is NodeKind.RSU else f"v{self.index}"

    @staticmethod
    def parse(text: str) -> "NodeId":
        if text == "rsu":
            return NodeId.rsu()
        if text.startswith("v"):
            return NodeId.vehicle(int(text[1:]))
        raise ValueError(f"not a node id: {text!r}")


@dataclass(frozen=True, slots=True)
class VehicleState:
    """Pose and body of one vehicle at one timestep.

    ``position`` is the ground-contact center of the vehicle (z = 0); the
    single isotropic antenna sits ``antenna_height`` meters above it.
    ``connected`` marks a CAV and is immutable over the vehicle's lifetime.
    ``speed`` is the effective speed over the last step (after any
    gap-keeping clamp), which is what a twin observing displacement sees.
    """

    id: NodeId
    position: Point3
    heading: float
    speed: float
    dimensions: tuple[float, float, float]  # length, width, height
    antenna_height: float
    connected: bool

    def __post_init__(self) -> None:
        if self.id.kind is not NodeKind.VEHICLE:
            raise ValueError("VehicleState id must be a vehicle node")
        if self.speed < 0:
            raise ValueError(f"speed must be >= 0, got {self.speed}")
        if min(self.dimensions) <= 0:
            raise ValueError(f"dimensions must be positive, got {self.dimensions}")
        height = self.dimensions[2]
        if not (0 < self.antenna_height <= height + 1.0):
            raise ValueError(
                f"antenna_height {self.antenna_height} outside (0, height + 1]"
            )

    @property
    def antenna(self) -> Point3:
        x, y, _ = self.position
        return (x, y, self.antenna_height)


@dataclass(frozen=True, slots=True)
class WorldSnapshot:
    """All vehicle states plus the RSU at one timestep: the twin's view."""

    timestep: int
    sim_time: float
    vehicles: tuple[VehicleState, ...]
    rsu_position: Point3

    def __post_init__(self) -> None:
        ids = [v.id for v in self.vehicles]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate vehicle ids in snapshot")

    def connected_vehicles(self) -> tuple[VehicleState, ...]:
        return tuple(v for v in self.vehicles if v.connected)

    def vehicle(self, node: NodeId) -> VehicleState | None:
        for v in self.vehicles:
            if v.id == node:
                return v
        return None


class Strategy(enum.Enum):
    REALTIME = "realtime"
    PREDICTIVE = "predictive"
    CONVENTIONAL = "conventional"


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a configuration check: empty means valid.

    Violations are (field path, message) pairs; they are data, not
    exceptions, so callers can render every problem at once.
    """

    violations: tuple[tuple[str, str], ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.violations

    def paths(self) -> tuple[str, ...]:
        return tuple(path for path, _ in self.violations)

    def __str__(self) -> str:
        if self.ok:
            return "configuration valid"
        return "\n".join(f"{path}: {msg}" for path, msg in self.violations)


def seconds_to_steps(seconds: float, dt: float) -> int:
    """Convert a schedule length to whole timesteps (floor, minimum 1)."""
    return max(1, int(seconds / dt + 1e-9))


def delay_to_steps(seconds: float, dt: float) -> int:
    """Convert a latency to whole timesteps (floor; zero stays zero)."""
    return max(0, int(seconds / dt + 1e-9))
