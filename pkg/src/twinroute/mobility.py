"""Deterministic intersection traffic: spawn, follow waypoints, despawn.

Four arms meet at the origin; each arm carries ``lane_count`` inbound and
outbound lanes (right-hand traffic). A vehicle spawns at the far end of an
inbound lane, drives its polyline (straight through, or a single circular
arc for turns, discretized at <= 1 m chords), and despawns at the far end
of the exit arm, at which point a freshly drawn replacement keeps the
population near ``vehicle_count``.

Vehicles hold their drawn cruise speed except for a minimum-gap clamp
against the vehicle ahead in the same lane corridor; merges onto an exit
lane serialize behind whoever is closer to it. There are no signals, no
lane changes and no car-following dynamics: occlusion geometry is what
matters here, not traffic micro-realism.

The whole stream is a pure function of (config, seed).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .config import ScenarioConfig, VehicleClassSpec
from .model import NodeId, VehicleState, WorldSnapshot

RIGHT_TURN_RADIUS = 6.0
LEFT_TURN_RADIUS = 8.0
ARC_CHORD = 1.0  # max chord length when discretizing turn arcs
MERGE_WINDOW = 15.0  # meters before an exit lane where merge order is enforced
CLAMP_PASSES = 3
MANEUVER_WEIGHTS = (0.5, 0.25, 0.25)  # straight, left, right


class Arm(enum.Enum):
    N = "N"
    E = "E"
    S = "S"
    W = "W"


class Maneuver(enum.Enum):
    STRAIGHT = "straight"
    LEFT = "left"
    RIGHT = "right"


_ARM_AXIS = {
    Arm.N: (0.0, 1.0),
    Arm.E: (1.0, 0.0),
    Arm.S: (0.0, -1.0),
    Arm.W: (-1.0, 0.0),
}
_AXIS_ARM = {axis: arm for arm, axis in _ARM_AXIS.items()}


def _rot_right(v: tuple[float, float]) -> tuple[float, float]:
    return (v[1], -v[0])


def _rot_left(v: tuple[float, float]) -> tuple[float, float]:
    return (-v[1], v[0])


@dataclass(frozen=True, eq=False)
class RoutePlan:
    """One vehicle's full path through the intersection."""

    entry_arm: Arm
    lane: int
    maneuver: Maneuver
    waypoints: tuple[tuple[float, float], ...]
    cruise_speed: float
    exit_arm: Arm
    cum_lengths: np.ndarray  # arc length at each waypoint
    entry_end_s: float  # progress where the entry lane segment ends
    exit_start_s: float  # progress where the exit lane segment begins

    @property
    def total_length(self) -> float:
        return float(self.cum_lengths[-1])

    def pose_at(self, s: float) -> tuple[float, float, float]:
        """(x, y, heading) at arc-length progress ``s`` along the polyline."""
        cum = self.cum_lengths
        if s <= 0.0:
            i = 0
        else:
            i = int(np.searchsorted(cum, s, side="right")) - 1
            i = min(i, len(self.waypoints) - 2)
        ax, ay = self.waypoints[i]
        bx, by = self.waypoints[i + 1]
        seg = float(cum[i + 1] - cum[i])
        frac = min(max((s - float(cum[i])) / seg, 0.0), 1.0)
        heading = math.atan2(by - ay, bx - ax)
        return (ax + (bx - ax) * frac, ay + (by - ay) * frac, heading)


def build_route_plan(
    entry_arm: Arm,
    lane: int,
    maneuver: Maneuver,
    cruise_speed: float,
    arm_length: float,
    lane_count: int,
    lane_width: float,
) -> RoutePlan:
    axis = _ARM_AXIS[entry_arm]
    u = (-axis[0], -axis[1])  # inbound heading
    offset = (lane + 0.5) * lane_width
    r_in = _rot_right(u)
    spawn = (axis[0] * arm_length + r_in[0] * offset, axis[1] * arm_length + r_in[1] * offset)

    if maneuver is Maneuver.STRAIGHT:
        v = u
    elif maneuver is Maneuver.RIGHT:
        v = _rot_right(u)
    else:
        v = _rot_left(u)
    exit_arm = _AXIS_ARM[v]
    r_out = _rot_right(v)
    end = (v[0] * arm_length + r_out[0] * offset, v[1] * arm_length + r_out[1] * offset)

    junction_half = lane_count * lane_width
    if maneuver is Maneuver.STRAIGHT:
        waypoints = (spawn, end)
        entry_end_s = arm_length - junction_half
        exit_start_s = arm_length + junction_half
    else:
        radius = RIGHT_TURN_RADIUS if maneuver is Maneuver.RIGHT else LEFT_TURN_RADIUS
        d = (end[0] - spawn[0], end[1] - spawn[1])
        t1 = d[0] * u[0] + d[1] * u[1]  # spawn -> corner along u
        corner = (spawn[0] + t1 * u[0], spawn[1] + t1 * u[1])
        arc_start = (corner[0] - u[0] * radius, corner[1] - u[1] * radius)
        arc_end = (corner[0] + v[0] * radius, corner[1] + v[1] * radius)
        n = _rot_right(u) if maneuver is Maneuver.RIGHT else _rot_left(u)
        center = (arc_start[0] + n[0] * radius, arc_start[1] + n[1] * radius)
        a0 = math.atan2(arc_start[1] - center[1], arc_start[0] - center[0])
        sweep = -math.pi / 2 if maneuver is Maneuver.RIGHT else math.pi / 2
        n_seg = max(2, math.ceil(radius * abs(sweep) / ARC_CHORD))
        arc_pts = tuple(
            (
                center[0] + radius * math.cos(a0 + sweep * i / n_seg),
                center[1] + radius * math.sin(a0 + sweep * i / n_seg),
            )
            for i in range(n_seg + 1)
        )
        waypoints = (spawn,) + arc_pts + (end,)
        entry_end_s = t1 - radius
        exit_start_s = None  # filled from the cum lengths below

    pts = np.asarray(waypoints)
    seg_lengths = np.sqrt(((pts[1:] - pts[:-1]) ** 2).sum(axis=1))
    cum = np.concatenate([[0.0], np.cumsum(seg_lengths)])
    if maneuver is not Maneuver.STRAIGHT:
        exit_start_s = float(cum[-2])  # progress at the arc end waypoint

    return RoutePlan(
        entry_arm=entry_arm,
        lane=lane,
        maneuver=maneuver,
        waypoints=waypoints,
        cruise_speed=cruise_speed,
        exit_arm=exit_arm,
        cum_lengths=cum,
        entry_end_s=float(entry_end_s),
        exit_start_s=float(exit_start_s),
    )


@dataclass
class SpawnRequest:
    release_time: float
    seq: int
    arm: Arm
    lane: int
    maneuver: Maneuver
    vclass: VehicleClassSpec
    cruise_speed: float
    connected: bool


@dataclass
class ActiveVehicle:
    index: int
    vclass: VehicleClassSpec
    plan: RoutePlan
    progress: float
    connected: bool
    effective_speed: float

    def to_state(self) -> VehicleState:
        x, y, heading = self.plan.pose_at(self.progress)
        return VehicleState(
            id=NodeId.vehicle(self.index),
            position=(x, y, 0.0),
            heading=heading,
            speed=self.effective_speed,
            dimensions=(self.vclass.length, self.vclass.width, self.vclass.height),
            antenna_height=self.vclass.antenna_height,
            connected=self.connected,
        )


@dataclass
class TrafficState:
    """Mutable stepping state; one owner per run, never shared."""

    config: ScenarioConfig
    rng: np.random.Generator
    step: int
    active: list[ActiveVehicle]
    pending: list[SpawnRequest]
    next_vehicle_index: int
    next_request_seq: int

    @property
    def active_vehicles(self) -> list[tuple[VehicleState, RoutePlan, float]]:
        return [(v.to_state(), v.plan, v.progress) for v in self.active]

    def snapshot(self) -> WorldSnapshot:
        return WorldSnapshot(
            timestep=self.step,
            sim_time=self.step * self.config.dt,
            vehicles=tuple(v.to_state() for v in self.active),
            rsu_position=(0.0, 0.0, self.config.intersection.rsu_height),
        )


def _draw_request(state: TrafficState, release_time: float) -> SpawnRequest:
    cfg = state.config
    rng = state.rng
    arm = list(Arm)[int(rng.integers(0, 4))]
    lane = int(rng.integers(0, cfg.intersection.lane_count))
    maneuver = list(Maneuver)[
        int(rng.choice(3, p=np.asarray(MANEUVER_WEIGHTS) / sum(MANEUVER_WEIGHTS)))
    ]
    weights = np.asarray([v.weight for v in cfg.vehicle_mix], dtype=float)
    vclass = cfg.vehicle_mix[int(rng.choice(len(cfg.vehicle_mix), p=weights / weights.sum()))]
    cruise = float(rng.uniform(cfg.speed.min, cfg.speed.max))
    connected = bool(rng.random() < cfg.connected_fraction)
    req = SpawnRequest(
        release_time=release_time,
        seq=state.next_request_seq,
        arm=arm,
        lane=lane,
        maneuver=maneuver,
        vclass=vclass,
        cruise_speed=cruise,
        connected=connected,
    )
    state.next_request_seq += 1
    return req


def init_traffic(config: ScenarioConfig) -> TrafficState:
    """Seeded initial state: spawn requests staggered over the spawn window.

    Precondition: the configuration validates. Vehicles actually enter the
    world as the first advance calls release their requests.
    """
    state = TrafficState(
        config=config,
        rng=np.random.default_rng(config.seed),
        step=0,
        active=[],
        pending=[],
        next_vehicle_index=0,
        next_request_seq=0,
    )
    offsets = [float(state.rng.uniform(0.0, config.mobility.spawn_window)) for _ in range(config.vehicle_count)]
    for offset in offsets:
        state.pending.append(_draw_request(state, offset))
    state.pending.sort(key=lambda r: (r.release_time, r.seq))
    _release_spawns(state, 0.0)
    return state


def _spawn_clear(state: TrafficState, req: SpawnRequest) -> bool:
    gap = state.config.mobility.min_gap
    for v in state.active:
        if v.plan.entry_arm is req.arm and v.plan.lane == req.lane and v.progress < gap:
            return False
    return True


def _release_spawns(state: TrafficState, now: float) -> None:
    remaining: list[SpawnRequest] = []
    for req in state.pending:
        if (
            req.release_time <= now + 1e-9
            and len(state.active) < state.config.vehicle_count
            and _spawn_clear(state, req)
        ):
            plan = build_route_plan(
                req.arm,
                req.lane,
                req.maneuver,
                req.cruise_speed,
                state.config.intersection.arm_length,
                state.config.intersection.lane_count,
                state.config.intersection.lane_width,
            )
            state.active.append(
                ActiveVehicle(
                    index=state.next_vehicle_index,
                    vclass=req.vclass,
                    plan=plan,
                    progress=0.0,
                    connected=req.connected,
                    effective_speed=req.cruise_speed,
                )
            )
            state.next_vehicle_index += 1
        else:
            remaining.append(req)
    state.pending = remaining


def _clamped_progress(state: TrafficState, dt: float) -> list[float]:
    """Propose cruise moves, then clamp followers to leader - min_gap.

    Leaders and followers are ordered per lane corridor from pre-move
    positions; a few fixed passes resolve the interaction between a
    vehicle's entry corridor and the exit corridor it is merging onto.
    Progress never decreases.
    """
    active = state.active
    gap = state.config.mobility.min_gap
    s_old = [v.progress for v in active]
    s_new = [v.progress + v.plan.cruise_speed * dt for v in active]

    entry_lists: dict[tuple[Arm, int], list[int]] = {}
    exit_lists: dict[tuple[Arm, int], list[int]] = {}
    for i, v in enumerate(active):
        if s_old[i] < v.plan.entry_end_s:
            entry_lists.setdefault((v.plan.entry_arm, v.plan.lane), []).append(i)
        if s_old[i] - v.plan.exit_start_s >= -MERGE_WINDOW:
            exit_lists.setdefault((v.plan.exit_arm, v.plan.lane), []).append(i)
    for lst in entry_lists.values():
        lst.sort(key=lambda i: (-s_old[i], active[i].index))
    for lst in exit_lists.values():
        lst.sort(key=lambda i: (-(s_old[i] - active[i].plan.exit_start_s), active[i].index))

    for _ in range(CLAMP_PASSES):
        for lst in entry_lists.values():
            for leader, follower in zip(lst, lst[1:]):
                cap = s_new[leader] - gap
                if s_new[follower] > cap:
                    s_new[follower] = max(s_old[follower], cap)
        for lst in exit_lists.values():
            for leader, follower in zip(lst, lst[1:]):
                lead_coord = s_new[leader] - active[leader].plan.exit_start_s
                cap = lead_coord - gap + active[follower].plan.exit_start_s
                if s_new[follower] > cap:
                    s_new[follower] = max(s_old[follower], cap)
    return s_new


def advance_traffic(state: TrafficState, dt: float) -> tuple[TrafficState, WorldSnapshot]:
    """Move every vehicle by one step and return the post-move snapshot.

    ``dt`` must equal the configured step length. Vehicles reaching the end
    of their polyline despawn and schedule a freshly drawn replacement.
    """
    state.step += 1
    now = state.step * state.config.dt

    s_new = _clamped_progress(state, dt)
    survivors: list[ActiveVehicle] = []
    for v, s in zip(state.active, s_new):
        v.effective_speed = (s - v.progress) / dt
        v.progress = s
        if s >= v.plan.total_length - 1e-9:
            state.pending.append(_draw_request(state, now))
        else:
            survivors.append(v)
    state.active = survivors
    state.pending.sort(key=lambda r: (r.release_time, r.seq))
    _release_spawns(state, now)

    return state, state.snapshot()


def snapshot_stream(config: ScenarioConfig) -> Iterable[WorldSnapshot]:
    """Initial snapshot followed by one snapshot per timestep."""
    state = init_traffic(config)
    yield state.snapshot()
    n_steps = int(round(config.duration / config.dt))
    for _ in range(n_steps):
        _, snap = advance_traffic(state, config.dt)
        yield snap


# ---------------------------------------------------------------------------
# snapshot trace export / import

TRACE_HEADER = "timestep,sim_time,id,connected,x,y,heading,speed\n"


def write_trace(snapshots: Iterable[WorldSnapshot], out: IO[str]) -> None:
    out.write(TRACE_HEADER)
    for snap in snapshots:
        for v in snap.vehicles:
            out.write(
                f"{snap.timestep},{snap.sim_time!r},{v.id.index},{int(v.connected)},"
                f"{v.position[0]!r},{v.position[1]!r},{v.heading!r},{v.speed!r}\n"
            )


def read_trace(
    lines: Iterable[str],
    rsu_height: float,
    body: VehicleClassSpec,
) -> list[WorldSnapshot]:
    """Rebuild snapshots from trace rows; bodies default to ``body``.

    The trace schema carries no dimensions, so every vehicle gets the
    supplied body class. Timesteps must be grouped and non-decreasing.
    """
    snapshots: list[WorldSnapshot] = []
    current_ts: int | None = None
    current_time = 0.0
    bucket: list[VehicleState] = []
    rsu = (0.0, 0.0, rsu_height)

    def flush() -> None:
        if current_ts is not None:
            snapshots.append(
                WorldSnapshot(current_ts, current_time, tuple(bucket), rsu)
            )

    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("timestep"):
            continue
        parts = line.split(",")
        if len(parts) != 8:
            raise ValueError(f"malformed trace row: {raw!r}")
        ts = int(parts[0])
        if current_ts is None or ts != current_ts:
            if current_ts is not None and ts < current_ts:
                raise ValueError("trace timesteps must be non-decreasing")
            flush()
            bucket = []
            current_ts = ts
            current_time = float(parts[1])
        bucket.append(
            VehicleState(
                id=NodeId.vehicle(int(parts[2])),
                position=(float(parts[4]), float(parts[5]), 0.0),
                heading=float(parts[6]),
                speed=float(parts[7]),
                dimensions=(body.length, body.width, body.height),
                antenna_height=body.antenna_height,
                connected=bool(int(parts[3])),
            )
        )
    flush()
    return snapshots
