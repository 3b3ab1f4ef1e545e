"""Pluggable trajectory prediction.

Every predictor consumes a vehicle's recent state history (oldest first)
and emits one state per timestep across the requested horizon. The
analytic predictors are the reference implementations; a learned model
plugs in through a subprocess text exchange using the mobility trace
schema, keeping ML frameworks out of this package.

Learned-model contract: the command receives history rows on stdin as
``timestep,sim_time,id,connected,x,y,heading,speed`` lines (no header)
followed by two extra argv values ``<horizon_steps> <dt>``, and must print
exactly ``horizon_steps`` rows in the same schema, timesteps continuing
from the last input row.
"""

from __future__ import annotations

import math
import subprocess
from dataclasses import dataclass
from typing import Protocol, Sequence

from .model import NodeId, VehicleState


@dataclass(frozen=True, slots=True)
class PredictedState:
    timestep: int
    position: tuple[float, float, float]
    heading: float
    speed: float


@dataclass(frozen=True)
class PredictedTrack:
    """Forecast states for one vehicle, strictly increasing timesteps.

    ``degraded`` marks tracks produced by the hold fallback because the
    requested predictor lacked history or failed.
    """

    vehicle: NodeId
    states: tuple[PredictedState, ...]
    degraded: bool = False

    def state_at(self, timestep: int) -> PredictedState | None:
        for s in self.states:
            if s.timestep == timestep:
                return s
        return None


class TrajectoryPredictor(Protocol):
    """Anything that can extrapolate a state history."""

    kind: str
    min_history: int

    def extrapolate(
        self, history: Sequence[VehicleState], steps: int, dt: float
    ) -> list[tuple[tuple[float, float, float], float, float]]:
        """Return ``steps`` (position, heading, speed) triples."""
        ...


class HoldPredictor:
    kind = "hold"
    min_history = 1

    def extrapolate(self, history, steps, dt):
        last = history[-1]
        return [(last.position, last.heading, last.speed)] * steps


class ConstantVelocityPredictor:
    kind = "constant_velocity"
    min_history = 2

    def extrapolate(self, history, steps, dt):
        last = history[-1]
        vx = last.speed * math.cos(last.heading)
        vy = last.speed * math.sin(last.heading)
        x, y, z = last.position
        out = []
        for j in range(1, steps + 1):
            out.append(((x + vx * j * dt, y + vy * j * dt, z), last.heading, last.speed))
        return out


def _wrap_angle(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi


class ConstantTurnRatePredictor:
    """Fits yaw rate from the last two headings, then integrates an arc."""

    kind = "constant_turn_rate"
    min_history = 2
    straight_rate_eps = 1e-9  # rad/s below which the motion is treated as straight

    def extrapolate(self, history, steps, dt):
        last = history[-1]
        prev = history[-2]
        omega = _wrap_angle(last.heading - prev.heading) / dt
        if abs(omega) < self.straight_rate_eps or last.speed == 0.0:
            return ConstantVelocityPredictor().extrapolate(history, steps, dt)
        x, y, z = last.position
        v = last.speed
        h = last.heading
        radius = v / omega
        out = []
        for j in range(1, steps + 1):
            tau = j * dt
            px = x + radius * (math.sin(h + omega * tau) - math.sin(h))
            py = y - radius * (math.cos(h + omega * tau) - math.cos(h))
            out.append(((px, py, z), _wrap_angle(h + omega * tau), v))
        return out


class LearnedPredictor:
    """Delegates to an external model through the trace-format exchange."""

    kind = "learned"
    min_history = 1

    def __init__(self, command: Sequence[str], timeout: float = 30.0):
        if not command:
            raise ValueError("learned predictor needs a command")
        self.command = tuple(command)
        self.timeout = timeout

    def extrapolate(self, history, steps, dt):
        last = history[-1]
        lines = []
        for i, s in enumerate(history):
            ts = i  # relative numbering; absolute timesteps are not known here
            lines.append(
                f"{ts},{ts * dt!r},{s.id},{int(s.connected)},"
                f"{s.position[0]!r},{s.position[1]!r},{s.heading!r},{s.speed!r}"
            )
        proc = subprocess.run(
            [*self.command, str(steps), repr(dt)],
            input="\n".join(lines) + "\n",
            capture_output=True,
            text=True,
            timeout=self.timeout,
        )
        if proc.returncode != 0:
            raise RuntimeError(
                f"learned predictor exited with {proc.returncode}: {proc.stderr.strip()}"
            )
        out = []
        rows = [ln for ln in proc.stdout.splitlines() if ln.strip()]
        if len(rows) != steps:
            raise RuntimeError(
                f"learned predictor returned {len(rows)} rows, expected {steps}"
            )
        for ln in rows:
            parts = ln.split(",")
            x, y, heading, speed = (
                float(parts[4]),
                float(parts[5]),
                float(parts[6]),
                float(parts[7]),
            )
            out.append(((x, y, last.position[2]), heading, speed))
        return out


def make_predictor(kind: str, learned_command: Sequence[str] | None = None) -> TrajectoryPredictor:
    if kind == "hold":
        return HoldPredictor()
    if kind == "constant_velocity":
        return ConstantVelocityPredictor()
    if kind == "constant_turn_rate":
        return ConstantTurnRatePredictor()
    if kind == "learned":
        return LearnedPredictor(learned_command or ())
    raise ValueError(f"unknown predictor kind: {kind!r}")


def predict(
    history: Sequence[VehicleState],
    horizon: float,
    dt: float,
    predictor: TrajectoryPredictor,
    last_timestep: int = 0,
) -> PredictedTrack:
    """Forecast one vehicle across the horizon; one state per dt.

    Falls back to holding the last state (and marks the track degraded)
    when the predictor lacks history. The history must be non-empty and
    time-ordered.
    """
    if not history:
        raise ValueError("history must contain at least one state")
    steps = max(1, int(horizon / dt + 1e-9))
    vehicle = history[-1].id

    degraded = False
    if len(history) < predictor.min_history:
        triples = HoldPredictor().extrapolate(history, steps, dt)
        degraded = True
    else:
        triples = predictor.extrapolate(history, steps, dt)

    states = tuple(
        PredictedState(last_timestep + 1 + j, pos, heading, speed)
        for j, (pos, heading, speed) in enumerate(triples)
    )
    return PredictedTrack(vehicle, states, degraded)


def prediction_error(track: PredictedTrack, ground_truth: Sequence[tuple[int, VehicleState]]) -> float:
    """Mean Euclidean displacement between forecast and truth.

    ``ground_truth`` pairs each timestep with the vehicle's actual state;
    the timesteps must exactly match the track's.
    """
    if len(ground_truth) != len(track.states):
        raise ValueError(
            f"ground truth has {len(ground_truth)} states, track has {len(track.states)}"
        )
    total = 0.0
    for predicted, (ts, actual) in zip(track.states, ground_truth):
        if predicted.timestep != ts:
            raise ValueError(
                f"misaligned timesteps: predicted {predicted.timestep}, truth {ts}"
            )
        dx = predicted.position[0] - actual.position[0]
        dy = predicted.position[1] - actual.position[1]
        total += math.hypot(dx, dy)
    return total / len(track.states)
