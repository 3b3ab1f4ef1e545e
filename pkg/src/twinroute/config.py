"""Scenario configuration: schema, YAML round-trip, and validation.

A scenario file is a UTF-8 YAML mapping whose keys mirror the field names
below one-to-one. Unknown keys anywhere in the tree are rejected at load
time so typos fail fast instead of silently falling back to defaults.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .channel import BlockageClass, ChannelParams, default_channel_params
from .model import Strategy, ValidationReport

ARM_NAMES = ("N", "E", "S", "W")


@dataclass(frozen=True)
class IntersectionGeometry:
    arm_length: float = 100.0
    lane_count: int = 1
    lane_width: float = 3.5
    rsu_height: float = 5.0


@dataclass(frozen=True)
class SpeedRange:
    min: float = 8.0
    max: float = 14.0


@dataclass(frozen=True)
class PredictionConfig:
    horizon: float = 2.0
    interval: float = 2.0
    predictor: str = "constant_velocity"  # hold | constant_velocity | constant_turn_rate | learned
    history_window: float = 2.0
    learned_command: tuple[str, ...] | None = None


@dataclass(frozen=True)
class MobilityConfig:
    min_gap: float = 7.0  # center-to-center, same lane
    spawn_window: float = 10.0  # seconds over which initial spawns stagger


@dataclass(frozen=True)
class VehicleClassSpec:
    """One body type in the traffic mix, drawn per spawn by weight."""

    name: str
    length: float
    width: float
    height: float
    antenna_height: float
    weight: float


# Sedans alone would never occlude anything (every antenna would sit above
# every roof), so the default mix includes taller vans and trucks whose
# bodies shadow antenna sight lines.
DEFAULT_VEHICLE_MIX = (
    VehicleClassSpec("sedan", 4.5, 1.8, 1.5, 1.6, 0.7),
    VehicleClassSpec("van", 5.0, 1.9, 2.2, 2.3, 0.15),
    VehicleClassSpec("truck", 8.0, 2.5, 3.2, 3.3, 0.15),
)

PREDICTOR_KINDS = ("hold", "constant_velocity", "constant_turn_rate", "learned")


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 1
    duration: float = 600.0
    dt: float = 0.1
    vehicle_count: int = 30
    connected_fraction: float = 1.0
    intersection: IntersectionGeometry = field(default_factory=IntersectionGeometry)
    speed: SpeedRange = field(default_factory=SpeedRange)
    channel: ChannelParams = field(default_factory=default_channel_params)
    link_budget_db: float = 110.0
    strategy: Strategy = Strategy.REALTIME
    latency_delta: float = 0.0
    prediction: PredictionConfig = field(default_factory=PredictionConfig)
    conventional_update_interval: float = 5.0
    mobility: MobilityConfig = field(default_factory=MobilityConfig)
    vehicle_mix: tuple[VehicleClassSpec, ...] = DEFAULT_VEHICLE_MIX
    max_hops: int | None = None  # route length cap; None = unbounded

    def digest(self) -> str:
        """Stable content hash identifying this exact configuration."""
        payload = json.dumps(config_to_dict(self), sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def default_config(**overrides: Any) -> ScenarioConfig:
    return dataclasses.replace(ScenarioConfig(), **overrides)


# ---------------------------------------------------------------------------
# dict <-> dataclass conversion (strict: unknown keys are an error)


def _take(mapping: dict[str, Any], path: str, allowed: set[str]) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        where = f"{path}." if path else ""
        raise ValueError(
            f"unknown configuration key(s): {', '.join(where + k for k in unknown)}"
        )


def config_to_dict(cfg: ScenarioConfig) -> dict[str, Any]:
    return {
        "seed": cfg.seed,
        "duration": cfg.duration,
        "dt": cfg.dt,
        "vehicle_count": cfg.vehicle_count,
        "connected_fraction": cfg.connected_fraction,
        "intersection": {
            "arm_length": cfg.intersection.arm_length,
            "lane_count": cfg.intersection.lane_count,
            "lane_width": cfg.intersection.lane_width,
            "rsu_height": cfg.intersection.rsu_height,
        },
        "speed": {"min": cfg.speed.min, "max": cfg.speed.max},
        "channel": {
            "atmospheric_db_per_km": cfg.channel.atmospheric_db_per_km,
            "max_range_m": cfg.channel.max_range_m,
            "classes": [
                {"max_blockers": c.max_blockers, "rho": c.rho, "gamma": c.gamma}
                for c in cfg.channel.classes
            ],
        },
        "link_budget_db": cfg.link_budget_db,
        "strategy": cfg.strategy.value,
        "latency_delta": cfg.latency_delta,
        "prediction": {
            "horizon": cfg.prediction.horizon,
            "interval": cfg.prediction.interval,
            "predictor": cfg.prediction.predictor,
            "history_window": cfg.prediction.history_window,
            "learned_command": list(cfg.prediction.learned_command)
            if cfg.prediction.learned_command
            else None,
        },
        "conventional_update_interval": cfg.conventional_update_interval,
        "mobility": {
            "min_gap": cfg.mobility.min_gap,
            "spawn_window": cfg.mobility.spawn_window,
        },
        "vehicle_mix": [
            {
                "name": v.name,
                "length": v.length,
                "width": v.width,
                "height": v.height,
                "antenna_height": v.antenna_height,
                "weight": v.weight,
            }
            for v in cfg.vehicle_mix
        ],
        "max_hops": cfg.max_hops,
    }


def config_from_dict(data: dict[str, Any]) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ValueError("configuration root must be a mapping")
    base = ScenarioConfig()
    _take(
        data,
        "",
        {
            "seed",
            "duration",
            "dt",
            "vehicle_count",
            "connected_fraction",
            "intersection",
            "speed",
            "channel",
            "link_budget_db",
            "strategy",
            "latency_delta",
            "prediction",
            "conventional_update_interval",
            "mobility",
            "vehicle_mix",
            "max_hops",
        },
    )

    inter = dict(data.get("intersection", {}))
    _take(inter, "intersection", {"arm_length", "lane_count", "lane_width", "rsu_height"})
    intersection = IntersectionGeometry(
        arm_length=float(inter.get("arm_length", base.intersection.arm_length)),
        lane_count=int(inter.get("lane_count", base.intersection.lane_count)),
        lane_width=float(inter.get("lane_width", base.intersection.lane_width)),
        rsu_height=float(inter.get("rsu_height", base.intersection.rsu_height)),
    )

    spd = dict(data.get("speed", {}))
    _take(spd, "speed", {"min", "max"})
    speed = SpeedRange(
        min=float(spd.get("min", base.speed.min)),
        max=float(spd.get("max", base.speed.max)),
    )

    chan = dict(data.get("channel", {}))
    _take(chan, "channel", {"atmospheric_db_per_km", "max_range_m", "classes"})
    if "classes" in chan:
        classes = []
        for i, entry in enumerate(chan["classes"]):
            entry = dict(entry)
            _take(entry, f"channel.classes[{i}]", {"max_blockers", "rho", "gamma"})
            raw_max = entry.get("max_blockers")
            classes.append(
                BlockageClass(
                    max_blockers=None if raw_max is None else int(raw_max),
                    rho=float(entry["rho"]),
                    gamma=float(entry["gamma"]),
                )
            )
        classes_t = tuple(classes)
    else:
        classes_t = default_channel_params().classes
    channel = ChannelParams(
        classes=classes_t,
        atmospheric_db_per_km=float(
            chan.get("atmospheric_db_per_km", base.channel.atmospheric_db_per_km)
        ),
        max_range_m=float(chan.get("max_range_m", base.channel.max_range_m)),
    )

    pred = dict(data.get("prediction", {}))
    _take(
        pred,
        "prediction",
        {"horizon", "interval", "predictor", "history_window", "learned_command"},
    )
    raw_cmd = pred.get("learned_command")
    prediction = PredictionConfig(
        horizon=float(pred.get("horizon", base.prediction.horizon)),
        interval=float(pred.get("interval", base.prediction.interval)),
        predictor=str(pred.get("predictor", base.prediction.predictor)),
        history_window=float(pred.get("history_window", base.prediction.history_window)),
        learned_command=tuple(str(a) for a in raw_cmd) if raw_cmd else None,
    )

    mob = dict(data.get("mobility", {}))
    _take(mob, "mobility", {"min_gap", "spawn_window"})
    mobility = MobilityConfig(
        min_gap=float(mob.get("min_gap", base.mobility.min_gap)),
        spawn_window=float(mob.get("spawn_window", base.mobility.spawn_window)),
    )

    if "vehicle_mix" in data:
        mix = []
        for i, entry in enumerate(data["vehicle_mix"]):
            entry = dict(entry)
            _take(
                entry,
                f"vehicle_mix[{i}]",
                {"name", "length", "width", "height", "antenna_height", "weight"},
            )
            mix.append(
                VehicleClassSpec(
                    name=str(entry["name"]),
                    length=float(entry["length"]),
                    width=float(entry["width"]),
                    height=float(entry["height"]),
                    antenna_height=float(entry["antenna_height"]),
                    weight=float(entry["weight"]),
                )
            )
        vehicle_mix = tuple(mix)
    else:
        vehicle_mix = DEFAULT_VEHICLE_MIX

    raw_strategy = data.get("strategy", base.strategy.value)
    try:
        strategy = Strategy(str(raw_strategy).lower())
    except ValueError:
        raise ValueError(
            f"strategy must be one of {[s.value for s in Strategy]}, got {raw_strategy!r}"
        ) from None

    raw_hops = data.get("max_hops", base.max_hops)

    return ScenarioConfig(
        seed=int(data.get("seed", base.seed)),
        duration=float(data.get("duration", base.duration)),
        dt=float(data.get("dt", base.dt)),
        vehicle_count=int(data.get("vehicle_count", base.vehicle_count)),
        connected_fraction=float(data.get("connected_fraction", base.connected_fraction)),
        intersection=intersection,
        speed=speed,
        channel=channel,
        link_budget_db=float(data.get("link_budget_db", base.link_budget_db)),
        strategy=strategy,
        latency_delta=float(data.get("latency_delta", base.latency_delta)),
        prediction=prediction,
        conventional_update_interval=float(
            data.get("conventional_update_interval", base.conventional_update_interval)
        ),
        mobility=mobility,
        vehicle_mix=vehicle_mix,
        max_hops=None if raw_hops is None else int(raw_hops),
    )


def load_config(path: str | Path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f)
    if data is None:
        data = {}
    return config_from_dict(data)


def save_config(cfg: ScenarioConfig, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(config_to_dict(cfg), f, sort_keys=False)


# ---------------------------------------------------------------------------
# validation


def validate_config(cfg: ScenarioConfig) -> ValidationReport:
    """Check every scenario invariant; pure, returns violations as data."""
    bad: list[tuple[str, str]] = []

    def check(ok: bool, path: str, msg: str) -> None:
        if not ok:
            bad.append((path, msg))

    check(0 <= cfg.seed < 2**64, "seed", "must fit an unsigned 64-bit integer")
    check(cfg.dt > 0, "dt", "must be > 0")
    if cfg.dt > 0:
        check(cfg.duration >= cfg.dt, "duration", "must be >= dt")
        check(
            cfg.conventional_update_interval >= cfg.dt,
            "conventional_update_interval",
            "must be >= dt",
        )
        check(cfg.prediction.interval >= cfg.dt, "prediction.interval", "must be >= dt")
    check(cfg.vehicle_count >= 0, "vehicle_count", "must be >= 0")
    check(
        0.0 <= cfg.connected_fraction <= 1.0,
        "connected_fraction",
        "must be within [0, 1]",
    )
    check(
        cfg.prediction.horizon >= cfg.prediction.interval,
        "prediction.horizon",
        "must be >= prediction.interval",
    )
    check(
        cfg.prediction.predictor in PREDICTOR_KINDS,
        "prediction.predictor",
        f"must be one of {PREDICTOR_KINDS}",
    )
    if cfg.prediction.predictor == "learned":
        check(
            bool(cfg.prediction.learned_command),
            "prediction.learned_command",
            "required when predictor is 'learned'",
        )
    check(cfg.prediction.history_window > 0, "prediction.history_window", "must be > 0")
    check(cfg.latency_delta >= 0, "latency_delta", "must be >= 0")
    check(cfg.intersection.arm_length > 0, "intersection.arm_length", "must be > 0")
    check(cfg.intersection.lane_count >= 1, "intersection.lane_count", "must be >= 1")
    check(cfg.intersection.lane_width > 0, "intersection.lane_width", "must be > 0")
    check(cfg.intersection.rsu_height > 0, "intersection.rsu_height", "must be > 0")
    check(cfg.speed.min > 0, "speed.min", "must be > 0")
    check(cfg.speed.max >= cfg.speed.min, "speed.max", "must be >= speed.min")
    check(cfg.link_budget_db > 0, "link_budget_db", "must be > 0")
    check(cfg.mobility.min_gap > 0, "mobility.min_gap", "must be > 0")
    check(cfg.mobility.spawn_window >= 0, "mobility.spawn_window", "must be >= 0")
    check(
        cfg.max_hops is None or cfg.max_hops >= 1,
        "max_hops",
        "must be >= 1 or null",
    )

    for path, msg in cfg.channel.problems():
        bad.append((f"channel.{path}", msg))

    check(bool(cfg.vehicle_mix), "vehicle_mix", "must not be empty")
    total_weight = sum(v.weight for v in cfg.vehicle_mix)
    check(total_weight > 0, "vehicle_mix", "weights must sum to a positive value")
    for i, v in enumerate(cfg.vehicle_mix):
        check(
            min(v.length, v.width, v.height) > 0,
            f"vehicle_mix[{i}]",
            "dimensions must be positive",
        )
        check(v.weight >= 0, f"vehicle_mix[{i}].weight", "must be >= 0")
        check(
            0 < v.antenna_height <= v.height + 1.0,
            f"vehicle_mix[{i}].antenna_height",
            "must be within (0, height + 1]",
        )

    return ValidationReport(tuple(bad))
