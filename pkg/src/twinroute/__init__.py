"""twinroute: deterministic intersection simulator for digital-twin-managed
multi-hop mmWave V2X routing.

The pipeline per timestep: advance traffic -> extract the connectivity
topology -> compute route tables (real-time, predictive or conventional
interval-based) -> score assignments against the ground-truth topology ->
accumulate reliability.
"""

from .channel import BlockageClass, ChannelParams, LinkAssessment, assess_link, default_channel_params, path_loss
from .config import (
    ScenarioConfig,
    config_from_dict,
    config_to_dict,
    default_config,
    load_config,
    save_config,
    validate_config,
)
from .engine import ConfigError, run_replay, run_single, run_variants
from .experiment import SweepCell, SweepSpec, load_sweep_spec, run_sweep
from .geometry import ObstacleBox, blockage_count, box_from_vehicle, segment_intersects_box
from .metrics import ReliabilityAccumulator, RunResult, TimestepOutcome
from .mobility import TrafficState, advance_traffic, init_traffic, read_trace, snapshot_stream, write_trace
from .model import NodeId, NodeKind, Strategy, ValidationReport, VehicleState, WorldSnapshot
from .prediction import (
    ConstantTurnRatePredictor,
    ConstantVelocityPredictor,
    HoldPredictor,
    LearnedPredictor,
    PredictedTrack,
    make_predictor,
    predict,
    prediction_error,
)
from .routing import (
    PredictivePlan,
    Route,
    RouteTable,
    route_conventional,
    route_predictive,
    route_realtime,
    score_route,
    shortest_route,
)
from .topology import ConnectivityGraph, build_topology

__version__ = "0.1.0"

__all__ = [
    "BlockageClass",
    "ChannelParams",
    "ConfigError",
    "ConnectivityGraph",
    "ConstantTurnRatePredictor",
    "ConstantVelocityPredictor",
    "HoldPredictor",
    "LearnedPredictor",
    "LinkAssessment",
    "NodeId",
    "NodeKind",
    "ObstacleBox",
    "PredictedTrack",
    "PredictivePlan",
    "ReliabilityAccumulator",
    "Route",
    "RouteTable",
    "RunResult",
    "ScenarioConfig",
    "Strategy",
    "SweepCell",
    "SweepSpec",
    "TimestepOutcome",
    "TrafficState",
    "ValidationReport",
    "VehicleState",
    "WorldSnapshot",
    "advance_traffic",
    "assess_link",
    "blockage_count",
    "box_from_vehicle",
    "build_topology",
    "config_from_dict",
    "config_to_dict",
    "default_channel_params",
    "default_config",
    "init_traffic",
    "load_config",
    "load_sweep_spec",
    "make_predictor",
    "path_loss",
    "predict",
    "prediction_error",
    "read_trace",
    "route_conventional",
    "route_predictive",
    "route_realtime",
    "run_replay",
    "run_single",
    "run_sweep",
    "run_variants",
    "save_config",
    "score_route",
    "segment_intersects_box",
    "shortest_route",
    "snapshot_stream",
    "validate_config",
    "write_trace",
]
