from __future__ import annotations

import math
import stat

import pytest

from twinroute.prediction import (
    ConstantTurnRatePredictor,
    ConstantVelocityPredictor,
    HoldPredictor,
    LearnedPredictor,
    make_predictor,
    predict,
    prediction_error,
)

from conftest import circle_history, make_vehicle


def test_stationary_vehicle_any_predictor_holds():
    history = [make_vehicle(0, 5.0, 7.0, speed=0.0)] * 3
    for predictor in (HoldPredictor(), ConstantVelocityPredictor(), ConstantTurnRatePredictor()):
        track = predict(history, horizon=1.0, dt=0.1, predictor=predictor)
        assert len(track.states) == 10
        for s in track.states:
            assert s.position == (5.0, 7.0, 0.0)


def test_constant_velocity_linear_kinematics():
    history = [make_vehicle(0, -1.0, 0.0, speed=10.0), make_vehicle(0, 0.0, 0.0, speed=10.0)]
    track = predict(history, horizon=1.0, dt=0.5, predictor=ConstantVelocityPredictor())
    positions = [s.position for s in track.states]
    assert positions == [(5.0, 0.0, 0.0), (10.0, 0.0, 0.0)]


def test_track_shape_contract():
    history = [make_vehicle(0, 0.0, 0.0), make_vehicle(0, 1.0, 0.0)]
    track = predict(history, horizon=3.0, dt=0.1, predictor=ConstantVelocityPredictor(), last_timestep=42)
    assert len(track.states) == 30
    steps = [s.timestep for s in track.states]
    assert steps == list(range(43, 73))


def test_constant_turn_rate_follows_the_arc():
    """Exact circular history in, analytic circle out, to 1e-6 m."""
    radius, speed, dt = 12.0, 6.0, 0.1
    history = circle_history(radius, speed, dt, n=5)
    horizon = (math.pi / 2) * radius / speed  # quarter circle ahead
    track = predict(history, horizon, dt, ConstantTurnRatePredictor())
    omega = speed / radius
    start_angle = omega * dt * 4  # history has 5 samples starting at angle 0
    for j, s in enumerate(track.states, start=1):
        ang = start_angle + omega * dt * j
        expect = (radius * math.cos(ang), radius * math.sin(ang))
        assert math.dist(s.position[:2], expect) < 1e-6


def test_truncation_consistency():
    history = circle_history(9.0, 5.0, 0.1, n=4)
    for predictor in (HoldPredictor(), ConstantVelocityPredictor(), ConstantTurnRatePredictor()):
        long = predict(history, horizon=2.0, dt=0.1, predictor=predictor)
        short = predict(history, horizon=1.0, dt=0.1, predictor=predictor)
        assert long.states[: len(short.states)] == short.states


def test_cv_error_grows_with_horizon_on_curves():
    radius, speed, dt = 12.0, 6.0, 0.1
    history = circle_history(radius, speed, dt, n=4)
    track = predict(history, horizon=3.0, dt=dt, predictor=ConstantVelocityPredictor())
    omega = speed / radius
    start_angle = omega * dt * 3
    last = history[-1]
    errors = []
    for j, s in enumerate(track.states, start=1):
        ang = start_angle + omega * dt * j
        truth = (radius * math.cos(ang), radius * math.sin(ang))
        errors.append(math.dist(s.position[:2], truth))
    assert all(b >= a for a, b in zip(errors, errors[1:]))
    # chord-vs-arc closed form at the last step
    phi = omega * dt * len(track.states)
    expect = radius * math.hypot(phi - math.sin(phi), 1.0 - math.cos(phi))
    assert errors[-1] == pytest.approx(expect, abs=1e-9)


def test_insufficient_history_falls_back_to_hold():
    history = [make_vehicle(0, 3.0, 1.0, speed=8.0)]
    track = predict(history, horizon=1.0, dt=0.1, predictor=ConstantVelocityPredictor())
    assert track.degraded
    assert all(s.position == (3.0, 1.0, 0.0) for s in track.states)


def test_empty_history_rejected():
    with pytest.raises(ValueError):
        predict([], 1.0, 0.1, HoldPredictor())


def test_prediction_error_perfect_and_offset():
    history = [make_vehicle(0, 0.0, 0.0, speed=0.0)] * 2
    track = predict(history, horizon=0.5, dt=0.1, predictor=HoldPredictor(), last_timestep=0)
    truth_same = [(s.timestep, make_vehicle(0, 0.0, 0.0)) for s in track.states]
    assert prediction_error(track, truth_same) == 0.0
    truth_offset = [(s.timestep, make_vehicle(0, 2.0, 0.0)) for s in track.states]
    assert prediction_error(track, truth_offset) == pytest.approx(2.0)


def test_prediction_error_misalignment_rejected():
    history = [make_vehicle(0, 0.0, 0.0)] * 2
    track = predict(history, horizon=0.3, dt=0.1, predictor=HoldPredictor(), last_timestep=0)
    wrong_steps = [(s.timestep + 1, make_vehicle(0, 0.0, 0.0)) for s in track.states]
    with pytest.raises(ValueError):
        prediction_error(track, wrong_steps)
    with pytest.raises(ValueError):
        prediction_error(track, wrong_steps[:-1])


def test_make_predictor_kinds():
    assert make_predictor("hold").kind == "hold"
    assert make_predictor("constant_velocity").kind == "constant_velocity"
    assert make_predictor("constant_turn_rate").kind == "constant_turn_rate"
    with pytest.raises(ValueError):
        make_predictor("lstm")


CV_STUB = """#!/usr/bin/env python3
# reference exchange model: constant velocity from the last history row
import math, sys
steps, dt = int(sys.argv[1]), float(sys.argv[2])
rows = [line.split(",") for line in sys.stdin.read().splitlines() if line.strip()]
ts, t, vid, conn, x, y, heading, speed = rows[-1]
x, y, heading, speed = float(x), float(y), float(heading), float(speed)
for j in range(1, steps + 1):
    px = x + speed * math.cos(heading) * dt * j
    py = y + speed * math.sin(heading) * dt * j
    print(f"{int(ts)+j},{float(t)+dt*j!r},{vid},{conn},{px!r},{py!r},{heading!r},{speed!r}")
"""


@pytest.fixture
def cv_stub(tmp_path):
    path = tmp_path / "cv_model.py"
    path.write_text(CV_STUB, encoding="utf-8")
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return path


def test_learned_predictor_subprocess_exchange(cv_stub):
    history = [make_vehicle(0, 0.0, 0.0, heading=0.0, speed=10.0)] * 2
    learned = LearnedPredictor(("python3", str(cv_stub)))
    track = predict(history, horizon=1.0, dt=0.5, predictor=learned)
    internal = predict(history, horizon=1.0, dt=0.5, predictor=ConstantVelocityPredictor())
    assert [s.position for s in track.states] == [s.position for s in internal.states]


def test_learned_predictor_bad_command_raises():
    history = [make_vehicle(0, 0.0, 0.0)] * 2
    learned = LearnedPredictor(("python3", "-c", "import sys; sys.exit(3)"))
    with pytest.raises(RuntimeError):
        learned.extrapolate(history, 5, 0.1)
