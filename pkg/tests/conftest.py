from __future__ import annotations

import math

import pytest

from twinroute.model import NodeId, VehicleState, WorldSnapshot

SEDAN = dict(dimensions=(4.5, 1.8, 1.5), antenna_height=1.6)
TRUCK = dict(dimensions=(8.0, 2.5, 3.2), antenna_height=3.3)


def pytest_addoption(parser):
    parser.addoption(
        "--extended",
        action="store_true",
        default=False,
        help="scale fuzz sizes up beyond the defaults",
    )


# acceptance verdict lines, one per criterion, echoed after the test run
# (they would otherwise disappear into pytest's output capture)
CRITERION_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if CRITERION_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture
def fuzz_scale(request):
    return 4 if request.config.getoption("--extended") else 1


def make_vehicle(
    index: int,
    x: float,
    y: float,
    heading: float = 0.0,
    speed: float = 10.0,
    connected: bool = True,
    body: dict = SEDAN,
) -> VehicleState:
    return VehicleState(
        id=NodeId.vehicle(index),
        position=(x, y, 0.0),
        heading=heading,
        speed=speed,
        connected=connected,
        **body,
    )


def make_snapshot(
    vehicles,
    timestep: int = 0,
    sim_time: float | None = None,
    rsu_height: float = 5.0,
) -> WorldSnapshot:
    return WorldSnapshot(
        timestep=timestep,
        sim_time=timestep * 0.1 if sim_time is None else sim_time,
        vehicles=tuple(vehicles),
        rsu_position=(0.0, 0.0, rsu_height),
    )


def circle_history(radius: float, speed: float, dt: float, n: int, z0_angle: float = 0.0):
    """Vehicle states moving counter-clockwise on a circle centered at origin.

    The last state ends wherever n steps put it; headings are exact
    tangents, so a constant-turn-rate extrapolation should continue the
    circle analytically.
    """
    omega = speed / radius
    states = []
    for k in range(n):
        ang = z0_angle + omega * dt * k
        states.append(
            VehicleState(
                id=NodeId.vehicle(0),
                position=(radius * math.cos(ang), radius * math.sin(ang), 0.0),
                heading=ang + math.pi / 2.0,
                speed=speed,
                connected=True,
                **SEDAN,
            )
        )
    return states
