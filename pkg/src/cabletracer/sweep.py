"""Tracer-method sweep: drive along the route, sample, classify, localize.

The robot is actually driven to each sample stop with tick-quantized drive
commands (no teleporting): each tick the driver tries all four drive actions
on the kinematic model and commits the one that brings the probe closest to
the stop point.  Greedy descent over the full action set converges from any
pose with these kinematics (a tick budget guards the degenerate corners).
Each stop is targeted slightly short, by design: the probe settles within
about two drive ticks *before* the nominal arc-length and never past it, so
a stop that coincides exactly with a break samples the live side, the way a
physical tracer walking up to the break still hears the signal at the break
itself.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional

from . import robot as robot_mod
from .emfield import DEFAULT_PROBE_COUPLING_M2, field_at
from .oscillator import (
    DEFAULT_DETECTOR,
    DEFAULT_MATCH_TOLERANCE,
    DEFAULT_THRESHOLD_V,
    OscillatorParams,
    detect,
)
from .robot import DriveCommand, RobotParams, RobotPose
from .world import WorldScenario, point_on_route, route_direction_at

DEFAULT_DEAD_FRACTION = 0.1


@dataclass(frozen=True)
class SweepRecord:
    """One sample stop: arc distance, measured frequency, fault flag."""

    distance_m: float
    frequency_hz: float
    fault: bool


@dataclass(frozen=True)
class FaultReport:
    found: bool
    interval_low_m: float = 0.0
    interval_high_m: float = 0.0

    @property
    def midpoint_m(self) -> float:
        return 0.5 * (self.interval_low_m + self.interval_high_m)


def classify(frequency_hz: float, expected_hz: float, dead_fraction: float = DEFAULT_DEAD_FRACTION) -> bool:
    """True (fault) when the reading collapsed below the dead cutoff."""
    if not expected_hz > 0.0:
        raise ValueError(f"expected frequency must be > 0, got {expected_hz}")
    if not 0.0 < dead_fraction < 1.0:
        raise ValueError(f"dead fraction must be in (0, 1), got {dead_fraction}")
    return frequency_hz < dead_fraction * expected_hz


def localize(records: list[SweepRecord]) -> FaultReport:
    """Bracket the break between the last live stop and the first dead stop."""
    if not records:
        raise ValueError("cannot localize from an empty record list")
    last_live: Optional[float] = None
    for record in records:
        if record.fault:
            low = 0.0 if last_live is None else last_live
            return FaultReport(found=True, interval_low_m=low, interval_high_m=record.distance_m)
        last_live = record.distance_m
    return FaultReport(found=False)


def sample_stops(route_length: float, step: float) -> list[float]:
    """Arc-lengths step, 2*step, ... not exceeding the route length."""
    stops = []
    k = 1
    while k * step <= route_length + 1e-9:
        stops.append(min(k * step, route_length))
        k += 1
    return stops


class _StopDriver:
    """Drives the probe to successive route stops with latched commands."""

    _MOVES = (
        DriveCommand.FORWARD,
        DriveCommand.BACKWARD,
        DriveCommand.LEFT,
        DriveCommand.RIGHT,
    )

    def __init__(self, scenario: WorldScenario, params: RobotParams):
        self.scenario = scenario
        self.params = params
        start = scenario.route.waypoints[0]
        dx, dy = route_direction_at(scenario.route, 0.0)
        self.pose = RobotPose(x=start[0], y=start[1], heading=math.atan2(dy, dx))

    def drive_to_stop(self, stop_arc: float) -> tuple[float, float]:
        """Advance tick-by-tick until the probe settles just short of the stop.

        Returns the probe position at the settled pose.
        """
        params = self.params
        forward_tick = params.speed_mps * params.tick_s
        turn_tick = params.turn_rate_rps * params.tick_s
        # Aim 1.1 ticks short and accept within one tick: the probe lands
        # 0.1 to 2.1 forward ticks before the nominal arc, never past it.
        aim_arc = max(stop_arc - 1.1 * forward_tick, 0.0)
        target = point_on_route(self.scenario.route, aim_arc)

        probe = robot_mod.probe_position(self.pose, params)
        distance = math.dist(probe, target)
        budget = int(8 * (distance / forward_tick + math.tau / turn_tick)) + 500
        for _ in range(budget):
            if distance <= forward_tick:
                return probe
            best = None
            for cmd in self._MOVES:
                pose = robot_mod.step(self.pose, cmd, params)
                d = math.dist(robot_mod.probe_position(pose, params), target)
                if best is None or d < best[0]:
                    best = (d, pose)
            distance, self.pose = best
            probe = robot_mod.probe_position(self.pose, params)
        raise RuntimeError(
            f"robot failed to reach stop at {stop_arc:g} m within {budget} ticks"
        )


def run_sweep(
    scenario: WorldScenario,
    step: float,
    tuned: Optional[OscillatorParams] = None,
    threshold_v: float = DEFAULT_THRESHOLD_V,
    *,
    full: bool = False,
    robot_params: Optional[RobotParams] = None,
    match_tolerance: float = DEFAULT_MATCH_TOLERANCE,
    dead_fraction: float = DEFAULT_DEAD_FRACTION,
    probe_coupling_m2: float = DEFAULT_PROBE_COUPLING_M2,
    rng: Optional[random.Random] = None,
) -> list[SweepRecord]:
    """Sweep the route at fixed arc intervals and record detector readings.

    Stops at the first fault sample unless `full` is set, which continues to
    the route end for plotting the whole frequency series.
    """
    scenario.validate()
    length = scenario.route.length()
    if not 0.0 < step <= length:
        raise ValueError(f"step must be in (0, route length {length:g}], got {step}")
    if tuned is None:
        tuned = DEFAULT_DETECTOR
    if robot_params is None:
        robot_params = RobotParams()
    robot_params.validate()
    if rng is None:
        rng = random.Random(scenario.noise_seed)

    driver = _StopDriver(scenario, robot_params)
    records = []
    for stop in sample_stops(length, step):
        probe = driver.drive_to_stop(stop)
        sample = field_at(scenario, probe, probe_coupling_m2=probe_coupling_m2)
        reading = detect(
            sample, threshold_v, tuned, match_tolerance, rng, scenario.noise_sigma_hz
        )
        fault = classify(
            reading.measured_frequency_hz, scenario.line_frequency_hz, dead_fraction
        )
        records.append(
            SweepRecord(
                distance_m=stop,
                frequency_hz=reading.measured_frequency_hz,
                fault=fault,
            )
        )
        if fault and not full:
            break
    return records
