"""Shared simulation loop for teleoperation: one detector-carrying robot.

`TeleopSim` owns the robot pose, the latched drive command and the seeded
measurement-noise stream; each `tick()` advances one fixed time step and
returns the telemetry frame for that instant.  The headless `replay_script`
runner and the live server both drive this same loop, so a replayed command
script and an interactive session with identical timing produce identical
frames.
"""

from __future__ import annotations

import math
import random
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
from .protocol import KeyMap, DEFAULT_KEYMAP, TelemetryFrame
from .robot import DriveCommand, RobotParams, RobotPose
from .sweep import DEFAULT_DEAD_FRACTION, classify
from .world import WorldScenario, route_direction_at

# Replayed logs keep running this long after the final scripted command.
SCRIPT_TRAIL_S = 1.0


class ScriptError(ValueError):
    """A command script line is malformed or out of order."""


class TeleopSim:
    """Deterministic fixed-tick simulation of the probe-carrying robot."""

    def __init__(
        self,
        scenario: WorldScenario,
        *,
        robot_params: Optional[RobotParams] = None,
        tuned: Optional[OscillatorParams] = None,
        threshold_v: float = DEFAULT_THRESHOLD_V,
        match_tolerance: float = DEFAULT_MATCH_TOLERANCE,
        dead_fraction: float = DEFAULT_DEAD_FRACTION,
        probe_coupling_m2: float = DEFAULT_PROBE_COUPLING_M2,
    ):
        scenario.validate()
        self.scenario = scenario
        self.params = robot_params or RobotParams()
        self.params.validate()
        self.tuned = tuned or DEFAULT_DETECTOR
        self.threshold_v = threshold_v
        self.match_tolerance = match_tolerance
        self.dead_fraction = dead_fraction
        self.probe_coupling_m2 = probe_coupling_m2
        self.rng = random.Random(scenario.noise_seed)

        start = scenario.route.waypoints[0]
        dx, dy = route_direction_at(scenario.route, 0.0)
        self.pose = RobotPose(x=start[0], y=start[1], heading=math.atan2(dy, dx))
        self.command = DriveCommand.STOP
        self.ticks = 0

    @property
    def time_s(self) -> float:
        return self.ticks * self.params.tick_s

    def latch(self, command: DriveCommand) -> None:
        self.command = command

    def tick(self, command: Optional[DriveCommand] = None) -> TelemetryFrame:
        """Advance one time step; optionally latch a new command first."""
        if command is not None:
            self.latch(command)
        self.pose = robot_mod.step(self.pose, self.command, self.params)
        self.ticks += 1
        probe = robot_mod.probe_position(self.pose, self.params)
        sample = field_at(
            self.scenario, probe, probe_coupling_m2=self.probe_coupling_m2
        )
        reading = detect(
            sample,
            self.threshold_v,
            self.tuned,
            self.match_tolerance,
            self.rng,
            self.scenario.noise_sigma_hz,
        )
        fault = classify(
            reading.measured_frequency_hz,
            self.scenario.line_frequency_hz,
            self.dead_fraction,
        )
        return TelemetryFrame(
            t_s=self.time_s,
            x_m=self.pose.x,
            y_m=self.pose.y,
            heading_rad=self.pose.heading,
            frequency_hz=reading.measured_frequency_hz,
            led=reading.led_on,
            fault=fault,
        )


def parse_command_script(
    text: str, keymap: KeyMap = DEFAULT_KEYMAP
) -> list[tuple[float, DriveCommand]]:
    """Parse `<t_seconds> <command_char>` lines, sorted ascending in time."""
    entries = []
    last_t = -math.inf
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ScriptError(f"script line {lineno}: expected '<t_seconds> <char>'")
        try:
            t = float(parts[0])
        except ValueError:
            raise ScriptError(f"script line {lineno}: bad timestamp {parts[0]!r}") from None
        if t < 0.0:
            raise ScriptError(f"script line {lineno}: negative timestamp {t:g}")
        if t < last_t:
            raise ScriptError(
                f"script line {lineno}: timestamp {t:g} goes backwards (previous {last_t:g})"
            )
        last_t = t
        char = parts[1]
        cmd = keymap.command_for(char)
        if cmd is None:
            raise ScriptError(f"script line {lineno}: unmapped command character {char!r}")
        entries.append((t, cmd))
    return entries


def replay_script(
    scenario: WorldScenario,
    script_text: str,
    *,
    duration_s: Optional[float] = None,
    keymap: KeyMap = DEFAULT_KEYMAP,
    robot_params: Optional[RobotParams] = None,
    tuned: Optional[OscillatorParams] = None,
    threshold_v: float = DEFAULT_THRESHOLD_V,
) -> list[TelemetryFrame]:
    """Run a command script headlessly and return every telemetry frame.

    A scripted command takes effect at the first tick boundary at or after
    its timestamp.  Without an explicit duration the log runs until
    SCRIPT_TRAIL_S past the last command (or that long in total for an empty
    script).  Replays are bit-deterministic in the scenario seed.
    """
    commands = parse_command_script(script_text, keymap)
    sim = TeleopSim(
        scenario,
        robot_params=robot_params,
        tuned=tuned,
        threshold_v=threshold_v,
    )
    if duration_s is None:
        duration_s = (commands[-1][0] if commands else 0.0) + SCRIPT_TRAIL_S
    if duration_s <= 0.0:
        raise ScriptError(f"duration must be > 0, got {duration_s:g}")
    total_ticks = max(1, math.ceil(duration_s / sim.params.tick_s - 1e-9))

    frames = []
    next_cmd = 0
    for k in range(total_ticks):
        now = k * sim.params.tick_s
        while next_cmd < len(commands) and commands[next_cmd][0] <= now:
            sim.latch(commands[next_cmd][1])
            next_cmd += 1
        frames.append(sim.tick())
    return frames
