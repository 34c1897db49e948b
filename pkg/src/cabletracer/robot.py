"""Differential-drive chassis kinematics.

The drive commands map onto an H-bridge pair: Forward/Backward run both
wheels together, Left/Right run them in opposition so the robot spins in
place, Stop holds position.  Commands are latched by the callers (the last
command stays in effect until replaced); this module is the pure per-tick
pose update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class DriveCommand(Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    LEFT = "left"
    RIGHT = "right"
    STOP = "stop"


@dataclass(frozen=True)
class RobotPose:
    x: float
    y: float
    heading: float  # radians in (-pi, pi]


@dataclass(frozen=True)
class RobotParams:
    speed_mps: float = 0.1
    turn_rate_rps: float = 1.0
    tick_s: float = 0.1
    probe_offset_m: float = 0.05

    def validate(self) -> None:
        if not self.speed_mps > 0.0:
            raise ValueError(f"speed must be > 0, got {self.speed_mps}")
        if not self.turn_rate_rps > 0.0:
            raise ValueError(f"turn rate must be > 0, got {self.turn_rate_rps}")
        if not self.tick_s > 0.0:
            raise ValueError(f"tick must be > 0, got {self.tick_s}")
        if self.probe_offset_m < 0.0:
            raise ValueError(f"probe offset must be >= 0, got {self.probe_offset_m}")


def normalize_heading(heading: float) -> float:
    """Wrap into (-pi, pi]."""
    wrapped = math.remainder(heading, math.tau)
    return math.pi if wrapped == -math.pi else wrapped


def step(pose: RobotPose, cmd: DriveCommand, params: RobotParams) -> RobotPose:
    """Advance one tick under the latched command."""
    if cmd is DriveCommand.STOP:
        return pose
    if cmd is DriveCommand.FORWARD or cmd is DriveCommand.BACKWARD:
        sign = 1.0 if cmd is DriveCommand.FORWARD else -1.0
        d = sign * params.speed_mps * params.tick_s
        return RobotPose(
            x=pose.x + d * math.cos(pose.heading),
            y=pose.y + d * math.sin(pose.heading),
            heading=pose.heading,
        )
    sign = 1.0 if cmd is DriveCommand.LEFT else -1.0
    return RobotPose(
        x=pose.x,
        y=pose.y,
        heading=normalize_heading(pose.heading + sign * params.turn_rate_rps * params.tick_s),
    )


def probe_position(pose: RobotPose, params: RobotParams) -> tuple[float, float]:
    """Surface position of the pickup probe, mounted ahead of the pose centre."""
    return (
        pose.x + params.probe_offset_m * math.cos(pose.heading),
        pose.y + params.probe_offset_m * math.sin(pose.heading),
    )
