"""Deterministic simulator of a teleoperated underground-cable fault tracer."""

__version__ = "0.1.0"

from .emfield import FieldSample, detection_range, field_at
from .oscillator import (
    DetectorReading,
    OscillatorParams,
    detect,
    frequency,
    period,
    validity_report,
)
from .protocol import KeyMap, SessionState, TelemetryFrame, handle_line
from .robot import DriveCommand, RobotParams, RobotPose, probe_position, step
from .sweep import FaultReport, SweepRecord, classify, localize, run_sweep
from .world import (
    CableRoute,
    FaultKind,
    FaultSpec,
    WorldScenario,
    load_scenario,
    point_on_route,
    save_scenario,
)

__all__ = [
    "CableRoute",
    "DetectorReading",
    "DriveCommand",
    "FaultKind",
    "FaultReport",
    "FaultSpec",
    "FieldSample",
    "KeyMap",
    "OscillatorParams",
    "RobotParams",
    "RobotPose",
    "SessionState",
    "SweepRecord",
    "TelemetryFrame",
    "WorldScenario",
    "classify",
    "detect",
    "detection_range",
    "field_at",
    "frequency",
    "handle_line",
    "load_scenario",
    "localize",
    "period",
    "point_on_route",
    "probe_position",
    "run_sweep",
    "save_scenario",
    "step",
    "validity_report",
]
