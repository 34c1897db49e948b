"""Simulated ground truth: cable geometry, line parameters and injected faults.

A scenario is loaded from a small TOML-style text file (see `load_scenario`)
and is immutable afterwards, so it can be shared freely between the sweep
engine, the teleoperation server and the CLI.  All validation happens at load
time; every rejected file produces an error naming the violated rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

# Default burial depth: 25 inches, the usual trench depth for distribution cable.
DEFAULT_DEPTH_M = 0.635

# Accepted line-frequency band.  Mains is 50-60 Hz; the reference bench run
# measured about 45 Hz, so the band is kept a little wider than mains.
LINE_FREQUENCY_MIN_HZ = 40.0
LINE_FREQUENCY_MAX_HZ = 70.0

# Hard ceiling on line voltage for scenarios this tool accepts.
LINE_VOLTAGE_MAX_V = 440.0


class ScenarioError(ValueError):
    """Base class for scenario-file problems."""


class ScenarioParseError(ScenarioError):
    """The file text is not well formed."""


class ScenarioValidationError(ScenarioError):
    """The file parsed but violates a scenario invariant."""


class FaultKind(Enum):
    OPEN = "open"
    SHORT = "short"
    EARTH = "earth"


@dataclass(frozen=True)
class CableRoute:
    """Surface polyline of the buried cable plus its uniform burial depth.

    Waypoints are (x, y) metres in ground-surface coordinates; the cable runs
    directly below the polyline at `depth_m` (positive downward).
    """

    waypoints: tuple[tuple[float, float], ...]
    depth_m: float

    def validate(self) -> None:
        if len(self.waypoints) < 2:
            raise ScenarioValidationError("route needs at least 2 waypoints")
        for wp in self.waypoints:
            if not all(math.isfinite(c) for c in wp):
                raise ScenarioValidationError(f"waypoints must be finite, got {wp}")
        for a, b in zip(self.waypoints, self.waypoints[1:]):
            if math.dist(a, b) == 0.0:
                raise ScenarioValidationError(
                    f"consecutive waypoints must be distinct, got repeated {a}"
                )
        if not (math.isfinite(self.depth_m) and self.depth_m > 0.0):
            raise ScenarioValidationError(f"depth must be > 0, got {self.depth_m}")
        if not self.length() > 0.0:
            raise ScenarioValidationError("route length must be positive")

    def segment_lengths(self) -> list[float]:
        return [math.dist(a, b) for a, b in zip(self.waypoints, self.waypoints[1:])]

    def length(self) -> float:
        return sum(self.segment_lengths())


@dataclass(frozen=True)
class FaultSpec:
    kind: FaultKind
    position_m: float


@dataclass(frozen=True)
class WorldScenario:
    route: CableRoute
    line_current_a: float
    line_voltage_v: float
    line_frequency_hz: float
    noise_seed: int
    noise_sigma_hz: float
    fault: Optional[FaultSpec] = None

    def validate(self) -> None:
        self.route.validate()
        if not (math.isfinite(self.line_current_a) and self.line_current_a > 0.0):
            raise ScenarioValidationError(
                f"line current must be positive and finite, got {self.line_current_a}"
            )
        if not (
            math.isfinite(self.line_voltage_v)
            and self.line_voltage_v <= LINE_VOLTAGE_MAX_V
        ):
            raise ScenarioValidationError(
                f"line voltage must be <= {LINE_VOLTAGE_MAX_V:g} V, "
                f"got {self.line_voltage_v:g}"
            )
        if not (
            LINE_FREQUENCY_MIN_HZ <= self.line_frequency_hz <= LINE_FREQUENCY_MAX_HZ
        ):
            raise ScenarioValidationError(
                f"line frequency must be in [{LINE_FREQUENCY_MIN_HZ:g}, "
                f"{LINE_FREQUENCY_MAX_HZ:g}] Hz, got {self.line_frequency_hz:g}"
            )
        if not (math.isfinite(self.noise_sigma_hz) and self.noise_sigma_hz >= 0.0):
            raise ScenarioValidationError(
                f"noise sigma must be >= 0 and finite, got {self.noise_sigma_hz}"
            )
        if self.fault is not None:
            length = self.route.length()
            if not (
                math.isfinite(self.fault.position_m)
                and 0.0 < self.fault.position_m < length
            ):
                raise ScenarioValidationError(
                    f"fault position must lie strictly inside the route "
                    f"(0, {length:g}), got {self.fault.position_m:g}"
                )

    def with_seed(self, seed: int) -> "WorldScenario":
        return replace(self, noise_seed=seed)


# ---------------------------------------------------------------------------
# Route geometry
# ---------------------------------------------------------------------------

def route_length(route: CableRoute) -> float:
    return route.length()


def point_on_route(route: CableRoute, s: float) -> tuple[float, float]:
    """Surface point at arc-length `s` along the polyline.

    Linear interpolation inside each segment; raises ValueError outside
    [0, length] (beyond a hair of floating slack).
    """
    total = route.length()
    eps = 1e-9 * max(1.0, total)
    if s < -eps or s > total + eps:
        raise ValueError(f"arc-length {s!r} outside route [0, {total!r}]")
    s = min(max(s, 0.0), total)
    remaining = s
    last = len(route.waypoints) - 2
    for i, (a, b) in enumerate(zip(route.waypoints, route.waypoints[1:])):
        seg = math.dist(a, b)
        if remaining <= seg or i == last:
            t = min(remaining / seg, 1.0)
            return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
        remaining -= seg
    return route.waypoints[-1]


def route_direction_at(route: CableRoute, s: float) -> tuple[float, float]:
    """Unit direction of the segment containing arc-length `s`."""
    total = route.length()
    s = min(max(s, 0.0), total)
    remaining = s
    last = len(route.waypoints) - 2
    for i, (a, b) in enumerate(zip(route.waypoints, route.waypoints[1:])):
        seg = math.dist(a, b)
        if remaining < seg or i == last:
            return ((b[0] - a[0]) / seg, (b[1] - a[1]) / seg)
        remaining -= seg
    raise AssertionError("unreachable")


def nearest_arc_on_route(
    route: CableRoute, point: tuple[float, float]
) -> tuple[float, float]:
    """Arc-length of the route point closest to `point`, plus that distance.

    Ties between segments resolve to the smaller arc-length.
    """
    px, py = point
    best_arc = 0.0
    best_d2 = math.inf
    arc_base = 0.0
    for a, b in zip(route.waypoints, route.waypoints[1:]):
        ax, ay = a
        bx, by = b
        dx, dy = bx - ax, by - ay
        seg2 = dx * dx + dy * dy
        t = ((px - ax) * dx + (py - ay) * dy) / seg2
        t = min(max(t, 0.0), 1.0)
        cx, cy = ax + t * dx, ay + t * dy
        d2 = (px - cx) ** 2 + (py - cy) ** 2
        if d2 < best_d2:
            best_d2 = d2
            best_arc = arc_base + t * math.sqrt(seg2)
        arc_base += math.sqrt(seg2)
    return best_arc, math.sqrt(best_d2)


# ---------------------------------------------------------------------------
# Scenario file parsing (TOML-style subset)
# ---------------------------------------------------------------------------
#
# Supported grammar, one construct per line:
#   [section]
#   key = <number> | "<string>" | [ ... ]        (arrays must fit one line)
#   # comment / blank lines anywhere
#
# This covers the whole scenario schema without pulling in a TOML dependency
# (the stdlib parser only exists from Python 3.11).

def _parse_value(text: str, lineno: int):
    text = text.strip()
    if not text:
        raise ScenarioParseError(f"line {lineno}: missing value")
    if text.startswith('"'):
        if not (text.endswith('"') and len(text) >= 2):
            raise ScenarioParseError(f"line {lineno}: unterminated string")
        return text[1:-1]
    if text.startswith("["):
        if not text.endswith("]"):
            raise ScenarioParseError(f"line {lineno}: unterminated array")
        items = []
        depth = 0
        start = 1
        for i, ch in enumerate(text):
            if ch == "[":
                depth += 1
                if depth == 2:
                    start = i
            elif ch == "]":
                depth -= 1
                if depth == 1:
                    items.append(_parse_value(text[start : i + 1], lineno))
                if depth < 0:
                    raise ScenarioParseError(f"line {lineno}: unbalanced brackets")
            elif ch == "," and depth == 1:
                chunk = text[start:i].strip()
                # scalar items only; nested arrays were consumed at their "]"
                if chunk and not chunk.startswith("["):
                    items.append(_parse_value(chunk, lineno))
                start = i + 1
        if depth != 0:
            raise ScenarioParseError(f"line {lineno}: unbalanced brackets")
        tail = text[start:-1].strip()
        if tail and not tail.startswith("["):
            items.append(_parse_value(tail, lineno))
        return items
    try:
        if any(c in text for c in ".eE") and not text.lstrip("+-").isdigit():
            return float(text)
        return int(text)
    except ValueError:
        raise ScenarioParseError(f"line {lineno}: cannot parse value {text!r}") from None


def _strip_comment(line: str) -> str:
    out = []
    in_string = False
    for ch in line:
        if ch == '"':
            in_string = not in_string
        if ch == "#" and not in_string:
            break
        out.append(ch)
    return "".join(out)


def parse_scenario_text(text: str) -> dict:
    """Parse scenario text into nested dicts, without semantic validation."""
    data: dict = {}
    section: Optional[str] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ScenarioParseError(f"line {lineno}: malformed section header")
            section = line[1:-1].strip()
            if not section:
                raise ScenarioParseError(f"line {lineno}: empty section name")
            if section in data:
                raise ScenarioParseError(f"line {lineno}: duplicate section [{section}]")
            data[section] = {}
            continue
        if "=" not in line:
            raise ScenarioParseError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ScenarioParseError(f"line {lineno}: empty key")
        target = data if section is None else data[section]
        if key in target:
            raise ScenarioParseError(f"line {lineno}: duplicate key {key!r}")
        target[key] = _parse_value(value, lineno)
    return data


def _require(table: dict, section: str, key: str):
    if section not in table or not isinstance(table[section], dict):
        raise ScenarioParseError(f"missing section [{section}]")
    if key not in table[section]:
        raise ScenarioParseError(f"missing key {key!r} in section [{section}]")
    return table[section][key]


def _as_float(value, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioParseError(f"{what} must be a number, got {value!r}")
    return float(value)


def load_scenario(text: str) -> WorldScenario:
    """Parse and validate a scenario file, returning the immutable world."""
    data = parse_scenario_text(text)

    raw_waypoints = _require(data, "route", "waypoints")
    if not isinstance(raw_waypoints, list):
        raise ScenarioParseError("route.waypoints must be a list of [x, y] pairs")
    waypoints = []
    for i, wp in enumerate(raw_waypoints):
        if not (isinstance(wp, list) and len(wp) == 2):
            raise ScenarioParseError(
                f"route.waypoints[{i}] must be an [x, y] pair, got {wp!r}"
            )
        waypoints.append(
            (_as_float(wp[0], f"waypoint[{i}].x"), _as_float(wp[1], f"waypoint[{i}].y"))
        )

    route = CableRoute(
        waypoints=tuple(waypoints),
        depth_m=_as_float(_require(data, "route", "depth_m"), "route.depth_m"),
    )

    fault = None
    if "fault" in data:
        raw_fault = data["fault"]
        if isinstance(raw_fault, list):
            raise ScenarioValidationError("at most one fault per scenario is supported")
        if not isinstance(raw_fault, dict):
            raise ScenarioParseError("fault must be a [fault] table")
        kind_name = raw_fault.get("kind")
        try:
            kind = FaultKind(kind_name)
        except ValueError:
            raise ScenarioValidationError(
                f"fault.kind must be one of open/short/earth, got {kind_name!r}"
            ) from None
        if "position_m" not in raw_fault:
            raise ScenarioParseError("missing key 'position_m' in section [fault]")
        fault = FaultSpec(
            kind=kind,
            position_m=_as_float(raw_fault["position_m"], "fault.position_m"),
        )

    seed = _require(data, "noise", "seed")
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ScenarioParseError(f"noise.seed must be an integer, got {seed!r}")

    scenario = WorldScenario(
        route=route,
        line_current_a=_as_float(_require(data, "line", "current_a"), "line.current_a"),
        line_voltage_v=_as_float(_require(data, "line", "voltage_v"), "line.voltage_v"),
        line_frequency_hz=_as_float(
            _require(data, "line", "frequency_hz"), "line.frequency_hz"
        ),
        noise_seed=seed,
        noise_sigma_hz=_as_float(_require(data, "noise", "sigma_hz"), "noise.sigma_hz"),
        fault=fault,
    )
    scenario.validate()
    return scenario


def save_scenario(scenario: WorldScenario) -> str:
    """Serialize a scenario to the same file format `load_scenario` reads.

    Round-trips exactly: load_scenario(save_scenario(s)) == s.
    """
    wp = ", ".join(f"[{x!r}, {y!r}]" for x, y in scenario.route.waypoints)
    lines = [
        "[route]",
        f"waypoints = [{wp}]",
        f"depth_m = {scenario.route.depth_m!r}",
        "",
        "[line]",
        f"current_a = {scenario.line_current_a!r}",
        f"voltage_v = {scenario.line_voltage_v!r}",
        f"frequency_hz = {scenario.line_frequency_hz!r}",
        "",
        "[noise]",
        f"seed = {scenario.noise_seed}",
        f"sigma_hz = {scenario.noise_sigma_hz!r}",
    ]
    if scenario.fault is not None:
        lines += [
            "",
            "[fault]",
            f'kind = "{scenario.fault.kind.value}"',
            f"position_m = {scenario.fault.position_m!r}",
        ]
    return "\n".join(lines) + "\n"
