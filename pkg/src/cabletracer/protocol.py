"""Line protocol spoken over the emulated Bluetooth serial link.

Every frame is one newline-terminated text line, identical whether carried
over raw TCP or the WebSocket mirror.

Client -> server:
    PAIR HC-05          pair request (only valid when unpaired)
    MODE CONTROLLER     enter controller mode (only valid when paired)
    <c>                 single mapped drive character (controller mode only)

Server -> client:
    OK PAIRED | OK | ACK <c> | ERR <reason>
    TLM <t> <x> <y> <heading> <freq> <led> <fault>

Any ill-formed or out-of-state frame draws an ERR reply and resets the
session to unpaired, mirroring how the physical module drops a botched
pairing.  Telemetry floats are quantized to six decimals when the frame is
built, which makes encode/parse lossless.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .robot import DriveCommand

PAIR_FRAME = "PAIR HC-05"
MODE_FRAME = "MODE CONTROLLER"
REPLY_PAIRED = "OK PAIRED"
REPLY_OK = "OK"
ERR_WRONG_STATE = "ERR wrong state"
ERR_UNKNOWN_FRAME = "ERR unknown frame"
ERR_UNMAPPED = "ERR unmapped character"
ERR_BUSY = "ERR busy"


class ProtocolError(ValueError):
    """Raised when parsing a malformed frame."""


class SessionState(Enum):
    UNPAIRED = "unpaired"
    PAIRED = "paired"
    CONTROLLER = "controller"


@dataclass(frozen=True)
class KeyMap:
    """Injective mapping from command characters to drive commands."""

    mapping: tuple[tuple[str, DriveCommand], ...]

    def validate(self) -> None:
        chars = [c for c, _ in self.mapping]
        commands = [cmd for _, cmd in self.mapping]
        for c in chars:
            if len(c) != 1:
                raise ValueError(f"keymap keys must be single characters, got {c!r}")
        if len(set(chars)) != len(chars):
            raise ValueError("keymap characters must be unique")
        if len(set(commands)) != len(commands):
            raise ValueError("keymap must not map two characters to one command")
        missing = set(DriveCommand) - set(commands)
        if missing:
            names = ", ".join(sorted(m.value for m in missing))
            raise ValueError(f"keymap must cover all drive commands, missing: {names}")

    def command_for(self, char: str) -> Optional[DriveCommand]:
        for c, cmd in self.mapping:
            if c == char:
                return cmd
        return None

    def char_for(self, command: DriveCommand) -> str:
        for c, cmd in self.mapping:
            if cmd is command:
                return c
        raise KeyError(command)


DEFAULT_KEYMAP = KeyMap(
    mapping=(
        ("F", DriveCommand.FORWARD),
        ("B", DriveCommand.BACKWARD),
        ("L", DriveCommand.LEFT),
        ("R", DriveCommand.RIGHT),
        ("S", DriveCommand.STOP),
    )
)


def load_keymap(text: str) -> KeyMap:
    """Parse a keymap file: one `<char> <command>` pair per line.

    Command names are the drive command names (forward, backward, left,
    right, stop), case-insensitive.  Blank lines and # comments allowed.
    """
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"keymap line {lineno}: expected '<char> <command>'")
        char, name = parts
        try:
            cmd = DriveCommand(name.lower())
        except ValueError:
            raise ValueError(
                f"keymap line {lineno}: unknown command {name!r}"
            ) from None
        pairs.append((char, cmd))
    keymap = KeyMap(mapping=tuple(pairs))
    keymap.validate()
    return keymap


def handle_line(
    state: SessionState, line: str, keymap: KeyMap = DEFAULT_KEYMAP
) -> tuple[SessionState, str, Optional[DriveCommand]]:
    """Advance the session state machine by one received frame.

    Returns (new state, reply line, emitted drive command or None).
    """
    if line == PAIR_FRAME:
        if state is SessionState.UNPAIRED:
            return SessionState.PAIRED, REPLY_PAIRED, None
        return SessionState.UNPAIRED, ERR_WRONG_STATE, None
    if line == MODE_FRAME:
        if state is SessionState.PAIRED:
            return SessionState.CONTROLLER, REPLY_OK, None
        return SessionState.UNPAIRED, ERR_WRONG_STATE, None
    if len(line) == 1:
        if state is not SessionState.CONTROLLER:
            return SessionState.UNPAIRED, ERR_WRONG_STATE, None
        cmd = keymap.command_for(line)
        if cmd is None:
            return SessionState.UNPAIRED, ERR_UNMAPPED, None
        return SessionState.CONTROLLER, f"ACK {line}", cmd
    return SessionState.UNPAIRED, ERR_UNKNOWN_FRAME, None


# ---------------------------------------------------------------------------
# Telemetry frames
# ---------------------------------------------------------------------------

def _q6(value: float) -> float:
    # Quantize to the 6-decimal wire resolution so encode/parse round-trips.
    return round(value, 6)


@dataclass(frozen=True)
class TelemetryFrame:
    t_s: float
    x_m: float
    y_m: float
    heading_rad: float
    frequency_hz: float
    led: bool
    fault: bool

    def __post_init__(self) -> None:
        for name in ("t_s", "x_m", "y_m", "heading_rad", "frequency_hz"):
            object.__setattr__(self, name, _q6(getattr(self, name)))
        if self.led and not self.frequency_hz > 0.0:
            raise ProtocolError("telemetry invariant violated: led on with no frequency")


def encode_telemetry(frame: TelemetryFrame) -> str:
    """One wire line, without the trailing newline."""
    return (
        f"TLM {frame.t_s:.6f} {frame.x_m:.6f} {frame.y_m:.6f} "
        f"{frame.heading_rad:.6f} {frame.frequency_hz:.6f} "
        f"{int(frame.led)} {int(frame.fault)}"
    )


def parse_telemetry(line: str) -> TelemetryFrame:
    """Inverse of encode_telemetry; raises ProtocolError on malformed input."""
    parts = line.strip().split(" ")
    if len(parts) != 8 or parts[0] != "TLM":
        raise ProtocolError(f"not a telemetry frame: {line!r}")
    try:
        t, x, y, heading, freq = (float(p) for p in parts[1:6])
        led_i, fault_i = int(parts[6]), int(parts[7])
    except ValueError:
        raise ProtocolError(f"bad telemetry fields: {line!r}") from None
    if led_i not in (0, 1) or fault_i not in (0, 1):
        raise ProtocolError(f"led/fault flags must be 0 or 1: {line!r}")
    return TelemetryFrame(
        t_s=t,
        x_m=x,
        y_m=y,
        heading_rad=heading,
        frequency_hz=freq,
        led=bool(led_i),
        fault=bool(fault_i),
    )
