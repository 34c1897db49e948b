"""Hex-inverter RC astable detector: timing formula and oscillate decision.

Two inverter stages of a CMOS hex inverter wired with a timing resistor R,
series resistor Rs and timing capacitor C free-run with period

    T = R*C * ln( (Vdd + Vd)^2 / (Vt * (Vdd - Vt)) )
      + R*C * K/(1+K) * [ ln( (K*(Vdd + Vt) + (Vt - Vd)) / (K*(Vdd + Vd)) )
                        + ln( (K*(2*Vdd - Vt) + (Vdd - Vt - Vd)) / (K*(Vdd + Vd)) ) ]

    K = Rs / R,    F = 1 / T

where Vdd is the supply, Vd the input protection-diode forward voltage and
Vt the inverter switching threshold.  The expression is evaluated in double
precision exactly as written, with no algebraic rearrangement, so results
are reproducible bit-for-bit.

The detector oscillates only while the probe picks up enough induced voltage
AND the tank frequency matches the line frequency within a relative band;
the LED mirrors the oscillation state.  A blocked detector reads 0 Hz.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .emfield import FieldSample

# Supply range of the hex-inverter IC family used for the detector.
SUPPLY_MIN_V = 3.0
SUPPLY_MAX_V = 15.0

# Applicability guidelines for the timing formula (see validity_report).
SERIES_RATIO_MIN = 2.0
SERIES_RATIO_MAX = 10.0
PARASITIC_C_FLOOR_F = 100e-12
DRIVE_R_FLOOR_OHM = 10e3
IC_DELAY_S = 60e-9
PERIOD_DELAY_MARGIN = 100.0

# Detector tuning used throughout: a 100 kOhm / 470 kOhm / 100 nF tank on a
# 5 V supply lands at about 45.8 Hz, matching a 45 Hz line inside the
# default band.
DEFAULT_DETECTOR = None  # assigned below, after the dataclass exists
DEFAULT_THRESHOLD_V = 1e-3
DEFAULT_MATCH_TOLERANCE = 0.15


class OscillatorParameterError(ValueError):
    """Component values violate the oscillator invariants."""


class OscillatorDomainError(ValueError):
    """A logarithm argument of the timing formula is not positive."""


@dataclass(frozen=True)
class OscillatorParams:
    """Component values of the detector tank circuit."""

    r_ohm: float
    rs_ohm: float
    c_f: float
    v_dd: float
    v_d: float
    v_t: float

    def validate(self) -> None:
        if not self.r_ohm > 0.0:
            raise OscillatorParameterError(f"timing resistor must be > 0, got {self.r_ohm}")
        if not self.rs_ohm > 0.0:
            raise OscillatorParameterError(f"series resistor must be > 0, got {self.rs_ohm}")
        if not self.c_f > 0.0:
            raise OscillatorParameterError(f"timing capacitor must be > 0, got {self.c_f}")
        if not SUPPLY_MIN_V <= self.v_dd <= SUPPLY_MAX_V:
            raise OscillatorParameterError(
                f"supply voltage must be in [{SUPPLY_MIN_V:g}, {SUPPLY_MAX_V:g}] V, "
                f"got {self.v_dd}"
            )
        if not 0.0 < self.v_t < self.v_dd:
            raise OscillatorParameterError(
                f"threshold voltage must satisfy 0 < v_t < v_dd, got v_t={self.v_t}, "
                f"v_dd={self.v_dd}"
            )
        if self.v_d < 0.0:
            raise OscillatorParameterError(f"diode voltage must be >= 0, got {self.v_d}")


@dataclass(frozen=True)
class DetectorReading:
    oscillating: bool
    measured_frequency_hz: float
    led_on: bool


def _log_arguments(params: OscillatorParams) -> list[tuple[str, float]]:
    k = params.rs_ohm / params.r_ohm
    v_dd, v_d, v_t = params.v_dd, params.v_d, params.v_t
    return [
        ("threshold term", (v_dd + v_d) ** 2 / (v_t * (v_dd - v_t))),
        ("charge correction term", (k * (v_dd + v_t) + (v_t - v_d)) / (k * (v_dd + v_d))),
        (
            "discharge correction term",
            (k * (2.0 * v_dd - v_t) + (v_dd - v_t - v_d)) / (k * (v_dd + v_d)),
        ),
    ]


def period(params: OscillatorParams) -> float:
    """Oscillation period in seconds for the given component values."""
    params.validate()
    args = _log_arguments(params)
    for name, value in args:
        if not value > 0.0:
            raise OscillatorDomainError(
                f"log argument of the {name} must be positive, got {value!r}"
            )
    k = params.rs_ohm / params.r_ohm
    rc = params.r_ohm * params.c_f
    t = rc * math.log(args[0][1])
    t += rc * (k / (1.0 + k)) * (math.log(args[1][1]) + math.log(args[2][1]))
    return t


def frequency(params: OscillatorParams) -> float:
    """Oscillation frequency in Hz, the reciprocal of the period."""
    return 1.0 / period(params)


def validity_report(
    params: OscillatorParams,
    *,
    ratio_min: float = SERIES_RATIO_MIN,
    ratio_max: float = SERIES_RATIO_MAX,
    c_floor_f: float = PARASITIC_C_FLOOR_F,
    r_floor_ohm: float = DRIVE_R_FLOOR_OHM,
    ic_delay_s: float = IC_DELAY_S,
    delay_margin: float = PERIOD_DELAY_MARGIN,
) -> list[str]:
    """Warnings for component choices where the timing formula loses accuracy.

    Checks, in order: the series-to-timing resistor ratio band, the parasitic
    capacitance floor, the output drive floor, and the period staying well
    above the IC propagation delay.  Returns one string per violated
    guideline; an empty list means all guidelines hold.
    """
    params.validate()
    warnings = []
    ratio = params.rs_ohm / params.r_ohm
    if not ratio_min <= ratio <= ratio_max:
        warnings.append(
            f"series-resistor-ratio: rs/r = {ratio:g} outside "
            f"[{ratio_min:g}, {ratio_max:g}]; feedback loading or phase shift likely"
        )
    if params.c_f < c_floor_f:
        warnings.append(
            f"timing-capacitor-floor: c = {params.c_f:g} F below {c_floor_f:g} F; "
            f"comparable to the IC's internal capacitance"
        )
    if params.r_ohm < r_floor_ohm:
        warnings.append(
            f"timing-resistor-floor: r = {params.r_ohm:g} Ohm below "
            f"{r_floor_ohm:g} Ohm; output cannot swing to the rails"
        )
    try:
        t = period(params)
    except OscillatorDomainError:
        t = None
    if t is not None and t < delay_margin * ic_delay_s:
        warnings.append(
            f"oscillation-period-floor: period {t:g} s is within {delay_margin:g}x "
            f"of the {ic_delay_s:g} s propagation delay"
        )
    return warnings


def detect(
    field: FieldSample,
    threshold_v: float,
    tuned: OscillatorParams,
    match_tolerance: float,
    rng: random.Random,
    noise_sigma_hz: float,
) -> DetectorReading:
    """Oscillate/LED decision for one probe sample.

    The detector fires when the induced voltage reaches `threshold_v` and the
    tank frequency lies within `match_tolerance` (relative) of the field
    frequency.  A firing detector reports the field frequency plus one
    Gaussian measurement-noise draw from `rng`; a blocked one reports 0 Hz
    and consumes no randomness.
    """
    if not threshold_v > 0.0:
        raise ValueError(f"threshold must be > 0, got {threshold_v}")
    if not 0.0 < match_tolerance < 1.0:
        raise ValueError(f"match tolerance must be in (0, 1), got {match_tolerance}")
    if field.induced_voltage_v >= threshold_v:
        tank = frequency(tuned)
        if abs(tank - field.frequency_hz) <= match_tolerance * field.frequency_hz:
            measured = field.frequency_hz + rng.gauss(0.0, noise_sigma_hz)
            return DetectorReading(
                oscillating=True, measured_frequency_hz=measured, led_on=True
            )
    return DetectorReading(oscillating=False, measured_frequency_hz=0.0, led_on=False)


DEFAULT_DETECTOR = OscillatorParams(
    r_ohm=100e3, rs_ohm=470e3, c_f=100e-9, v_dd=5.0, v_d=0.7, v_t=2.5
)
