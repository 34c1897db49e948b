import random

import mpmath as mp
import pytest

from cabletracer.emfield import FieldSample, field_at
from cabletracer.oscillator import (
    DEFAULT_DETECTOR,
    OscillatorDomainError,
    OscillatorParameterError,
    OscillatorParams,
    detect,
    frequency,
    period,
    validity_report,
)

# Reference point evaluated at 50 significant digits, independently of the
# package, before being pinned here.
REFERENCE_PARAMS = OscillatorParams(
    r_ohm=100e3, rs_ohm=470e3, c_f=100e-9, v_dd=5.0, v_d=0.7, v_t=2.5
)
REFERENCE_PERIOD_S = 0.021830619176773369722
REFERENCE_FREQUENCY_HZ = 45.807221128384090415


def period_reference(r, rs, c, v_dd, v_d, v_t):
    """High-precision evaluation of the timing formula (independent oracle)."""
    with mp.workdps(50):
        r, rs, c, v_dd, v_d, v_t = map(mp.mpf, (r, rs, c, v_dd, v_d, v_t))
        k = rs / r
        rc = r * c
        t = rc * mp.log((v_dd + v_d) ** 2 / (v_t * (v_dd - v_t)))
        t += (
            rc
            * (k / (1 + k))
            * (
                mp.log((k * (v_dd + v_t) + (v_t - v_d)) / (k * (v_dd + v_d)))
                + mp.log((k * (2 * v_dd - v_t) + (v_dd - v_t - v_d)) / (k * (v_dd + v_d)))
            )
        )
        return t


def random_valid_params(rng: random.Random) -> OscillatorParams:
    while True:
        r = 10 ** rng.uniform(3.0, 6.5)
        rs = r * 10 ** rng.uniform(-1.0, 1.3)
        c = 10 ** rng.uniform(-11.0, -5.0)
        v_dd = rng.uniform(3.0, 15.0)
        v_t = v_dd * rng.uniform(0.15, 0.85)
        v_d = rng.uniform(0.0, 1.2)
        params = OscillatorParams(r_ohm=r, rs_ohm=rs, c_f=c, v_dd=v_dd, v_d=v_d, v_t=v_t)
        try:
            period(params)
        except OscillatorDomainError:
            continue
        return params


class TestPeriod:
    def test_reference_point_confirmed_by_oracle(self):
        oracle = period_reference(100e3, 470e3, 100e-9, 5.0, 0.7, 2.5)
        assert abs(float(oracle) - REFERENCE_PERIOD_S) < 1e-15
        assert abs(float(1 / oracle) - REFERENCE_FREQUENCY_HZ) < 1e-10

    def test_reference_period(self):
        assert period(REFERENCE_PARAMS) == pytest.approx(REFERENCE_PERIOD_S, rel=1e-12)
        assert period(REFERENCE_PARAMS) == pytest.approx(21.8e-3, rel=2e-3)

    def test_reference_frequency(self):
        assert frequency(REFERENCE_PARAMS) == pytest.approx(
            REFERENCE_FREQUENCY_HZ, rel=1e-12
        )

    def test_oracle_agreement_on_random_grid(self):
        rng = random.Random(987)
        for _ in range(120):
            p = random_valid_params(rng)
            oracle = float(
                period_reference(p.r_ohm, p.rs_ohm, p.c_f, p.v_dd, p.v_d, p.v_t)
            )
            got = period(p)
            assert abs(got - oracle) / oracle < 1e-9

    def test_doubling_c_doubles_period_exactly(self):
        rng = random.Random(55)
        for _ in range(30):
            p = random_valid_params(rng)
            doubled = OscillatorParams(
                r_ohm=p.r_ohm, rs_ohm=p.rs_ohm, c_f=2.0 * p.c_f,
                v_dd=p.v_dd, v_d=p.v_d, v_t=p.v_t,
            )
            assert period(doubled) == 2.0 * period(p)
            assert frequency(doubled) == frequency(p) / 2.0

    def test_general_c_scaling(self):
        p = REFERENCE_PARAMS
        for alpha in (0.3, 1.7, 4.9, 130.0):
            scaled = OscillatorParams(
                r_ohm=p.r_ohm, rs_ohm=p.rs_ohm, c_f=alpha * p.c_f,
                v_dd=p.v_dd, v_d=p.v_d, v_t=p.v_t,
            )
            assert period(scaled) == pytest.approx(alpha * period(p), rel=1e-12)

    def test_frequency_period_identity(self):
        rng = random.Random(7)
        for _ in range(50):
            p = random_valid_params(rng)
            assert frequency(p) * period(p) == pytest.approx(1.0, rel=1e-12)

    def test_threshold_at_supply_rejected(self):
        with pytest.raises(OscillatorParameterError, match="v_t"):
            period(
                OscillatorParams(
                    r_ohm=1e5, rs_ohm=4.7e5, c_f=1e-7, v_dd=5.0, v_d=0.7, v_t=5.0
                )
            )

    @pytest.mark.parametrize(
        "kwargs, message",
        [
            (dict(r_ohm=0.0), "timing resistor"),
            (dict(rs_ohm=-1.0), "series resistor"),
            (dict(c_f=0.0), "capacitor"),
            (dict(v_dd=2.0), "supply"),
            (dict(v_dd=16.0), "supply"),
            (dict(v_d=-0.1), "diode"),
        ],
    )
    def test_invariant_violations(self, kwargs, message):
        base = dict(r_ohm=1e5, rs_ohm=4.7e5, c_f=1e-7, v_dd=5.0, v_d=0.7, v_t=2.5)
        base.update(kwargs)
        with pytest.raises(OscillatorParameterError, match=message):
            period(OscillatorParams(**base))

    def test_domain_error_names_the_log_argument(self):
        # A huge diode drop makes the charge-correction log argument negative.
        params = OscillatorParams(
            r_ohm=1e5, rs_ohm=1e5, c_f=1e-7, v_dd=5.0, v_d=50.0, v_t=2.5
        )
        with pytest.raises(OscillatorDomainError, match="charge correction"):
            period(params)


class TestValidityReport:
    def test_good_design_has_empty_report(self):
        assert validity_report(REFERENCE_PARAMS) == []

    def test_series_ratio_warning(self):
        params = OscillatorParams(
            r_ohm=100e3, rs_ohm=100e3, c_f=100e-9, v_dd=5.0, v_d=0.7, v_t=2.5
        )
        report = validity_report(params)
        assert any(w.startswith("series-resistor-ratio") for w in report)

    def test_small_capacitor_warning(self):
        params = OscillatorParams(
            r_ohm=100e3, rs_ohm=470e3, c_f=10e-12, v_dd=5.0, v_d=0.7, v_t=2.5
        )
        report = validity_report(params)
        assert any(w.startswith("timing-capacitor-floor") for w in report)

    def test_small_resistor_warning(self):
        params = OscillatorParams(
            r_ohm=1e3, rs_ohm=4.7e3, c_f=100e-9, v_dd=5.0, v_d=0.7, v_t=2.5
        )
        report = validity_report(params)
        assert any(w.startswith("timing-resistor-floor") for w in report)

    def test_short_period_warning(self):
        # 1 kOhm and 100 pF give a period in the microsecond range, within
        # 100x of the 60 ns propagation delay.
        params = OscillatorParams(
            r_ohm=1e3, rs_ohm=4.7e3, c_f=100e-12, v_dd=5.0, v_d=0.7, v_t=2.5
        )
        report = validity_report(params)
        assert any(w.startswith("oscillation-period-floor") for w in report)

    def test_warnings_do_not_reject(self):
        params = OscillatorParams(
            r_ohm=1e3, rs_ohm=1e3, c_f=10e-12, v_dd=5.0, v_d=0.7, v_t=2.5
        )
        assert len(validity_report(params)) >= 3  # still just a report


class TestDetect:
    def test_no_induced_voltage_blocks_oscillation(self):
        reading = detect(
            FieldSample(0.0, 0.0, 0.0), 1e-3, DEFAULT_DETECTOR, 0.15,
            random.Random(1), 0.5,
        )
        assert reading.oscillating is False
        assert reading.measured_frequency_hz == 0.0
        assert reading.led_on is False

    def test_golden_probe_reading(self, golden_scenario):
        sample = field_at(golden_scenario, (0.5, 0.0))
        reading = detect(
            sample, 1e-3, DEFAULT_DETECTOR, 0.15,
            random.Random(golden_scenario.noise_seed), golden_scenario.noise_sigma_hz,
        )
        assert reading.oscillating and reading.led_on
        assert reading.measured_frequency_hz == pytest.approx(44.5, abs=0.05)

    def test_mismatched_tuning_blocks_oscillation(self):
        # Scale the capacitor so the tank sits near 100 Hz; a 45 Hz field
        # with a 10% band must not fire it.
        tank_100hz = OscillatorParams(
            r_ohm=100e3, rs_ohm=470e3,
            c_f=100e-9 * REFERENCE_FREQUENCY_HZ / 100.0,
            v_dd=5.0, v_d=0.7, v_t=2.5,
        )
        assert frequency(tank_100hz) == pytest.approx(100.0, rel=1e-6)
        field = FieldSample(b_rms_t=4e-5, frequency_hz=45.0, induced_voltage_v=1.0)
        reading = detect(field, 1e-3, tank_100hz, 0.10, random.Random(1), 0.5)
        assert reading.oscillating is False
        assert reading.measured_frequency_hz == 0.0

    def test_monotone_in_induced_voltage(self):
        fired_at = None
        for v in (1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0):
            field = FieldSample(b_rms_t=1e-6, frequency_hz=45.0, induced_voltage_v=v)
            reading = detect(field, 1e-3, DEFAULT_DETECTOR, 0.15, random.Random(3), 0.5)
            if reading.oscillating:
                fired_at = v if fired_at is None else fired_at
            elif fired_at is not None:
                pytest.fail(f"fired at {fired_at} but not at larger voltage {v}")

    def test_led_mirrors_oscillation(self):
        for v in (0.0, 5e-4, 1e-3, 0.5):
            field = FieldSample(b_rms_t=1e-6, frequency_hz=45.0, induced_voltage_v=v)
            reading = detect(field, 1e-3, DEFAULT_DETECTOR, 0.15, random.Random(9), 0.5)
            assert reading.led_on == reading.oscillating

    def test_blocked_detector_consumes_no_randomness(self):
        rng = random.Random(42)
        state = rng.getstate()
        detect(FieldSample(0.0, 0.0, 0.0), 1e-3, DEFAULT_DETECTOR, 0.15, rng, 0.5)
        assert rng.getstate() == state

    def test_match_tolerance_validated(self):
        field = FieldSample(1e-6, 45.0, 1.0)
        with pytest.raises(ValueError):
            detect(field, 1e-3, DEFAULT_DETECTOR, 0.0, random.Random(1), 0.5)
        with pytest.raises(ValueError):
            detect(field, 0.0, DEFAULT_DETECTOR, 0.15, random.Random(1), 0.5)


def test_default_detector_matches_the_line_band(golden_scenario):
    tank = frequency(DEFAULT_DETECTOR)
    line = golden_scenario.line_frequency_hz
    assert abs(tank - line) <= 0.15 * line
