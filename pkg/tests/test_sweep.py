import dataclasses

import pytest

from cabletracer.sweep import (
    FaultReport,
    SweepRecord,
    classify,
    localize,
    run_sweep,
    sample_stops,
)
from cabletracer.world import CableRoute, FaultKind, FaultSpec, WorldScenario

# Bench result the golden scenario reproduces: three live readings near the
# line frequency, then a dead reading right after the break.
GOLDEN_ROWS = [
    (0.5, 44.53376074449121, False),
    (1.0, 45.09186317778111, False),
    (1.5, 44.303102498365696, False),
    (2.0, 0.0, True),
]


def make_scenario(fault_pos=None, length=2.0, seed=29529):
    fault = (
        None
        if fault_pos is None
        else FaultSpec(kind=FaultKind.OPEN, position_m=fault_pos)
    )
    return WorldScenario(
        route=CableRoute(waypoints=((0.0, 0.0), (length, 0.0)), depth_m=0.05),
        line_current_a=10.0,
        line_voltage_v=230.0,
        line_frequency_hz=45.0,
        noise_seed=seed,
        noise_sigma_hz=0.5,
        fault=fault,
    )


class TestClassify:
    def test_live_reading(self):
        assert classify(44.5, 45.0, 0.1) is False

    def test_dead_reading(self):
        assert classify(0.0, 45.0, 0.1) is True

    def test_exact_expected_is_live(self):
        for fraction in (0.05, 0.1, 0.5, 0.9):
            assert classify(45.0, 45.0, fraction) is False

    def test_cutoff_boundary(self):
        assert classify(4.5, 45.0, 0.1) is False  # not strictly below
        assert classify(4.4999, 45.0, 0.1) is True

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            classify(44.0, 0.0, 0.1)
        with pytest.raises(ValueError):
            classify(44.0, 45.0, 1.0)


class TestLocalize:
    def test_golden_records(self):
        records = [SweepRecord(d, f, flag) for d, f, flag in GOLDEN_ROWS]
        report = localize(records)
        assert report.found
        assert report.interval_low_m == 1.5
        assert report.interval_high_m == 2.0
        assert report.midpoint_m == 1.75

    def test_no_fault_records(self):
        records = [SweepRecord(d, 45.0, False) for d in (0.5, 1.0, 1.5, 2.0)]
        assert localize(records) == FaultReport(found=False)

    def test_leading_fault_brackets_from_zero(self):
        report = localize([SweepRecord(0.5, 0.0, True)])
        assert report.found
        assert report.interval_low_m == 0.0
        assert report.interval_high_m == 0.5

    def test_empty_records_rejected(self):
        with pytest.raises(ValueError):
            localize([])


class TestSampleStops:
    def test_even_division(self):
        assert sample_stops(2.0, 0.5) == [0.5, 1.0, 1.5, 2.0]

    def test_step_equals_length(self):
        assert sample_stops(2.0, 2.0) == [2.0]

    def test_uneven_step_stays_inside_route(self):
        stops = sample_stops(2.0, 0.3)
        assert stops[-1] <= 2.0
        assert len(stops) == 6

    def test_accumulated_float_steps(self):
        stops = sample_stops(1.0, 0.1)
        assert len(stops) == 10
        assert stops[-1] == pytest.approx(1.0)


class TestRunSweep:
    def test_golden_sweep_reproduces_bench_rows(self, golden_scenario):
        records = run_sweep(golden_scenario, 0.5)
        assert [(r.distance_m, r.frequency_hz, r.fault) for r in records] == GOLDEN_ROWS

    def test_sweep_is_deterministic(self, golden_scenario):
        assert run_sweep(golden_scenario, 0.5) == run_sweep(golden_scenario, 0.5)

    def test_halts_at_first_fault(self):
        records = run_sweep(make_scenario(fault_pos=0.7), 0.5)
        assert records[-1].fault
        assert records[-1].distance_m == 1.0
        assert len(records) == 2

    def test_full_continues_to_route_end(self):
        records = run_sweep(make_scenario(fault_pos=0.7), 0.5, full=True)
        assert [r.distance_m for r in records] == [0.5, 1.0, 1.5, 2.0]
        assert [r.fault for r in records] == [False, True, True, True]

    def test_no_fault_covers_whole_route(self):
        records = run_sweep(make_scenario(), 0.5)
        assert [r.distance_m for r in records] == [0.5, 1.0, 1.5, 2.0]
        assert not any(r.fault for r in records)

    def test_step_equal_to_route_length(self, golden_scenario):
        records = run_sweep(golden_scenario, 2.0)
        assert len(records) == 1
        assert records[0].distance_m == 2.0
        assert records[0].fault  # the route end is past the 1.5 m break

    def test_step_out_of_range(self, golden_scenario):
        with pytest.raises(ValueError):
            run_sweep(golden_scenario, 0.0)
        with pytest.raises(ValueError):
            run_sweep(golden_scenario, 2.5)

    def test_polyline_route_sweep(self):
        scenario = WorldScenario(
            route=CableRoute(
                waypoints=((0.0, 0.0), (1.0, 0.0), (1.0, 1.0)), depth_m=0.05
            ),
            line_current_a=10.0,
            line_voltage_v=230.0,
            line_frequency_hz=45.0,
            noise_seed=5,
            noise_sigma_hz=0.5,
            fault=FaultSpec(kind=FaultKind.OPEN, position_m=1.6),
        )
        records = run_sweep(scenario, 0.25)
        assert records[-1].fault
        report = localize(records)
        assert report.interval_low_m <= 1.6 <= report.interval_high_m

    @pytest.mark.parametrize("fault_pos", [0.3, 0.8, 1.1, 1.5, 1.9])
    @pytest.mark.parametrize("step", [0.2, 0.25, 0.5])
    def test_localization_soundness(self, fault_pos, step):
        """With detection succeeding at every live stop, the reported
        interval always contains the true break position."""
        scenario = make_scenario(fault_pos=fault_pos)
        records = run_sweep(scenario, step)
        report = localize(records)
        if records[-1].fault:
            assert report.found
            assert report.interval_low_m <= fault_pos <= report.interval_high_m
            assert (
                report.interval_high_m - report.interval_low_m <= step + 1e-9
            )
        else:
            # every stop was on the live side of the break
            assert all(r.distance_m <= fault_pos for r in records)

    def test_figure_series_shape(self, golden_scenario):
        records = run_sweep(golden_scenario, 0.5, full=True)
        sigma = golden_scenario.noise_sigma_hz
        expected = golden_scenario.line_frequency_hz
        for r in records:
            if r.distance_m <= golden_scenario.fault.position_m:
                assert abs(r.frequency_hz - expected) <= 3.0 * sigma
            else:
                assert r.frequency_hz < 0.1 * expected

    def test_short_fault_is_localized_like_open(self):
        scenario = make_scenario(fault_pos=1.2)
        scenario = dataclasses.replace(
            scenario, fault=FaultSpec(kind=FaultKind.SHORT, position_m=1.2)
        )
        records = run_sweep(scenario, 0.5)
        report = localize(records)
        assert report.found
        assert report.interval_low_m <= 1.2 <= report.interval_high_m

    def test_earth_fault_keeps_signal_above_threshold(self):
        # downstream current is only attenuated, so the detector keeps
        # oscillating past the fault and the sweep reports nothing
        scenario = make_scenario(fault_pos=1.2)
        scenario = dataclasses.replace(
            scenario, fault=FaultSpec(kind=FaultKind.EARTH, position_m=1.2)
        )
        records = run_sweep(scenario, 0.5)
        assert not any(r.fault for r in records)
        assert localize(records) == FaultReport(found=False)

    def test_zero_noise_reads_the_line_frequency_exactly(self):
        scenario = dataclasses.replace(make_scenario(fault_pos=1.5), noise_sigma_hz=0.0)
        records = run_sweep(scenario, 0.5)
        assert [r.frequency_hz for r in records] == [45.0, 45.0, 45.0, 0.0]

    def test_seed_changes_noise_not_structure(self, golden_scenario):
        other = dataclasses.replace(golden_scenario, noise_seed=777)
        records = run_sweep(other, 0.5)
        assert [r.distance_m for r in records] == [0.5, 1.0, 1.5, 2.0]
        assert [r.fault for r in records] == [False, False, False, True]
        assert [r.frequency_hz for r in records] != [f for _, f, _ in GOLDEN_ROWS]
