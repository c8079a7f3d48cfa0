import math

import pytest

from rovermon.monitor import (
    MonitorState, VitalParams, VitalVector, degradation_probability,
    distance_rate, health_raw, monitor_step, vital_dist_rate, vital_gaussian,
)
from rovermon.vehicle import ActuatorCommand, SensorReading


def reading(x=0.0, y=0.0, psi=0.0, u=0.25, ax=0.0, r=0.0, t=0.0):
    return SensorReading(psi_meas=psi, gyro_rate=r, accel_x=ax,
                         speed_meas=u, position_meas=(x, y), t=t)


class TestVitalGaussian:
    def test_zero_input_near_zero(self):
        # Independent oracle: 1 - pdf(0)/(sigma*sqrt(2*pi)) ... evaluated
        # directly from the closed form with sigma = 0.4.
        expected = 1.0 - 1.0 / (0.4 * math.sqrt(2.0 * math.pi))
        assert vital_gaussian(0.0, 0.4) == pytest.approx(expected, abs=1e-12)
        assert vital_gaussian(0.0, 0.4) == pytest.approx(0.0026443, abs=1e-6)

    def test_large_input_saturates_to_one(self):
        assert vital_gaussian(2.0, 0.4) == pytest.approx(0.9999963, abs=1e-6)
        assert vital_gaussian(50.0, 0.4) == pytest.approx(1.0, abs=1e-12)

    def test_hard_turn_rate(self):
        assert vital_gaussian(1.0, 0.4) == pytest.approx(0.9562, abs=1e-4)

    def test_even_symmetry(self):
        assert vital_gaussian(0.3, 0.4) == vital_gaussian(-0.3, 0.4)

    def test_range(self):
        for x in (-5.0, -0.5, 0.0, 0.5, 5.0):
            for sigma in (0.1, 0.4, 2.0):
                assert 0.0 <= vital_gaussian(x, sigma) <= 1.0


class TestVitalDistRate:
    def test_midpoint(self):
        assert vital_dist_rate(0.1) == pytest.approx(0.5, abs=1e-12)

    def test_cruise_approach_is_healthy(self):
        assert vital_dist_rate(-0.25) == pytest.approx(9.11e-4, abs=1e-6)

    def test_stationary(self):
        assert vital_dist_rate(0.0) == pytest.approx(0.11920, abs=1e-5)

    def test_monotone_increasing(self):
        values = [vital_dist_rate(x) for x in (-1.0, -0.25, 0.0, 0.1, 0.5, 1.0)]
        assert values == sorted(values)

    def test_extreme_inputs_do_not_overflow(self):
        assert vital_dist_rate(-1e6) == 0.0
        assert vital_dist_rate(1e6) == 1.0


class TestDistanceRate:
    def test_first_sample_returns_zero(self):
        ms = MonitorState(VitalParams(), dt=0.01, smooth=False)
        assert distance_rate(ms, (0.0, 0.0), (10.0, 0.0), 0.01) == 0.0
        assert ms.prev_distance == pytest.approx(10.0)

    def test_backward_difference(self):
        ms = MonitorState(VitalParams(), dt=0.01, smooth=False)
        distance_rate(ms, (0.0, 0.0), (10.0, 0.0), 0.01)
        rate = distance_rate(ms, (0.0025, 0.0), (10.0, 0.0), 0.01)
        assert rate == pytest.approx(-0.25)

    def test_moving_average_when_smoothing(self):
        ms = MonitorState(VitalParams(distance_window=2), dt=0.01, smooth=True)
        distance_rate(ms, (0.0, 0.0), (10.0, 0.0), 0.01)
        r1 = distance_rate(ms, (0.01, 0.0), (10.0, 0.0), 0.01)  # -1.0 m/s
        r2 = distance_rate(ms, (0.01, 0.0), (10.0, 0.0), 0.01)  # 0.0 m/s
        assert r1 == pytest.approx(-1.0)
        assert r2 == pytest.approx(-0.5)  # mean of the last two rates


class TestDegradationAndHealth:
    def test_probability_is_quarter_sum(self):
        v = VitalVector(0.2, 0.4, 0.6, 0.8)
        assert degradation_probability(v) == pytest.approx(0.5)

    def test_health_raw_oracle_values(self):
        assert health_raw(0.5) == pytest.approx(0.0, abs=1e-12)
        assert health_raw(0.0) == pytest.approx(1.0, abs=1e-12)
        assert health_raw(1.0, clamp_p=False) == pytest.approx(1.0, abs=1e-12)
        assert health_raw(0.1) == pytest.approx(0.5310, abs=1e-4)

    def test_entropy_symmetry_without_clamp(self):
        assert health_raw(0.9, clamp_p=False) == pytest.approx(
            health_raw(0.1, clamp_p=False), abs=1e-12)

    def test_clamp_makes_health_monotone(self):
        values = [health_raw(p) for p in (0.0, 0.1, 0.3, 0.5, 0.7, 1.0)]
        assert all(a >= b for a, b in zip(values, values[1:]))


class TestMonitorStep:
    def test_no_startup_transient(self):
        ms = MonitorState(VitalParams(), dt=0.01, smooth=False)
        _, health = monitor_step(ms, reading(), ActuatorCommand(5.0, 5.0),
                                 (10.0, 0.0), ms.params, 0.01)
        # Health filter is primed to the first raw sample.
        assert health.h_filtered == pytest.approx(health.h_raw, abs=1e-12)

    def test_vitals_in_unit_interval(self):
        ms = MonitorState(VitalParams(), dt=0.01, smooth=True)
        x = 0.0
        for i in range(200):
            x += 0.0025
            vitals, health = monitor_step(
                ms, reading(x=x, ax=0.5 * math.sin(i * 0.3), r=0.2),
                ActuatorCommand(4.0 + i % 3, 5.0), (10.0, 0.0), ms.params, 0.01)
            for v in vitals.as_tuple():
                assert 0.0 <= v <= 1.0
            assert 0.0 <= health.p <= 1.0
            assert 0.0 <= health.h_raw <= 1.0

    def test_voltage_rate_warmup_window(self):
        # The voltage-rate vital reads zero rate until its difference window
        # is full, even under changing commands.
        params = VitalParams(voltage_rate_window=10)
        ms = MonitorState(params, dt=0.01, smooth=True)
        floor = vital_gaussian(0.0, params.sigma_voltage)
        x = 0.0
        for i in range(10):
            x += 0.0025
            vitals, _ = monitor_step(ms, reading(x=x), ActuatorCommand(float(i), float(i)),
                                     (10.0, 0.0), params, 0.01)
            assert vitals.v_voltage_rate == pytest.approx(floor, abs=1e-12)

    def test_voltage_level_mode(self):
        # Alternative wiring: the vital reads the smoothed voltage level
        # itself instead of its rate of change.
        params = VitalParams(voltage_mode="level")
        ms = MonitorState(params, dt=0.01, smooth=False)
        vitals, _ = monitor_step(ms, reading(), ActuatorCommand(5.0, 5.0),
                                 (10.0, 0.0), params, 0.01)
        assert vitals.v_voltage_rate == pytest.approx(vital_gaussian(5.0, 0.4))

    def test_steady_cruise_is_healthy(self):
        ms = MonitorState(VitalParams(), dt=0.01, smooth=False)
        x = 0.0
        h = None
        for _ in range(300):
            x += 0.0025
            _, health = monitor_step(ms, reading(x=x), ActuatorCommand(5.2, 5.2),
                                     (10.0, 0.0), ms.params, 0.01)
            h = health
        assert h.h_filtered > 0.95
