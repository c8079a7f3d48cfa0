import math

import pytest

from rovermon.errors import ConfigError
from rovermon.terrain import FlatTerrain, InclineTerrain
from rovermon.vehicle import (
    ActuatorCommand, FaultSet, GyroOffsetFault, MotorFailureFault, NO_FAULTS,
    RoverParams, apply_motor_failure, body_state_from_planar,
    dynamics_derivative, sense, step_vehicle, wheel_force,
)

FLAT = FlatTerrain()


def params():
    return RoverParams()


class TestWheelForce:
    def test_zero_at_no_load_speed(self):
        p = params()
        u = 0.25
        wheel_speed = u / p.wheel_radius
        v = p.motor.back_emf_constant * wheel_speed
        assert wheel_force(v, wheel_speed, p) == pytest.approx(0.0, abs=1e-15)

    def test_positive_below_no_load(self):
        p = params()
        assert wheel_force(5.0, 0.0, p) > 0.0

    def test_back_emf_brakes(self):
        p = params()
        assert wheel_force(0.0, 0.25 / p.wheel_radius, p) < 0.0


class TestParamsValidation:
    def test_defaults_ok(self):
        params()

    def test_nonpositive_mass_rejected(self):
        with pytest.raises(ConfigError):
            RoverParams(mass=0.0)

    def test_wheel_count_fixed(self):
        with pytest.raises(ConfigError):
            RoverParams(wheel_count=4)

    def test_track_vs_length(self):
        with pytest.raises(ConfigError):
            RoverParams(length=0.1, track_width=0.3)

    def test_wheel_lateral_offset_sides(self):
        p = params()
        assert p.wheel_lateral_offset(0) == pytest.approx(0.15)
        assert p.wheel_lateral_offset(5) == pytest.approx(-0.15)


class TestFaultModels:
    def test_activation_times(self):
        f = GyroOffsetFault(offset=0.1, t_inject=5.0)
        assert not f.active(4.99)
        assert f.active(5.0)
        f.enabled = False
        assert not f.active(10.0)

    def test_motor_fault_validation(self):
        with pytest.raises(ConfigError):
            MotorFailureFault(wheel_index=7, t_inject=5.0)
        with pytest.raises(ConfigError):
            MotorFailureFault(wheel_index=0, t_inject=-1.0)

    def test_apply_motor_failure(self):
        p = params()
        faults = FaultSet(motor=MotorFailureFault(wheel_index=0, t_inject=0.0))
        forces, drag, moment = apply_motor_failure([1.0] * 6, faults, 0.25, p, 1.0)
        assert forces[0] == 0.0
        assert forces[1] == 1.0
        assert drag < 0.0  # opposes forward motion
        # Drag on the left side yaws the rover toward the failed side.
        assert moment == pytest.approx(-p.wheel_lateral_offset(0) * drag)

    def test_motor_failure_inactive_before_injection(self):
        p = params()
        faults = FaultSet(motor=MotorFailureFault(wheel_index=0, t_inject=5.0))
        forces, drag, moment = apply_motor_failure([1.0] * 6, faults, 0.25, p, 1.0)
        assert forces == [1.0] * 6 and drag == 0.0 and moment == 0.0


class TestDynamics:
    def test_dissipative_without_input(self):
        p = params()
        state = (0.25, 0.0, 0.0, 0.0, 0.0)
        du, dr, dx, dy, dpsi = dynamics_derivative(
            state, ActuatorCommand(0.0, 0.0), NO_FAULTS, FLAT, p, 0.0)
        assert du < 0.0

    def test_equal_voltages_no_yaw(self):
        p = params()
        state = (0.25, 0.0, 0.0, 0.0, 0.0)
        _, dr, *_ = dynamics_derivative(
            state, ActuatorCommand(4.0, 4.0), NO_FAULTS, FLAT, p, 0.0)
        assert dr == pytest.approx(0.0, abs=1e-15)

    def test_differential_voltage_yaw_sign(self):
        # More right-side voltage turns the rover left (+psi direction).
        p = params()
        state = (0.25, 0.0, 0.0, 0.0, 0.0)
        _, dr, *_ = dynamics_derivative(
            state, ActuatorCommand(3.0, 5.0), NO_FAULTS, FLAT, p, 0.0)
        assert dr > 0.0

    def test_mirrored_commands_mirror_yaw(self):
        p = params()
        state = (0.25, 0.0, 0.0, 0.0, 0.0)
        _, dr_ab, *_ = dynamics_derivative(
            state, ActuatorCommand(3.0, 5.0), NO_FAULTS, FLAT, p, 0.0)
        _, dr_ba, *_ = dynamics_derivative(
            state, ActuatorCommand(5.0, 3.0), NO_FAULTS, FLAT, p, 0.0)
        assert dr_ab == pytest.approx(-dr_ba)

    def test_uphill_decelerates(self):
        p = params()
        state = (0.25, 0.0, 0.0, 0.0, 0.0)
        cmd = ActuatorCommand(4.0, 4.0)
        du_flat, *_ = dynamics_derivative(state, cmd, NO_FAULTS, FLAT, p, 0.0)
        uphill = InclineTerrain(slope=0.1, azimuth=0.0)
        du_up, *_ = dynamics_derivative(state, cmd, NO_FAULTS, uphill, p, 0.0)
        assert du_up < du_flat

    def test_left_motor_failure_yaws_left(self):
        p = params()
        faults = FaultSet(motor=MotorFailureFault(wheel_index=0, t_inject=0.0))
        state = (0.25, 0.0, 0.0, 0.0, 0.0)
        cmd = ActuatorCommand(6.0, 6.0)
        du_f, dr_f, *_ = dynamics_derivative(state, cmd, faults, FLAT, p, 1.0)
        du_n, dr_n, *_ = dynamics_derivative(state, cmd, NO_FAULTS, FLAT, p, 1.0)
        assert du_f < du_n  # lost propulsion plus sliding drag
        assert dr_f > dr_n  # yaws toward the dead left side

    def test_kinematics_follow_heading(self):
        p = params()
        psi = math.pi / 4.0
        state = (0.25, 0.0, 0.0, 0.0, psi)
        _, _, dx, dy, dpsi = dynamics_derivative(
            state, ActuatorCommand(0.0, 0.0), NO_FAULTS, FLAT, p, 0.0)
        assert dx == pytest.approx(0.25 * math.cos(psi))
        assert dy == pytest.approx(0.25 * math.sin(psi))
        assert dpsi == 0.0


class TestStepAndBodyState:
    def test_step_wraps_heading(self):
        p = params()
        state = (0.0, 10.0, 0.0, 0.0, math.pi - 0.01)
        out = step_vehicle(state, ActuatorCommand(0.0, 0.0), NO_FAULTS, FLAT, p, 0.0, 0.05)
        assert -math.pi <= out[4] < math.pi

    def test_body_state_on_surface(self):
        t = InclineTerrain(slope=0.1, azimuth=0.0)
        bs = body_state_from_planar((0.25, 0.0, 4.0, 0.0, 0.0), t)
        # NED: z is positive down, so on-surface z is minus the height.
        assert bs.z == pytest.approx(-t.height(4.0, 0.0))
        assert bs.theta == pytest.approx(-0.1)


class TestSense:
    def test_noise_off_is_exact(self):
        state = (0.25, 0.01, 1.0, 2.0, 0.3)
        r = sense(state, 0.24, NO_FAULTS, None, 1.0, 0.01)
        assert r.psi_meas == pytest.approx(0.3)
        assert r.gyro_rate == 0.01
        assert r.speed_meas == 0.25
        assert r.accel_x == pytest.approx((0.25 - 0.24) / 0.01)
        assert r.position_meas == (1.0, 2.0)

    def test_gyro_offset_biases_only_heading(self):
        state = (0.25, 0.01, 1.0, 2.0, 0.3)
        faults = FaultSet(gyro=GyroOffsetFault(offset=0.1745, t_inject=5.0))
        before = sense(state, 0.25, faults, None, 4.9, 0.01)
        after = sense(state, 0.25, faults, None, 5.0, 0.01)
        assert before.psi_meas == pytest.approx(0.3)
        assert after.psi_meas == pytest.approx(0.3 + 0.1745)
        assert after.gyro_rate == before.gyro_rate
        assert after.speed_meas == before.speed_meas

    def test_measured_heading_stays_wrapped(self):
        state = (0.25, 0.0, 0.0, 0.0, 3.0)
        faults = FaultSet(gyro=GyroOffsetFault(offset=1.0, t_inject=0.0))
        r = sense(state, 0.25, faults, None, 1.0, 0.01)
        assert -math.pi <= r.psi_meas < math.pi
