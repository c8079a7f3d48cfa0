"""Plant model: surge-yaw rover dynamics, DC-motor wheels, sensors, faults.

The rover is a six-wheel differential-drive vehicle. Sway is identically
zero (no slip), heave/pitch/roll follow the terrain kinematically, so the
dynamic states are surge speed u, yaw rate r, and the planar pose (x, y,
psi). Positive yaw turns the rover toward +y when driving along +x.
"""

import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .simcore import rk4_step, wrap_angle
from .terrain import attitude_from_terrain

# Wheel indices 0..2 are the left side (front to rear), 3..5 the right side.
LEFT_WHEELS = (0, 1, 2)
FRONT_LEFT = 0


@dataclass
class MotorParams:
    torque_constant: float = 0.01  # lumped Kt/Ra, N*m/V
    back_emf_constant: float = 1.0  # V*s/rad
    max_voltage: float = 12.0


@dataclass
class RoverParams:
    mass: float = 5.0
    yaw_inertia: float = 0.15
    surge_damping: float = 2.0
    sway_damping: float = 2.0  # unused in the surge-yaw reduction, kept for completeness
    yaw_damping: float = 0.2
    length: float = 0.4
    track_width: float = 0.3
    wheel_radius: float = 0.06
    wheel_count: int = 6
    motor: MotorParams = field(default_factory=MotorParams)
    rolling_resistance_coeff: float = 0.03
    drag_coeff_failed_wheel: float = 0.5
    gravity: float = 3.71  # Mars surface

    def __post_init__(self):
        for name in (
            "mass", "yaw_inertia", "surge_damping", "yaw_damping", "length",
            "track_width", "wheel_radius", "rolling_resistance_coeff",
            "drag_coeff_failed_wheel", "gravity",
        ):
            if getattr(self, name) <= 0.0 and name not in (
                "rolling_resistance_coeff", "drag_coeff_failed_wheel",
            ):
                raise ConfigError(f"rover parameter {name} must be positive")
        if self.wheel_count != 6:
            raise ConfigError("wheel_count must be 6")
        if self.track_width >= 2.0 * self.length:
            raise ConfigError("track_width must be less than twice the length")

    def wheel_lateral_offset(self, wheel_index):
        """Lateral position of a wheel; left side positive."""
        half = 0.5 * self.track_width
        return half if wheel_index in LEFT_WHEELS else -half


@dataclass
class ActuatorCommand:
    v_left: float = 0.0
    v_right: float = 0.0


@dataclass
class GyroOffsetFault:
    offset: float  # rad, added to the measured heading only
    t_inject: float
    enabled: bool = True

    kind = "gyro_offset"

    def active(self, t):
        return self.enabled and t >= self.t_inject


@dataclass
class MotorFailureFault:
    wheel_index: int
    t_inject: float
    enabled: bool = True

    kind = "motor_failure"

    def __post_init__(self):
        if not 0 <= self.wheel_index <= 5:
            raise ConfigError("wheel_index must be in 0..5")
        if self.t_inject < 0.0:
            raise ConfigError("t_inject must be >= 0")

    def active(self, t):
        return self.enabled and t >= self.t_inject


@dataclass
class FaultSet:
    gyro: GyroOffsetFault | None = None
    motor: MotorFailureFault | None = None


NO_FAULTS = FaultSet()


@dataclass
class SensorReading:
    psi_meas: float
    gyro_rate: float
    accel_x: float
    speed_meas: float
    position_meas: tuple
    t: float


@dataclass
class BodyState:
    """Full body state for reporting; the integrator carries (u, r, x, y, psi)."""

    u: float = 0.0
    v: float = 0.0
    w: float = 0.0
    p: float = 0.0
    q: float = 0.0
    r: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    phi: float = 0.0
    theta: float = 0.0
    psi: float = 0.0


def wheel_force(v_cmd, wheel_speed, params):
    """Propulsive force of one wheel for a commanded voltage.

    Back EMF opposes the command; force falls to zero when the wheel spins
    at its no-load speed for that voltage.
    """
    m = params.motor
    return m.torque_constant * (v_cmd - m.back_emf_constant * wheel_speed) / params.wheel_radius


def apply_motor_failure(forces, faults, u, params, t):
    """Zero the propulsion of failed wheels and add their sliding drag.

    Returns (forces, drag_force, drag_moment): total surge drag (negative
    against motion) and the yaw moment it produces about the centre.
    """
    drag_force = 0.0
    drag_moment = 0.0
    fault = faults.motor
    if fault is not None and fault.active(t):
        idx = fault.wheel_index
        forces[idx] = 0.0
        if u != 0.0:
            sliding = -math.copysign(1.0, u) * params.drag_coeff_failed_wheel * (
                params.mass * params.gravity / params.wheel_count
            )
            drag_force += sliding
            # A surge force at lateral offset y produces yaw moment -y*F.
            drag_moment += -params.wheel_lateral_offset(idx) * sliding
    return forces, drag_force, drag_moment


def dynamics_derivative(state, cmd, faults, terrain, params, t):
    """Time derivative of (u, r, x, y, psi)."""
    u, r, x, y, psi = state
    motor = params.motor
    back_emf = motor.back_emf_constant * u / params.wheel_radius
    f_left = motor.torque_constant * (cmd.v_left - back_emf) / params.wheel_radius
    f_right = motor.torque_constant * (cmd.v_right - back_emf) / params.wheel_radius
    half_track = 0.5 * params.track_width

    # Three wheels per side; surge force at lateral offset y adds -y*F in yaw.
    thrust = 3.0 * (f_left + f_right)
    moment = 3.0 * half_track * (f_right - f_left)

    fault = faults.motor
    if fault is not None and fault.active(t):
        idx = fault.wheel_index
        failed = f_left if idx in LEFT_WHEELS else f_right
        y_w = params.wheel_lateral_offset(idx)
        thrust -= failed
        moment += y_w * failed
        if u != 0.0:
            sliding = -math.copysign(1.0, u) * params.drag_coeff_failed_wheel * (
                params.mass * params.gravity / params.wheel_count
            )
            thrust += sliding
            moment += -y_w * sliding

    _, theta = attitude_from_terrain(terrain, x, y, psi)
    rolling = 0.0
    if u != 0.0:
        rolling = -math.copysign(1.0, u) * params.rolling_resistance_coeff * (
            params.mass * params.gravity
        )
    # theta is negative pointing uphill, so this term opposes climbing.
    gravity_surge = params.mass * params.gravity * math.sin(theta)

    u_dot = (thrust + rolling + gravity_surge - params.surge_damping * u) / params.mass
    r_dot = (moment - params.yaw_damping * r) / params.yaw_inertia
    cos_theta = math.cos(theta)
    return (
        u_dot,
        r_dot,
        u * math.cos(psi) * cos_theta,
        u * math.sin(psi) * cos_theta,
        r,
    )


def step_vehicle(state, cmd, faults, terrain, params, t, dt):
    """One RK4 step of the planar state; heading wrapped afterwards."""
    deriv = lambda tt, s: dynamics_derivative(s, cmd, faults, terrain, params, tt)
    u, r, x, y, psi = rk4_step(state, deriv, t, dt)
    return (u, r, x, y, wrap_angle(psi))


def body_state_from_planar(state, terrain):
    """Expand the integrator state into a BodyState with terrain attitude."""
    u, r, x, y, psi = state
    phi, theta = attitude_from_terrain(terrain, x, y, psi)
    return BodyState(
        u=u, r=r, x=x, y=y, psi=psi,
        z=-terrain.height(x, y), phi=phi, theta=theta,
    )


def sense(state, prev_u, faults, noise, t, dt):
    """Measure the plant. The gyro-offset fault biases only the measured
    heading; the true state is never modified."""
    u, r, x, y, psi = state
    offset = 0.0
    if faults.gyro is not None and faults.gyro.active(t):
        offset = faults.gyro.offset
    if noise is None:
        return SensorReading(
            psi_meas=wrap_angle(psi + offset),
            gyro_rate=r,
            accel_x=(u - prev_u) / dt,
            speed_meas=u,
            position_meas=(x, y),
            t=t,
        )
    return SensorReading(
        psi_meas=wrap_angle(psi + offset + noise.sample("psi")),
        gyro_rate=r + noise.sample("gyro"),
        accel_x=(u - prev_u) / dt + noise.sample("accel"),
        speed_meas=u + noise.sample("speed"),
        position_meas=(x, y),
        t=t,
    )
