"""Line-of-sight guidance, waypoint management, and the PID control pair."""

import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .simcore import wrap_angle
from .vehicle import ActuatorCommand


@dataclass
class Mission:
    waypoints: list
    acceptance_radius: float = 0.2  # half the default rover length
    cruise_speed: float = 0.25
    heading_slew_rate: float = 0.5  # rad/s cap on the heading-demand rate

    def __post_init__(self):
        if not self.waypoints:
            raise ConfigError("mission needs at least one waypoint")
        if self.acceptance_radius <= 0.0:
            raise ConfigError("acceptance_radius must be positive")
        if self.cruise_speed <= 0.0:
            raise ConfigError("cruise_speed must be positive")
        if self.heading_slew_rate <= 0.0:
            raise ConfigError("heading_slew_rate must be positive")


@dataclass
class GuidanceState:
    current_waypoint_index: int = 0
    mission_complete: bool = False
    collection_times: list = field(default_factory=list)
    last_heading_demand: float = 0.0


@dataclass
class PidController:
    kp: float
    ki: float = 0.0
    kd: float = 0.0
    output_limit: float = 12.0
    integral_limit: float = 6.0  # bound on the integral term, in output units
    integral: float = 0.0  # accumulated error
    prev_error: float = 0.0

    def trim(self, output):
        """Preload the integral so the controller starts at `output` for zero error."""
        if self.ki != 0.0:
            limit = self.integral_limit / abs(self.ki)
            self.integral = min(max(output / self.ki, -limit), limit)


def pid_step(c, error, dt):
    """One PID update with integral clamping and output saturation."""
    c.integral += error * dt
    if c.ki != 0.0:
        limit = c.integral_limit / abs(c.ki)
        c.integral = min(max(c.integral, -limit), limit)
    derivative = (error - c.prev_error) / dt
    c.prev_error = error
    out = c.kp * error + c.ki * c.integral + c.kd * derivative
    return min(max(out, -c.output_limit), c.output_limit)


def los_heading(position, target):
    """Line-of-sight heading from position to target.

    Returns (heading, degenerate). Coincident points give (0.0, True);
    callers should fall back to the previous heading demand.
    """
    dx = target[0] - position[0]
    dy = target[1] - position[1]
    if dx == 0.0 and dy == 0.0:
        return 0.0, True
    return wrap_angle(math.atan2(dy, dx)), False


def update_waypoints(gs, position, mission, t):
    """Collect the current waypoint if inside the acceptance radius."""
    if gs.mission_complete:
        return gs
    target = mission.waypoints[gs.current_waypoint_index]
    if math.hypot(target[0] - position[0], target[1] - position[1]) <= mission.acceptance_radius:
        gs.collection_times.append(t)
        gs.current_waypoint_index += 1
        if gs.current_waypoint_index >= len(mission.waypoints):
            gs.mission_complete = True
            gs.current_waypoint_index = len(mission.waypoints) - 1
    return gs


def current_target(gs, mission):
    return mission.waypoints[gs.current_waypoint_index]


def control_step(reading, gs, mission, heading_pid, velocity_pid, dt, max_voltage):
    """Close the loop on MEASURED heading and speed; sensor faults therefore
    propagate into the commands, letting the controller mask some faults."""
    if gs.mission_complete:
        return ActuatorCommand(0.0, 0.0)
    los, degenerate = los_heading(reading.position_meas, current_target(gs, mission))
    if degenerate:
        demand = gs.last_heading_demand
    else:
        # Slew-limit the demand so waypoint switches command a bounded turn
        # rate instead of a step.
        step = wrap_angle(los - gs.last_heading_demand)
        max_step = mission.heading_slew_rate * dt
        if abs(step) > max_step:
            demand = wrap_angle(gs.last_heading_demand + math.copysign(max_step, step))
        else:
            demand = los
        gs.last_heading_demand = demand
    heading_error = wrap_angle(demand - reading.psi_meas)
    delta = pid_step(heading_pid, heading_error, dt)
    common = pid_step(velocity_pid, mission.cruise_speed - reading.speed_meas, dt)
    v_left = min(max(common - delta, -max_voltage), max_voltage)
    v_right = min(max(common + delta, -max_voltage), max_voltage)
    return ActuatorCommand(v_left, v_right)


def default_heading_pid(max_voltage=12.0):
    return PidController(kp=12.0, ki=0.5, kd=0.5,
                         output_limit=max_voltage, integral_limit=0.5 * max_voltage)


def default_velocity_pid(max_voltage=12.0):
    return PidController(kp=20.0, ki=8.0, kd=0.0,
                         output_limit=max_voltage, integral_limit=0.5 * max_voltage)
