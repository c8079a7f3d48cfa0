"""Run one experiment: faulty plant and fault-free observer over a mission,
wired into the monitor, thresholds, and detectors; produce telemetry and a
summary."""

import math
from dataclasses import dataclass, field

from . import config as config_mod
from .errors import RoverMonError, SimulationError
from .fdi import (
    ADAPTIVE, HEADING, STATIC, VELOCITY,
    DetectorState, ThresholdChannel, detect, residuals,
)
from .gnc import (
    GuidanceState, Mission, PidController, control_step, current_target,
    los_heading, update_waypoints,
)
from .monitor import MonitorState, VitalParams, monitor_step
from .simcore import NoiseSource
from .terrain import attitude_from_terrain, terrain_from_spec
from .vehicle import (
    FaultSet, GyroOffsetFault, MotorFailureFault, MotorParams, NO_FAULTS,
    RoverParams, sense, step_vehicle,
)

COLUMNS = (
    "t",
    "plant_x", "plant_y", "plant_psi", "plant_u",
    "obs_x", "obs_y", "obs_psi", "obs_u",
    "psi_meas", "speed_meas", "accel_x",
    "v_left", "v_right",
    "vital_ax", "vital_ddot", "vital_psidot", "vital_vdot",
    "p", "h_raw", "h",
    "r_psi", "r_v",
    "thr_psi_adaptive", "thr_v_adaptive", "thr_psi_static", "thr_v_static",
    "alarm_psi", "alarm_v",
)


class TelemetryLog:
    """Per-step records in fixed column order (see COLUMNS)."""

    columns = COLUMNS

    def __init__(self):
        self.rows = []

    def append(self, row):
        self.rows.append(row)

    def column(self, name):
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def __len__(self):
        return len(self.rows)


@dataclass
class RunSummary:
    name: str
    config_hash: str
    events: list = field(default_factory=list)
    detections: list = field(default_factory=list)
    detection_latency: dict = field(default_factory=dict)
    t_inject: float | None = None
    min_health: float = 1.0
    health_end: float = 1.0
    waypoints_collected_plant: int = 0
    waypoints_collected_observer: int = 0
    plant_collection_times: list = field(default_factory=list)
    observer_collection_times: list = field(default_factory=list)
    collection_deltas: list = field(default_factory=list)
    end_time: float = 0.0

    def as_dict(self):
        return {
            "name": self.name,
            "config_hash": self.config_hash,
            "events": [e.as_dict() for e in self.events],
            "detections": [e.as_dict() for e in self.detections],
            "detection_latency": self.detection_latency,
            "t_inject": self.t_inject,
            "min_health": self.min_health,
            "health_end": self.health_end,
            "waypoints_collected_plant": self.waypoints_collected_plant,
            "waypoints_collected_observer": self.waypoints_collected_observer,
            "plant_collection_times": self.plant_collection_times,
            "observer_collection_times": self.observer_collection_times,
            "collection_deltas": self.collection_deltas,
            "end_time": self.end_time,
        }


def builtin_scenarios():
    """The six named experiment configs: {straight, serpentine} x {A, B, C}."""
    return [config_mod.from_dict({"builtin": name}) for name in config_mod.BUILTIN_NAMES]


def _build_faults(cfg):
    faults = FaultSet()
    for f in cfg.faults:
        if f["kind"] == "gyro_offset":
            faults.gyro = GyroOffsetFault(
                offset=math.radians(f["offset_deg"]),
                t_inject=f["t_inject"],
                enabled=f["enabled"],
            )
        else:
            faults.motor = MotorFailureFault(
                wheel_index=f["wheel_index"],
                t_inject=f["t_inject"],
                enabled=f["enabled"],
            )
    return faults


def _build_params(cfg):
    r = cfg.rover
    return RoverParams(
        mass=r["mass"],
        yaw_inertia=r["yaw_inertia"],
        surge_damping=r["surge_damping"],
        sway_damping=r["sway_damping"],
        yaw_damping=r["yaw_damping"],
        length=r["length"],
        track_width=r["track_width"],
        wheel_radius=r["wheel_radius"],
        rolling_resistance_coeff=r["rolling_resistance_coeff"],
        drag_coeff_failed_wheel=r["drag_coeff_failed_wheel"],
        gravity=r["gravity"],
        motor=MotorParams(**r["motor"]),
    )


def _build_pids(cfg, max_voltage):
    g = cfg.gains
    heading = PidController(**g["heading"], output_limit=max_voltage,
                            integral_limit=0.5 * max_voltage)
    velocity = PidController(**g["velocity"], output_limit=max_voltage,
                             integral_limit=0.5 * max_voltage)
    return heading, velocity


def trim_voltage(params, speed, terrain=None, pose=None):
    """Steady-state mean voltage that holds `speed`, including the gravity
    load from the local terrain slope when a pose is given."""
    load = params.surge_damping * speed + params.rolling_resistance_coeff * (
        params.mass * params.gravity
    )
    if terrain is not None and pose is not None:
        _, theta = attitude_from_terrain(terrain, *pose)
        load -= params.mass * params.gravity * math.sin(theta)
    per_wheel = load / params.wheel_count
    m = params.motor
    return (per_wheel * params.wheel_radius / m.torque_constant
            + m.back_emf_constant * speed / params.wheel_radius)


def run_scenario(cfg):
    """Execute one scenario end to end; returns (TelemetryLog, RunSummary)."""
    terrain = terrain_from_spec(cfg.terrain)
    params = _build_params(cfg)
    max_v = params.motor.max_voltage
    mission = Mission(
        waypoints=[tuple(wp) for wp in cfg.mission["waypoints"]],
        acceptance_radius=cfg.mission["acceptance_radius"],
        cruise_speed=cfg.mission["cruise_speed"],
        heading_slew_rate=cfg.mission["heading_slew_rate"],
    )
    faults = _build_faults(cfg)
    dt = cfg.dt

    start = cfg.start
    x0, y0 = start["x"], start["y"]
    psi0 = start["psi"]
    if psi0 is None:
        psi0, _ = los_heading((x0, y0), mission.waypoints[0])
    u0 = start["u"]
    if u0 is None:
        u0 = mission.cruise_speed if start["trim"] else 0.0

    plant_state = (u0, 0.0, x0, y0, psi0)
    obs_state = plant_state

    plant_heading_pid, plant_velocity_pid = _build_pids(cfg, max_v)
    obs_heading_pid, obs_velocity_pid = _build_pids(cfg, max_v)
    if start["trim"] and u0 > 0.0:
        v_ss = trim_voltage(params, u0, terrain, (x0, y0, psi0))
        plant_velocity_pid.trim(v_ss)
        obs_velocity_pid.trim(v_ss)

    plant_gs = GuidanceState(last_heading_demand=psi0)
    obs_gs = GuidanceState(last_heading_demand=psi0)

    noise_cfg = cfg.noise
    noise = NoiseSource(
        seed=noise_cfg["seed"],
        sigmas=dict(noise_cfg["sigmas"]),
        enabled=noise_cfg["enabled"],
    )

    vp_cfg = cfg.vitals
    vital_params = VitalParams(
        sigma_accel=vp_cfg["sigma_accel"],
        sigma_heading=vp_cfg["sigma_heading"],
        sigma_voltage=vp_cfg["sigma_voltage"],
        k=vp_cfg["k"],
        x0=vp_cfg["x0"],
        clamp_p=vp_cfg["clamp_p"],
        voltage_mode=vp_cfg["voltage_mode"],
        distance_window=vp_cfg["distance_window"],
        voltage_cutoff=vp_cfg["voltage_cutoff"],
        voltage_rate_window=vp_cfg["voltage_rate_window"],
        health_cutoff=vp_cfg["health_cutoff"],
    )
    monitor_state = MonitorState(vital_params, dt, smooth=noise_cfg["enabled"])

    th = cfg.thresholds
    channels = {
        name: ThresholdChannel(
            c=th[name]["c"], k_d=th[name]["k_d"], k_l=th[name]["k_l"],
            hp_cutoff=th["hp_cutoff"], lp_cutoff=th["lp_cutoff"], dt=dt,
        )
        for name in (HEADING, VELOCITY)
    }
    static_thr = {name: th[name]["static"] for name in (HEADING, VELOCITY)}
    detectors = {
        (det, ch): DetectorState(debounce_n=th["debounce_n"])
        for det in (ADAPTIVE, STATIC)
        for ch in (HEADING, VELOCITY)
    }

    shared_command = cfg.observer_mode == "shared_command"
    log = TelemetryLog()
    events = []
    prev_u_plant = plant_state[0]
    prev_u_obs = obs_state[0]
    n_steps = int(round(cfg.duration / dt))

    for i in range(n_steps + 1):
        t = i * dt

        reading = sense(plant_state, prev_u_plant, faults, noise, t, dt)
        obs_reading = sense(obs_state, prev_u_obs, NO_FAULTS, None, t, dt)

        update_waypoints(plant_gs, reading.position_meas, mission, t)
        update_waypoints(obs_gs, obs_reading.position_meas, mission, t)

        cmd = control_step(reading, plant_gs, mission,
                           plant_heading_pid, plant_velocity_pid, dt, max_v)
        if shared_command:
            obs_cmd = cmd
        else:
            obs_cmd = control_step(obs_reading, obs_gs, mission,
                                   obs_heading_pid, obs_velocity_pid, dt, max_v)

        target = current_target(plant_gs, mission)
        vitals, health = monitor_step(monitor_state, reading, cmd, target,
                                      vital_params, dt)

        res = residuals(obs_reading.psi_meas, obs_reading.speed_meas,
                        reading.psi_meas, reading.speed_meas, t)
        thr_adaptive = {
            HEADING: channels[HEADING].step(res.r_psi, health.h_filtered),
            VELOCITY: channels[VELOCITY].step(res.r_v, health.h_filtered),
        }
        # Once either vehicle has finished the mission the pair no longer
        # executes the same task and the residuals stop being comparable, so
        # the detectors are frozen from that point on.
        if not plant_gs.mission_complete and not obs_gs.mission_complete:
            for ch, value in ((HEADING, res.r_psi), (VELOCITY, res.r_v)):
                for det, thr in ((ADAPTIVE, thr_adaptive[ch]), (STATIC, static_thr[ch])):
                    event = detect(detectors[(det, ch)], value, thr, ch, det, t)
                    if event is not None:
                        events.append(event)

        log.append((
            t,
            plant_state[2], plant_state[3], plant_state[4], plant_state[0],
            obs_state[2], obs_state[3], obs_state[4], obs_state[0],
            reading.psi_meas, reading.speed_meas, reading.accel_x,
            cmd.v_left, cmd.v_right,
            vitals.v_accel, vitals.v_dist_rate, vitals.v_heading_rate,
            vitals.v_voltage_rate,
            health.p, health.h_raw, health.h_filtered,
            res.r_psi, res.r_v,
            thr_adaptive[HEADING], thr_adaptive[VELOCITY],
            static_thr[HEADING], static_thr[VELOCITY],
            int(detectors[(ADAPTIVE, HEADING)].active_alarm),
            int(detectors[(ADAPTIVE, VELOCITY)].active_alarm),
        ))

        if plant_gs.mission_complete and obs_gs.mission_complete:
            break
        if i == n_steps:
            break

        try:
            prev_u_plant = plant_state[0]
            prev_u_obs = obs_state[0]
            plant_state = step_vehicle(plant_state, cmd, faults, terrain,
                                       params, t, dt)
            obs_state = step_vehicle(obs_state, obs_cmd, NO_FAULTS, terrain,
                                     params, t, dt)
        except SimulationError as e:
            # Flush what we have so callers can inspect the partial run.
            e.log = log
            raise

    summary = summarize(log, cfg, events, plant_gs, obs_gs)
    return log, summary


def summarize(log, cfg, events=(), plant_gs=None, obs_gs=None):
    """Reduce a run to detection/latency/health/waypoint statistics."""
    if len(log) == 0:
        raise RoverMonError("cannot summarize an empty telemetry log")

    t_inject = min((f["t_inject"] for f in cfg.faults), default=None)
    detections = [e for e in events if e.detector == ADAPTIVE and e.kind == "detect"]

    latency = {}
    if t_inject is not None:
        for ch in (HEADING, VELOCITY):
            hits = [e.t for e in detections if e.channel == ch and e.t >= t_inject]
            latency[ch] = (min(hits) - t_inject) if hits else None
        first = [e.t for e in detections if e.t >= t_inject]
        latency["first"] = (min(first) - t_inject) if first else None

    h = log.column("h")
    plant_times = list(plant_gs.collection_times) if plant_gs else []
    obs_times = list(obs_gs.collection_times) if obs_gs else []
    deltas = [p - o for p, o in zip(plant_times, obs_times)]

    return RunSummary(
        name=cfg.name,
        config_hash=cfg.hash(),
        events=list(events),
        detections=detections,
        detection_latency=latency,
        t_inject=t_inject,
        min_health=min(h),
        health_end=h[-1],
        waypoints_collected_plant=len(plant_times),
        waypoints_collected_observer=len(obs_times),
        plant_collection_times=plant_times,
        observer_collection_times=obs_times,
        collection_deltas=deltas,
        end_time=log.rows[-1][0],
    )
