"""Scenario configuration: defaults, JSON parsing, validation, overrides.

A config file is a JSON object. Absent keys take defaults; unknown keys are
rejected with their key path. A top-level "builtin" key seeds the config
from one of the named builtin scenarios before the remaining keys apply.
"""

import copy
import hashlib
import json
from dataclasses import dataclass, field, fields

from .errors import ConfigError

DEFAULTS = {
    "name": "custom",
    "duration": 200.0,
    "dt": 0.01,
    "observer_mode": "independent",
    "terrain": {"kind": "flat"},
    "mission": {
        "waypoints": [[20.0, 0.0]],
        "acceptance_radius": 0.2,
        "cruise_speed": 0.25,
        "heading_slew_rate": 0.5,
    },
    "start": {"x": 0.0, "y": 0.0, "psi": None, "u": None, "trim": True},
    "rover": {
        "mass": 5.0,
        "yaw_inertia": 0.15,
        "surge_damping": 2.0,
        "sway_damping": 2.0,
        "yaw_damping": 0.2,
        "length": 0.4,
        "track_width": 0.3,
        "wheel_radius": 0.06,
        "rolling_resistance_coeff": 0.03,
        "drag_coeff_failed_wheel": 0.5,
        "gravity": 3.71,
        "motor": {
            "torque_constant": 0.01,
            "back_emf_constant": 1.0,
            "max_voltage": 12.0,
        },
    },
    "gains": {
        "heading": {"kp": 12.0, "ki": 0.5, "kd": 0.5},
        "velocity": {"kp": 20.0, "ki": 8.0, "kd": 0.0},
    },
    "vitals": {
        "sigma_accel": 0.4,
        "sigma_heading": 0.4,
        "sigma_voltage": 0.4,
        "k": 20.0,
        "x0": 0.1,
        "clamp_p": True,
        "voltage_mode": "rate",
        "distance_window": 5,
        "voltage_cutoff": 0.5,
        "voltage_rate_window": 25,
        "health_cutoff": 1.0,
    },
    "thresholds": {
        "heading": {"c": 0.05, "k_d": 2.0, "k_l": 1.0, "static": 0.1},
        "velocity": {"c": 0.02, "k_d": 2.0, "k_l": 1.0, "static": 0.05},
        "hp_cutoff": 0.5,
        "lp_cutoff": 0.2,
        "debounce_n": 3,
    },
    "faults": [],
    "noise": {
        "seed": 0,
        "enabled": True,
        "sigmas": {"psi": 0.005, "gyro": 0.0035, "accel": 0.02, "speed": 0.005},
    },
}

_TERRAIN_KEYS = {
    "flat": {"kind"},
    "incline": {"kind", "slope", "azimuth"},
    "sinusoid": {"kind", "amplitude", "wavelength"},
    "grid": {"kind", "path"},
}

_FAULT_DEFAULTS = {
    "gyro_offset": {"kind": "gyro_offset", "offset_deg": 10.0, "t_inject": 5.0, "enabled": True},
    "motor_failure": {"kind": "motor_failure", "wheel_index": 0, "t_inject": 5.0, "enabled": True},
}


@dataclass
class ScenarioConfig:
    name: str = "custom"
    duration: float = 200.0
    dt: float = 0.01
    observer_mode: str = "independent"
    terrain: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["terrain"]))
    mission: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["mission"]))
    start: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["start"]))
    rover: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["rover"]))
    gains: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["gains"]))
    vitals: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["vitals"]))
    thresholds: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["thresholds"]))
    faults: list = field(default_factory=list)
    noise: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS["noise"]))

    def to_dict(self):
        return {f.name: copy.deepcopy(getattr(self, f.name)) for f in fields(self)}

    def hash(self):
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _merge(defaults, given, path):
    """Deep-merge `given` onto `defaults`, rejecting unknown keys."""
    if not isinstance(given, dict):
        raise ConfigError(f"{path or 'config'}: expected an object")
    out = copy.deepcopy(defaults)
    for key, value in given.items():
        here = f"{path}.{key}" if path else key
        if key not in defaults:
            raise ConfigError(f"unknown config key {here!r}")
        base = defaults[key]
        if isinstance(base, dict) and not isinstance(value, dict):
            raise ConfigError(f"{here}: expected an object")
        if here == "terrain":
            # Variant object: keys depend on "kind", validated later.
            out[key] = copy.deepcopy(value)
        elif isinstance(base, dict):
            out[key] = _merge(base, value, here)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _require_number(d, key, path, positive=False, allow_none=False):
    v = d.get(key)
    if v is None and allow_none:
        return
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number, got {v!r}")
    if positive and v <= 0:
        raise ConfigError(f"{path}.{key}: must be positive, got {v}")


def _validate(d):
    if not isinstance(d.get("name"), str):
        raise ConfigError("name: expected a string")
    _require_number(d, "duration", "config", positive=True)
    _require_number(d, "dt", "config", positive=True)
    if d["observer_mode"] not in ("independent", "shared_command"):
        raise ConfigError(f"observer_mode: unknown mode {d['observer_mode']!r}")

    terrain = d["terrain"]
    kind = terrain.get("kind")
    if kind not in _TERRAIN_KEYS:
        raise ConfigError(f"terrain.kind: unknown kind {kind!r}")
    extra = set(terrain) - _TERRAIN_KEYS[kind]
    if extra:
        raise ConfigError(f"terrain: unknown keys for kind {kind!r}: {sorted(extra)}")

    mission = d["mission"]
    wps = mission.get("waypoints")
    if not isinstance(wps, list) or not wps:
        raise ConfigError("mission.waypoints: expected a non-empty list")
    for i, wp in enumerate(wps):
        if (not isinstance(wp, (list, tuple)) or len(wp) != 2
                or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in wp)):
            raise ConfigError(f"mission.waypoints[{i}]: expected [x, y]")
    _require_number(mission, "acceptance_radius", "mission", positive=True)
    _require_number(mission, "cruise_speed", "mission", positive=True)
    _require_number(mission, "heading_slew_rate", "mission", positive=True)

    for key in ("mass", "yaw_inertia", "surge_damping", "yaw_damping", "length",
                "track_width", "wheel_radius", "gravity"):
        _require_number(d["rover"], key, "rover", positive=True)
    for key in ("torque_constant", "back_emf_constant", "max_voltage"):
        _require_number(d["rover"]["motor"], key, "rover.motor", positive=True)

    for key in ("sigma_accel", "sigma_heading", "sigma_voltage", "k",
                "voltage_cutoff", "health_cutoff"):
        _require_number(d["vitals"], key, "vitals", positive=True)
    if d["vitals"]["voltage_mode"] not in ("rate", "level"):
        raise ConfigError(
            f"vitals.voltage_mode: unknown mode {d['vitals']['voltage_mode']!r}")

    th = d["thresholds"]
    for ch in ("heading", "velocity"):
        for key in ("c", "static"):
            _require_number(th[ch], key, f"thresholds.{ch}", positive=True)
    if not isinstance(th["debounce_n"], int) or th["debounce_n"] < 1:
        raise ConfigError("thresholds.debounce_n: expected an integer >= 1")

    seen = set()
    faults = []
    if not isinstance(d["faults"], list):
        raise ConfigError("faults: expected a list")
    for i, f in enumerate(d["faults"]):
        if not isinstance(f, dict) or "kind" not in f:
            raise ConfigError(f"faults[{i}]: expected an object with a 'kind'")
        kind = f["kind"]
        if kind not in _FAULT_DEFAULTS:
            raise ConfigError(f"faults[{i}].kind: unknown kind {kind!r}")
        if kind in seen:
            raise ConfigError(f"faults[{i}]: at most one fault of kind {kind!r} per run")
        seen.add(kind)
        merged = _merge(_FAULT_DEFAULTS[kind], f, f"faults[{i}]")
        _require_number(merged, "t_inject", f"faults[{i}]")
        if merged["t_inject"] < 0:
            raise ConfigError(f"faults[{i}].t_inject: must be >= 0")
        if kind == "motor_failure" and not 0 <= merged["wheel_index"] <= 5:
            raise ConfigError(f"faults[{i}].wheel_index: must be in 0..5")
        faults.append(merged)
    d["faults"] = faults

    noise = d["noise"]
    if not isinstance(noise["seed"], int):
        raise ConfigError("noise.seed: expected an integer")
    for name, sigma in noise["sigmas"].items():
        if isinstance(sigma, bool) or not isinstance(sigma, (int, float)) or sigma < 0:
            raise ConfigError(f"noise.sigmas.{name}: expected a number >= 0")


def from_dict(given):
    """Validate a raw config dict and return a full ScenarioConfig."""
    if not isinstance(given, dict):
        raise ConfigError("config root must be a JSON object")
    given = copy.deepcopy(given)
    builtin = given.pop("builtin", None)
    base = DEFAULTS
    if builtin is not None:
        base = _merge(DEFAULTS, builtin_config_dict(builtin), "")
    merged = _merge(base, given, "")
    _validate(merged)
    return ScenarioConfig(**merged)


def parse_config(path):
    """Load and validate a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: JSON syntax error at line {e.lineno}: {e.msg}")
    return from_dict(raw)


def write_config(cfg, path):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(cfg.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")


def _parse_override_path(path):
    parts = []
    for chunk in path.split("."):
        while "[" in chunk:
            head, rest = chunk.split("[", 1)
            idx, chunk = rest.split("]", 1)
            if head:
                parts.append(head)
            parts.append(int(idx))
        if chunk:
            parts.append(chunk)
    return parts


def apply_overrides(raw, overrides):
    """Apply CLI `key=value` overrides (dotted paths, [i] list indexing)
    onto a raw config dict. Values parse as JSON, falling back to strings."""
    raw = copy.deepcopy(raw)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} must look like key=value")
        path, _, text = item.partition("=")
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        parts = _parse_override_path(path.strip())
        if not parts:
            raise ConfigError(f"override {item!r} has an empty key path")
        node = raw
        try:
            for part in parts[:-1]:
                node = node[part]
            node[parts[-1]] = value
        except (KeyError, IndexError, TypeError):
            raise ConfigError(f"override path {path!r} does not exist in the config")
    return raw


# --- builtin scenarios -----------------------------------------------------

_GYRO_FAULT = {"kind": "gyro_offset", "offset_deg": 10.0, "t_inject": 5.0}
_MOTOR_FAULT = {"kind": "motor_failure", "wheel_index": 0, "t_inject": 5.0}

_STRAIGHT = {
    "terrain": {"kind": "sinusoid", "amplitude": 0.1, "wavelength": 40.0},
    "mission": {"waypoints": [[20.0, 0.0]]},
    "duration": 200.0,
}
_SERPENTINE = {
    "terrain": {"kind": "sinusoid", "amplitude": 0.1, "wavelength": 40.0},
    "mission": {
        "waypoints": [[6.0, 3.0], [12.0, -3.0], [18.0, 3.0], [24.0, -3.0], [30.0, 0.0]],
    },
    "duration": 400.0,
}

BUILTIN_NAMES = (
    "straight_A", "straight_B", "straight_C",
    "serpentine_A", "serpentine_B", "serpentine_C",
)


def builtin_config_dict(name):
    """Raw config dict for a named builtin scenario."""
    if name not in BUILTIN_NAMES:
        raise ConfigError(f"unknown builtin scenario {name!r}")
    path, case = name.rsplit("_", 1)
    base = copy.deepcopy(_STRAIGHT if path == "straight" else _SERPENTINE)
    base["name"] = name
    if case == "B":
        base["faults"] = [copy.deepcopy(_GYRO_FAULT)]
    elif case == "C":
        base["faults"] = [copy.deepcopy(_MOTOR_FAULT)]
    return base
