"""Residual generation, adaptive/static thresholds, and the detection rule.

The adaptive threshold sums three paths per channel: a constant floor, a
high-passed (dynamics-tracking) component, and a component scaled by the
rover's loss of health, then low-passes the sum. Detection is two-sided
(|residual| against the threshold) with a consecutive-sample debounce.
"""

from dataclasses import dataclass, field

from .errors import ConfigError
from .simcore import FilterState, HIGH_PASS_1, LOW_PASS_1, wrap_angle

HEADING = "heading"
VELOCITY = "velocity"
ADAPTIVE = "adaptive"
STATIC = "static"


@dataclass
class ResidualSample:
    r_psi: float
    r_v: float
    t: float


def residuals(psi_observer, u_observer, psi_meas, speed_meas, t):
    """Observer-minus-plant output errors; heading difference is wrapped."""
    return ResidualSample(
        r_psi=wrap_angle(psi_observer - psi_meas),
        r_v=u_observer - speed_meas,
        t=t,
    )


class ThresholdChannel:
    """Adaptive threshold generator for one residual channel."""

    def __init__(self, c, k_d=2.0, k_l=1.0, hp_cutoff=0.5, lp_cutoff=0.2, dt=0.01):
        if c <= 0.0:
            raise ConfigError("threshold constant component must be positive")
        self.c = c
        self.k_d = k_d
        self.k_l = k_l
        self.hp = FilterState(HIGH_PASS_1, hp_cutoff, dt)
        self.lp = FilterState(LOW_PASS_1, lp_cutoff, dt)
        # Start settled at the constant floor so a run never begins with a
        # zero threshold.
        self.lp.reset(c)
        self.delta_r_tol = c

    def step(self, r, h):
        th_d = self.k_d * abs(self.hp.step(r))
        th_l = self.k_l * (1.0 - h) * abs(r)
        self.delta_r_tol = self.lp.step(self.c + th_d + th_l)
        return self.delta_r_tol


def static_threshold(config, channel):
    """Constant comparison threshold for a channel; defaults are tuned so the
    nominal scenarios stay alarm-free."""
    try:
        return config[channel]
    except KeyError:
        raise ConfigError(f"no static threshold configured for channel {channel!r}")


DEFAULT_STATIC_THRESHOLDS = {HEADING: 0.1, VELOCITY: 0.05}


@dataclass
class DetectionEvent:
    t: float
    channel: str
    residual_value: float
    threshold_value: float
    detector: str
    kind: str = "detect"  # "detect" or "clear"

    def as_dict(self):
        return {
            "t": self.t,
            "channel": self.channel,
            "residual": self.residual_value,
            "threshold": self.threshold_value,
            "detector": self.detector,
            "kind": self.kind,
        }


@dataclass
class DetectorState:
    debounce_n: int = 3
    consecutive_exceed: int = 0
    consecutive_ok: int = 0
    active_alarm: bool = False


def detect(ds, r, threshold, channel, detector_kind, t):
    """Debounced two-sided comparison; returns a DetectionEvent when the
    alarm state changes, else None."""
    exceeded = abs(r) > threshold
    if ds.active_alarm:
        if exceeded:
            ds.consecutive_ok = 0
        else:
            ds.consecutive_ok += 1
            if ds.consecutive_ok >= ds.debounce_n:
                ds.active_alarm = False
                ds.consecutive_ok = 0
                return DetectionEvent(t, channel, r, threshold, detector_kind, kind="clear")
        return None
    if exceeded:
        ds.consecutive_exceed += 1
        if ds.consecutive_exceed >= ds.debounce_n:
            ds.active_alarm = True
            ds.consecutive_exceed = 0
            return DetectionEvent(t, channel, r, threshold, detector_kind, kind="detect")
    else:
        ds.consecutive_exceed = 0
    return None
