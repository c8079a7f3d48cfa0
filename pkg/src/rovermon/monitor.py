"""Rover vitals, degradation probability, and the entropy-based health signal.

Four vitals, each in [0, 1]: forward acceleration, rate of change of
distance to target, heading rate, and rate of change of the mean commanded
voltage. Their mean is the degradation probability P; health is one minus
the binary entropy (in bits) of the faulty/non-faulty outcome pair, smoothed
by a critically damped second-order low pass.
"""

import math
from collections import deque
from dataclasses import dataclass, field

from .simcore import FilterState, LOW_PASS_1, LOW_PASS_2

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass
class VitalVector:
    v_accel: float
    v_dist_rate: float
    v_heading_rate: float
    v_voltage_rate: float

    def as_tuple(self):
        return (self.v_accel, self.v_dist_rate, self.v_heading_rate, self.v_voltage_rate)


@dataclass
class VitalParams:
    sigma_accel: float = 0.4
    sigma_heading: float = 0.4
    sigma_voltage: float = 0.4
    k: float = 20.0  # logistic steepness, 1/(m/s)
    x0: float = 0.1  # logistic midpoint, m/s
    clamp_p: bool = True
    voltage_mode: str = "rate"  # "rate" (voltage derivative) or "level"
    distance_window: int = 5  # moving-average samples on the distance rate
    voltage_cutoff: float = 0.5  # Hz, smoothing before the voltage-rate difference
    voltage_rate_window: int = 25  # samples spanned by the voltage-rate difference
    health_cutoff: float = 1.0  # Hz, second-order health filter


@dataclass
class HealthSample:
    p: float
    h_raw: float
    h_filtered: float


class MonitorState:
    """Per-run mutable state: rate memories plus the health filter."""

    def __init__(self, params, dt, smooth=True):
        self.params = params
        self.dt = dt
        # Smoothing matters only when sensing noise is enabled.
        self.smooth = smooth
        self.prev_distance = None
        self._dist_rates = deque(maxlen=max(1, params.distance_window))
        self._voltage_filter = FilterState(LOW_PASS_1, params.voltage_cutoff, dt)
        self._voltage_history = deque(maxlen=max(2, params.voltage_rate_window + 1))
        self.health_filter = FilterState(LOW_PASS_2, params.health_cutoff, dt)
        self._first_sample = True


def vital_gaussian(x, sigma):
    """Inverted Gaussian bump: near zero for nominal x, toward one for large |x|."""
    value = 1.0 - math.exp(-(x * x) / (2.0 * sigma * sigma)) / (sigma * _SQRT_2PI)
    # For sigma < 1/sqrt(2*pi) the raw value is always positive; the clamp
    # is a guard for wider sigmas.
    return min(max(value, 0.0), 1.0)


def vital_dist_rate(d_dot, k=20.0, x0=0.1):
    """Logistic sigmoid on the distance rate; 0.5 at the midpoint x0."""
    arg = -k * (d_dot - x0)
    if arg > 700.0:
        return 0.0
    if arg < -700.0:
        return 1.0
    return 1.0 / (1.0 + math.exp(arg))


def distance_rate(ms, position, target, dt):
    """Backward difference of the Euclidean distance to the target.

    The first sample primes the memory and returns 0. With noisy sensing a
    short moving average suppresses differentiated noise.
    """
    d = math.hypot(target[0] - position[0], target[1] - position[1])
    if ms.prev_distance is None:
        ms.prev_distance = d
        return 0.0
    rate = (d - ms.prev_distance) / dt
    ms.prev_distance = d
    if not ms.smooth:
        return rate
    ms._dist_rates.append(rate)
    return sum(ms._dist_rates) / len(ms._dist_rates)


def _voltage_signal(ms, cmd, dt):
    """Input to the voltage vital: by default the rate of change of the mean
    commanded voltage, or the smoothed level itself in "level" mode.

    The mean voltage is low-passed and differenced across a short window so
    that control jitter does not masquerade as a fault signature.
    """
    mean_v = 0.5 * (cmd.v_left + cmd.v_right)
    if ms._first_sample:
        ms._voltage_filter.reset(mean_v)
    filtered = ms._voltage_filter.step(mean_v)
    if ms.params.voltage_mode == "level":
        return filtered
    ms._voltage_history.append(filtered)
    # The rate is undefined until the difference spans the full window;
    # reporting partial-window rates would differentiate startup jitter.
    if len(ms._voltage_history) < ms._voltage_history.maxlen:
        return 0.0
    span = len(ms._voltage_history) - 1
    return (ms._voltage_history[-1] - ms._voltage_history[0]) / (span * dt)


def compute_vitals(reading, cmd, ms, target, params, dt):
    d_dot = distance_rate(ms, reading.position_meas, target, dt)
    return VitalVector(
        v_accel=vital_gaussian(reading.accel_x, params.sigma_accel),
        v_dist_rate=vital_dist_rate(d_dot, params.k, params.x0),
        v_heading_rate=vital_gaussian(reading.gyro_rate, params.sigma_heading),
        v_voltage_rate=vital_gaussian(_voltage_signal(ms, cmd, dt), params.sigma_voltage),
    )


def degradation_probability(vitals):
    """Normalised sum of the four vitals (normalisation factor 0.25)."""
    return 0.25 * sum(vitals.as_tuple())


def _binary_entropy_bits(q):
    if q <= 0.0 or q >= 1.0:
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)


def health_raw(p, clamp_p=True):
    """Health = 1 - binary entropy (bits) of the degradation probability.

    With clamp_p the probability is capped at 0.5 before the entropy, making
    health monotone in degradation; unclamped preserves the symmetric
    entropy formula, under which a saturated p near 1 reads as healthy.
    """
    q = min(p, 0.5) if clamp_p else p
    return 1.0 - _binary_entropy_bits(q)


def monitor_step(ms, reading, cmd, target, params, dt):
    """Vitals -> P -> raw health -> filtered health; state advances."""
    vitals = compute_vitals(reading, cmd, ms, target, params, dt)
    p = degradation_probability(vitals)
    h_raw = health_raw(p, params.clamp_p)
    if ms._first_sample:
        ms.health_filter.reset(h_raw)
        ms._first_sample = False
    h_filtered = ms.health_filter.step(h_raw)
    return vitals, HealthSample(p=p, h_raw=h_raw, h_filtered=h_filtered)
