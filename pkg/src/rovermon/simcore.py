"""Shared numerical substrate: integration, angles, noise, discrete filters."""

import math
import random
from dataclasses import dataclass, field

from .errors import ConfigError, SimulationError

TWO_PI = 2.0 * math.pi


def wrap_angle(theta):
    """Wrap an angle to [-pi, pi)."""
    if not math.isfinite(theta):
        raise SimulationError(f"non-finite angle: {theta!r}")
    wrapped = math.remainder(theta, TWO_PI)
    if wrapped >= math.pi:
        wrapped -= TWO_PI
    return wrapped


@dataclass
class SimClock:
    """Fixed-step clock; time is accumulated by index to avoid drift."""

    dt: float
    step_index: int = 0

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ConfigError(f"dt must be positive, got {self.dt}")

    @property
    def t(self):
        return self.step_index * self.dt

    def advance(self):
        self.step_index += 1


def rk4_step(state, deriv, t, dt):
    """Classical 4th-order Runge-Kutta update of `state` over one step.

    `state` may be a scalar or a sequence of floats; `deriv(t, state)` must
    return the matching shape.
    """
    scalar = isinstance(state, (int, float))
    if scalar:
        state = (state,)
        f = deriv
        deriv = lambda tt, s: (f(tt, s[0]),)

    half = 0.5 * dt
    k1 = deriv(t, state)
    k2 = deriv(t + half, tuple(s + half * k for s, k in zip(state, k1)))
    k3 = deriv(t + half, tuple(s + half * k for s, k in zip(state, k2)))
    k4 = deriv(t + dt, tuple(s + dt * k for s, k in zip(state, k3)))
    sixth = dt / 6.0
    out = tuple(
        s + sixth * (a + 2.0 * (b + c) + d)
        for s, a, b, c, d in zip(state, k1, k2, k3, k4)
    )
    for v in out:
        if not math.isfinite(v):
            raise SimulationError("non-finite state after integration step", t=t)
    return out[0] if scalar else out


LOW_PASS_1 = "low-pass-1"
HIGH_PASS_1 = "high-pass-1"
LOW_PASS_2 = "low-pass-2"


class FilterState:
    """One discrete IIR filter channel (bilinear-transform discretization).

    Supported kinds: first-order low pass, first-order high pass, and a
    critically damped second-order low pass.
    """

    def __init__(self, kind, cutoff_hz, dt):
        if cutoff_hz <= 0.0:
            raise ConfigError(f"cutoff must be positive, got {cutoff_hz}")
        nyquist = 1.0 / (2.0 * dt)
        if cutoff_hz >= nyquist:
            raise ConfigError(
                f"cutoff {cutoff_hz} Hz is at or above Nyquist {nyquist} Hz"
            )
        self.kind = kind
        self.cutoff_hz = cutoff_hz
        self.dt = dt

        k = math.tan(math.pi * cutoff_hz * dt)
        if kind == LOW_PASS_1:
            a0 = 1.0 + k
            self.b = (k / a0, k / a0)
            self.a = ((k - 1.0) / a0,)
        elif kind == HIGH_PASS_1:
            a0 = 1.0 + k
            self.b = (1.0 / a0, -1.0 / a0)
            self.a = ((k - 1.0) / a0,)
        elif kind == LOW_PASS_2:
            # Repeated real pole (critically damped), double zero at z = -1.
            a0 = 1.0 + 2.0 * k + k * k
            self.b = (k * k / a0, 2.0 * k * k / a0, k * k / a0)
            self.a = ((2.0 * k * k - 2.0) / a0, (1.0 - 2.0 * k + k * k) / a0)
        else:
            raise ConfigError(f"unknown filter kind {kind!r}")
        self.reset(0.0)

    @property
    def order(self):
        return len(self.a)

    def reset(self, value=0.0):
        """Prime the internal state to the DC steady state for input `value`."""
        dc = sum(self.b) / (1.0 + sum(self.a))
        self._x = [value] * self.order
        self._y = [dc * value] * self.order

    def step(self, x):
        if self.order == 1:
            y = self.b[0] * x + self.b[1] * self._x[0] - self.a[0] * self._y[0]
            self._x[0] = x
            self._y[0] = y
        else:
            y = (
                self.b[0] * x
                + self.b[1] * self._x[0]
                + self.b[2] * self._x[1]
                - self.a[0] * self._y[0]
                - self.a[1] * self._y[1]
            )
            self._x[1] = self._x[0]
            self._x[0] = x
            self._y[1] = self._y[0]
            self._y[0] = y
        return y

    @property
    def output(self):
        return self._y[0]


@dataclass
class NoiseSource:
    """Seeded Gaussian noise with a named standard deviation per channel.

    Equal seeds produce bitwise-equal draw sequences. When disabled, no
    draws are consumed and every sample is exactly zero.
    """

    seed: int = 0
    sigmas: dict = field(default_factory=dict)
    enabled: bool = True

    def __post_init__(self):
        for name, sigma in self.sigmas.items():
            if sigma < 0.0:
                raise ConfigError(f"noise sigma for {name!r} must be >= 0")
        self._rng = random.Random(self.seed)

    def sample(self, channel):
        if not self.enabled:
            return 0.0
        sigma = self.sigmas.get(channel, 0.0)
        return self._rng.gauss(0.0, sigma) if sigma > 0.0 else 0.0
