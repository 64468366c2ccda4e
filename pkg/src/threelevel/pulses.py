"""Drive envelopes and detuning schedules with analytic time derivatives.

All quantities are dimensionless: times in units of the schedule horizon T,
frequencies (Rabi couplings, detunings, rates) in units of 1/T.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# Default Gaussian geometry for the two-pulse transfer schedules.  Tuned so
# that at peak coupling 100/T and detuning 1000/T the transfer stays above
# 0.99 and the counterintuitive/intuitive orderings agree to ~0.013 in final
# transfer (see tests); both knobs are overridable per schedule.
DEFAULT_WIDTH_FRACTION = 0.44   # Gaussian width as a fraction of the horizon
DEFAULT_DELAY_FRACTION = 0.38   # center offset from T/2 as a fraction of width

FLOOR_FRACTION = 1e-9           # Rabi floor relative to the peak coupling

ORDERINGS = ("counterintuitive", "intuitive", "static")


@dataclass(frozen=True)
class GaussianPulse:
    """Gaussian envelope peak*exp(-((t-center)/width)^2)."""

    peak: float
    center: float
    width: float

    def __post_init__(self):
        if self.peak < 0:
            raise ValueError("Gaussian peak must be nonnegative")
        if self.width <= 0:
            raise ValueError("Gaussian width must be positive")

    def value(self, t):
        u = (np.asarray(t, dtype=float) - self.center) / self.width
        return self.peak * np.exp(-u * u)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        u = (t - self.center) / self.width
        return self.peak * np.exp(-u * u) * (-2.0 * u / self.width)

    def sample(self, t: float):
        # scalar fast path for integrator inner loops
        u = (t - self.center) / self.width
        g = self.peak * math.exp(-u * u)
        return g, -2.0 * u / self.width * g


@dataclass(frozen=True)
class ConstantPulse:
    """Flat envelope; derivative is identically zero."""

    level: float

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("constant envelope must be nonnegative")

    def value(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.level)

    def derivative(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def sample(self, t: float):
        return self.level, 0.0


@dataclass(frozen=True)
class ThetaLawPulse:
    """One leg of a constant-total-coupling pair with tan(2*theta) growing
    exponentially at rate gamma_c, i.e. theta' = (gamma_c/4) sin(4*theta).

    component "sin" gives omega*sin(theta(t)) (pump leg), "cos" gives
    omega*cos(theta(t)) (Stokes leg).
    """

    theta0: float
    gamma_c: float
    t0: float
    omega: float
    component: str

    def __post_init__(self):
        if not 0.0 < self.theta0 < math.pi / 4:
            raise ValueError("theta0 must lie strictly between 0 and pi/4")
        if self.component not in ("sin", "cos"):
            raise ValueError("component must be 'sin' or 'cos'")

    def theta(self, t):
        t = np.asarray(t, dtype=float)
        tan2 = math.tan(2.0 * self.theta0) * np.exp(self.gamma_c * (t - self.t0))
        return 0.5 * np.arctan(tan2)

    def theta_dot(self, t):
        return 0.25 * self.gamma_c * np.sin(4.0 * self.theta(t))

    def value(self, t):
        th = self.theta(t)
        return self.omega * (np.sin(th) if self.component == "sin" else np.cos(th))

    def derivative(self, t):
        th = self.theta(t)
        dth = 0.25 * self.gamma_c * np.sin(4.0 * th)
        if self.component == "sin":
            return self.omega * np.cos(th) * dth
        return -self.omega * np.sin(th) * dth

    def sample(self, t: float):
        tan2 = math.tan(2.0 * self.theta0) * math.exp(
            self.gamma_c * (t - self.t0))
        th = 0.5 * math.atan(tan2)
        dth = 0.25 * self.gamma_c * math.sin(4.0 * th)
        if self.component == "sin":
            return self.omega * math.sin(th), self.omega * math.cos(th) * dth
        return self.omega * math.cos(th), -self.omega * math.sin(th) * dth


def eval_envelope(pulse, t):
    """Evaluate an envelope, returning (value, analytic derivative)."""
    return pulse.value(t), pulse.derivative(t)


@dataclass(frozen=True)
class DetuningSchedule:
    """Single-photon detuning: constant delta0, or the shaped law
    delta(t) = delta0 * Omega(t) * exp(gamma1*(t - t0)) that keeps the
    upper-state mixing angle decaying at rate gamma1."""

    kind: str = "constant"
    delta0: float = 0.0
    gamma1: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "shaped"):
            raise ValueError(f"unknown detuning kind {self.kind!r}")
        if self.kind == "shaped" and self.gamma1 < 0:
            raise ValueError("shaped detuning requires gamma1 >= 0")


class PulseSample(NamedTuple):
    omega_p: np.ndarray
    omega_c: np.ndarray
    domega_p: np.ndarray
    domega_c: np.ndarray
    omega: np.ndarray
    domega: np.ndarray
    floor_engaged: np.ndarray


@dataclass(frozen=True)
class PulseSchedule:
    """Pair of drive envelopes plus a detuning law over a finite horizon.

    Envelopes are analytic (value and derivative) and are evaluated as given
    outside [0, horizon] as well; no clamping is applied.  A small floor on
    the total coupling keeps the ground-state mixing angle defined when both
    envelopes underflow; samples where it engages are flagged.
    """

    pump: object
    stokes: object
    detuning: DetuningSchedule
    horizon: float
    ordering: str
    floor_omega: float

    def envelopes(self, t):
        return (self.pump.value(t), self.stokes.value(t),
                self.pump.derivative(t), self.stokes.derivative(t))

    def rabi(self, t) -> PulseSample:
        op, oc, dop, doc = self.envelopes(t)
        omega_raw = np.hypot(op, oc)
        if self.floor_omega > 0.0:
            floor_engaged = omega_raw < self.floor_omega
            omega = np.maximum(omega_raw, self.floor_omega)
        else:
            if np.any(omega_raw == 0.0):
                raise ValueError("total coupling vanished and no floor is set")
            floor_engaged = np.zeros_like(omega_raw, dtype=bool)
            omega = omega_raw
        domega = (op * dop + oc * doc) / omega
        return PulseSample(op, oc, dop, doc, omega, domega, floor_engaged)

    def delta(self, t):
        """Detuning value and derivative at time t."""
        d = self.detuning
        if d.kind == "constant":
            t = np.asarray(t, dtype=float)
            return np.full_like(t, d.delta0), np.zeros_like(t)
        sample = self.rabi(t)
        growth = np.exp(d.gamma1 * (np.asarray(t, dtype=float) - d.t0))
        value = d.delta0 * sample.omega * growth
        deriv = d.delta0 * growth * (sample.domega + d.gamma1 * sample.omega)
        return value, deriv

    def rabi_scalar(self, t: float):
        """Scalar fast path: (omega_p, omega_c, domega_p, domega_c, omega,
        domega, floor_engaged) as plain floats."""
        op, dop = self.pump.sample(t)
        oc, doc = self.stokes.sample(t)
        omega_raw = math.hypot(op, oc)
        if omega_raw >= self.floor_omega and omega_raw > 0.0:
            omega, floored = omega_raw, False
        elif self.floor_omega > 0.0:
            omega, floored = self.floor_omega, True
        else:
            raise ValueError("total coupling vanished and no floor is set")
        domega = (op * dop + oc * doc) / omega
        return op, oc, dop, doc, omega, domega, floored

    def delta_scalar(self, t: float):
        d = self.detuning
        if d.kind == "constant":
            return d.delta0, 0.0
        op, oc, dop, doc, omega, domega, _ = self.rabi_scalar(t)
        growth = math.exp(d.gamma1 * (t - d.t0))
        return (d.delta0 * omega * growth,
                d.delta0 * growth * (domega + d.gamma1 * omega))

    @property
    def is_static(self) -> bool:
        """True when both envelopes and the detuning are time independent."""
        return (isinstance(self.pump, ConstantPulse)
                and isinstance(self.stokes, ConstantPulse)
                and self.detuning.kind == "constant")


def shaped_detuning(detuning: DetuningSchedule, schedule: PulseSchedule, t):
    """delta0 * Omega(t) * exp(gamma1*(t-t0)) for a shaped detuning law."""
    if detuning.kind != "shaped":
        raise ValueError("shaped_detuning requires a shaped DetuningSchedule")
    sample = schedule.rabi(t)
    return detuning.delta0 * sample.omega * np.exp(
        detuning.gamma1 * (np.asarray(t, dtype=float) - detuning.t0))


def make_stirap_schedule(peak_omega: float, delta: float, horizon: float,
                         ordering: str, width: float = None,
                         delay: float = None,
                         detuning: DetuningSchedule = None) -> PulseSchedule:
    """Two-pulse transfer schedule.

    "counterintuitive" places the Stokes pulse before the pump,
    "intuitive" reverses them, and "static" uses equal constant envelopes
    (constant mixing angle pi/4).  Each Gaussian has peak peak_omega; width
    and the center offset from T/2 default to the module geometry constants.
    """
    if peak_omega <= 0:
        raise ValueError("peak_omega must be positive")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if ordering not in ORDERINGS:
        raise ValueError(f"ordering must be one of {ORDERINGS}")
    if detuning is None:
        detuning = DetuningSchedule(kind="constant", delta0=delta)

    floor = FLOOR_FRACTION * peak_omega
    if ordering == "static":
        pump = ConstantPulse(peak_omega)
        stokes = ConstantPulse(peak_omega)
        return PulseSchedule(pump, stokes, detuning, horizon, ordering, floor)

    if width is None:
        width = DEFAULT_WIDTH_FRACTION * horizon
    if delay is None:
        delay = DEFAULT_DELAY_FRACTION * width
    early = horizon / 2.0 - delay
    late = horizon / 2.0 + delay
    if ordering == "counterintuitive":
        stokes_center, pump_center = early, late
    else:
        pump_center, stokes_center = early, late
    pump = GaussianPulse(peak_omega, pump_center, width)
    stokes = GaussianPulse(peak_omega, stokes_center, width)
    return PulseSchedule(pump, stokes, detuning, horizon, ordering, floor)


def theta_law_schedule(theta0: float, gamma_c: float, t0: float, omega: float,
                       horizon: float, delta: float = 0.0) -> PulseSchedule:
    """Constant-total-coupling schedule with tan(2*theta) growing as
    exp(gamma_c*(t-t0)), so theta' exactly cancels the coherence drive term
    (gamma_c/4) sin(4*theta)."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    pump = ThetaLawPulse(theta0, gamma_c, t0, omega, "sin")
    stokes = ThetaLawPulse(theta0, gamma_c, t0, omega, "cos")
    # The principal arctan branch keeps theta below pi/4, but guard against
    # parameter combinations that would flip the Stokes envelope sign.
    t_check = np.linspace(0.0, horizon, 257)
    if np.any(stokes.value(t_check) < 0):
        raise ValueError("mixing angle reached pi/2 inside the horizon")
    detuning = DetuningSchedule(kind="constant", delta0=delta)
    return PulseSchedule(pump, stokes, detuning, horizon, "theta_law",
                         FLOOR_FRACTION * omega)
