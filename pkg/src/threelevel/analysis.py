"""Observables and analytic approximations for the dressed-state dynamics.

Covers the perturbative quadrature solutions for a system prepared in one
dressed state (populations driven by gamma_c, oscillatory coherence
integrals), the stability metrics

    gamma_c T << 1,   T sqrt(Delta^2 + 4 Omega^2) >> 1,   Omega^2 T / Delta >> 1,

with the extra bright-state condition Gamma1 << Delta, and the Hadamard-type
hold scenario at theta = pi/4.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .dissipation import DerivedRates, derived_rates as _derived_rates
from .evolution import Trajectory
from .pulses import PulseSchedule

# Order-of-magnitude reading of the stability inequalities.
MUCH_LESS = 0.1
MUCH_GREATER = 10.0

# Required sampling of the fastest oscillation (lam3 - lam2) in the
# quadrature integrals: at least this many grid points per period.
MIN_POINTS_PER_PERIOD = 20

QUADRATURE_KINDS = (
    "dark_R11", "dark_R22", "dark_R21", "dark_R31", "dark_R32",
    "b_R11", "b_R22", "b_R12", "b_R31", "b_R32", "third_R33",
)

# Trajectory matrix element (row, col) each quadrature approximates; the
# dark_/b_/third_ prefix names the dressed state the run starts in.
_QUADRATURE_TARGET = {
    "dark_R11": (0, 0), "dark_R22": (1, 1), "dark_R21": (1, 0),
    "dark_R31": (2, 0), "dark_R32": (2, 1),
    "b_R11": (0, 0), "b_R22": (1, 1), "b_R12": (0, 1),
    "b_R31": (2, 0), "b_R32": (2, 1),
    "third_R33": (2, 2),
}


@dataclass(frozen=True)
class QuadratureEstimate:
    which: str
    times: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class StabilityReport:
    gc_T: float
    adiab1: float                # T * sqrt(Delta^2 + 4 Omega^2)
    adiab2: float                # Omega^2 T / Delta
    gamma1_over_delta: float
    delta_positive: bool
    omega_peak: float
    delta_at_peak: float
    verdicts: dict = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return all(v for v in self.verdicts.values() if v is not None)


def purity(rho: np.ndarray) -> float:
    """Tr(rho^2); 1 for pure states, 1/3 for the maximally mixed state."""
    rho = np.asarray(rho)
    value = np.trace(rho @ rho)
    return float(value.real)


def adiabatic_populations(traj: Trajectory) -> np.ndarray:
    """Time series of the three dressed-state populations, shape (n, 3)."""
    return traj.pops_adiabatic


def _schedule_arrays(schedule: PulseSchedule, grid: np.ndarray):
    sample = schedule.rabi(grid)
    delta, ddelta = schedule.delta(grid)
    theta = np.arctan2(sample.omega_p, sample.omega_c)
    phi = 0.5 * np.arctan2(2.0 * sample.omega, delta)
    theta_dot = (sample.domega_p * sample.omega_c
                 - sample.omega_p * sample.domega_c) / sample.omega ** 2
    phi_dot = (sample.domega * delta - sample.omega * ddelta) \
        / (delta * delta + 4.0 * sample.omega ** 2)
    root = np.hypot(delta, 2.0 * sample.omega)
    lam2, lam3 = 0.5 * (delta - root), 0.5 * (delta + root)
    return theta, phi, theta_dot, phi_dot, lam2, lam3


def _oscillatory(grid, f, rate, conj_phase=False):
    """I(t) = int_0^t f(t') exp(+-i [phase(t) - phase(t')]) dt' with
    phase = cumulative integral of `rate`."""
    phase = cumulative_trapezoid(rate, grid, initial=0.0)
    sign = -1.0 if conj_phase else 1.0
    inner = cumulative_trapezoid(f * np.exp(-1j * sign * phase), grid,
                                 initial=0.0)
    return np.exp(1j * sign * phase) * inner


def quadrature_solution(which: str, schedule: PulseSchedule,
                        rates: DerivedRates,
                        grid: np.ndarray) -> QuadratureEstimate:
    """Evaluate one of the perturbative solutions on the given time grid.

    The grid must resolve the fastest phase (lam3 - lam2) with at least
    MIN_POINTS_PER_PERIOD points per period.
    """
    if which not in QUADRATURE_KINDS:
        raise ValueError(f"unknown quadrature {which!r}")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid must be a 1-d array of at least two times")
    theta, phi, theta_dot, phi_dot, lam2, lam3 = _schedule_arrays(schedule,
                                                                  grid)
    dt = np.diff(grid)
    fastest = np.max(np.abs(lam3 - lam2))
    if fastest > 0 and np.max(dt) > 2.0 * math.pi / (fastest
                                                     * MIN_POINTS_PER_PERIOD):
        raise ValueError(
            f"grid under-resolves the fastest phase: need at least "
            f"{MIN_POINTS_PER_PERIOD} points per period of rate {fastest:.3g}")

    gc = rates.gamma_c
    sin2t = np.sin(2.0 * theta)
    if which == "dark_R11":
        values = 1.0 - 0.5 * gc * cumulative_trapezoid(
            sin2t ** 2, grid, initial=0.0)
    elif which == "dark_R22":
        values = 0.5 * gc * cumulative_trapezoid(
            sin2t ** 2 * np.cos(phi) ** 2, grid, initial=0.0)
    elif which == "dark_R21":
        f = (0.25 * gc * np.sin(4.0 * theta) - theta_dot) * np.cos(phi)
        values = _oscillatory(grid, f, lam2)
    elif which == "dark_R31":
        f = (0.25 * gc * np.sin(4.0 * theta) - theta_dot) * np.sin(phi)
        values = _oscillatory(grid, f, lam3)
    elif which == "dark_R32":
        f = 0.25 * gc * sin2t ** 2 * np.sin(2.0 * phi)
        values = _oscillatory(grid, f, lam3 - lam2)
    elif which == "b_R11":
        values = 0.5 * gc * cumulative_trapezoid(sin2t ** 2, grid,
                                                 initial=0.0)
    elif which == "b_R22":
        values = 1.0 - 0.5 * gc * cumulative_trapezoid(sin2t ** 2, grid,
                                                       initial=0.0)
    elif which == "b_R12":
        f = 0.25 * gc * np.sin(4.0 * theta) - theta_dot
        values = _oscillatory(grid, f, lam2, conj_phase=True)
    elif which == "b_R31":
        f = gc * phi * np.sin(theta) ** 2 * np.cos(theta) ** 2
        values = _oscillatory(grid, f, lam3, conj_phase=True)
    elif which == "b_R32":
        f = rates.Gamma1 * phi + gc * phi * np.cos(theta) ** 4 + phi_dot
        values = _oscillatory(grid, f, lam3 - lam2, conj_phase=True)
    else:  # third_R33
        values = 1.0 - rates.gamma_total * grid

    if which in ("dark_R11", "dark_R22", "b_R11", "b_R22", "third_R33"):
        if np.min(values) < -1e-9 or np.max(values) > 1.0 + 1e-9:
            raise ValueError(
                f"{which} left [0, 1]; the perturbative solution is outside "
                "its validity window on this schedule")
    return QuadratureEstimate(which, grid, values)


def compare_analytic_numeric(which: str, traj: Trajectory,
                             schedule: PulseSchedule,
                             rates: DerivedRates) -> float:
    """Max deviation between a quadrature solution and the matching matrix
    element of a propagated trajectory, over the trajectory's time grid.

    The quadrature is evaluated on an internally refined grid so its own
    resolution requirement holds regardless of the trajectory sampling.
    """
    times = traj.times
    dt = times[1] - times[0]
    _, _, _, _, lam2, lam3 = _schedule_arrays(schedule, times)
    fastest = float(np.max(np.abs(lam3 - lam2)))
    refine = 1
    if fastest > 0:
        needed = 2.0 * math.pi / (fastest * MIN_POINTS_PER_PERIOD)
        refine = max(1, int(math.ceil(dt / needed)))
    n_fine = (len(times) - 1) * refine + 1
    fine = np.linspace(times[0], times[-1], n_fine)
    estimate = quadrature_solution(which, schedule, rates, fine)
    analytic = estimate.values[::refine]
    row, col = _QUADRATURE_TARGET[which]
    numeric = traj.R[:, row, col]
    if which in ("dark_R11", "dark_R22", "b_R11", "b_R22", "third_R33"):
        numeric = numeric.real
    return float(np.max(np.abs(numeric - analytic)))


def stability_report(config, rates, schedule: PulseSchedule,
                     horizon: float = None, derived: DerivedRates = None,
                     much_less: float = MUCH_LESS,
                     much_greater: float = MUCH_GREATER) -> StabilityReport:
    """Dimensionless stability metrics evaluated at peak total coupling.

    Verdicts are None for the detuning-dependent metrics when the detuning
    at the evaluation point is not positive.
    """
    if derived is None:
        derived = _derived_rates(config, rates)
    T = schedule.horizon if horizon is None else horizon
    probe = np.linspace(0.0, schedule.horizon, 2001)
    sample = schedule.rabi(probe)
    k = int(np.argmax(sample.omega))
    omega_peak = float(sample.omega[k])
    delta_peak = float(schedule.delta(probe[k])[0])

    gc_T = derived.gamma_c * T
    adiab1 = T * math.hypot(delta_peak, 2.0 * omega_peak)
    delta_positive = delta_peak > 0.0
    if delta_peak > 0.0:
        adiab2 = omega_peak ** 2 * T / delta_peak
        g1_over_delta = derived.Gamma1 / delta_peak
    elif delta_peak == 0.0:
        adiab2 = math.inf
        g1_over_delta = math.inf if derived.Gamma1 > 0 else math.nan
    else:
        adiab2 = math.nan
        g1_over_delta = math.nan

    verdicts = {
        "gc_T_much_less_1": gc_T < much_less,
        "adiab1_much_greater_1": adiab1 > much_greater,
        "adiab2_much_greater_1":
            (adiab2 > much_greater) if delta_peak >= 0.0 else None,
        "gamma1_much_less_delta":
            (g1_over_delta < much_less) if delta_peak >= 0.0 else None,
    }
    return StabilityReport(gc_T=gc_T, adiab1=adiab1, adiab2=adiab2,
                           gamma1_over_delta=g1_over_delta,
                           delta_positive=delta_positive,
                           omega_peak=omega_peak, delta_at_peak=delta_peak,
                           verdicts=verdicts)


def hadamard_fidelity(traj: Trajectory, target: str = "lambda1",
                      threshold: float = 0.99):
    """Fidelity of rho(t) against (|1> -/+ |2>)/sqrt(2) for a theta = pi/4
    hold.  Returns (fidelity series, first time the series crosses the
    threshold downward, or None)."""
    if target not in ("lambda1", "lambda2"):
        raise ValueError("target must be 'lambda1' or 'lambda2'")
    if np.max(np.abs(traj.theta - math.pi / 4.0)) > 1e-8:
        raise ValueError("hadamard_fidelity requires a static theta = pi/4 "
                         "schedule (equal drives)")
    sign = -1.0 if target == "lambda1" else 1.0
    psi = np.array([1.0, sign, 0.0]) / math.sqrt(2.0)
    fid = np.einsum("i,nij,j->n", psi.conj(), traj.rho, psi).real
    below = np.nonzero(fid < threshold)[0]
    if below.size == 0 or below[0] == 0:
        t_cross = None
    else:
        k = below[0]
        f0, f1 = fid[k - 1], fid[k]
        t0, t1 = traj.times[k - 1], traj.times[k]
        t_cross = float(t0 + (threshold - f0) / (f1 - f0) * (t1 - t0))
    return fid, t_cross
