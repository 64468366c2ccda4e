"""Dressed-state structure of the two-photon-resonant three-level Hamiltonian.

Conventions
-----------
The rotating-frame Hamiltonian in the bare basis (|1>, |2>, |3>) is

    H = Omega_p (|1><3| + |3><1|) + Omega_c (|2><3| + |3><2|) + Delta |3><3|

with half-Rabi couplings, so the quasienergies are

    lam1 = 0,   lam2,3 = (Delta -/+ sqrt(Delta^2 + 4 Omega^2)) / 2,

where Omega^2 = Omega_p^2 + Omega_c^2 and the labels follow the field-free
limit rather than ascending order (lam2 <= 0 <= lam3 for Delta >= 0).

Mixing angles: tan(theta) = Omega_p/Omega_c with theta in [0, pi/2], and
tan(2*phi) = 2*Omega/Delta with 2*phi in (0, pi), so phi -> 0 as
Delta -> +inf and phi = pi/4 on resonance.  The dressed states are

    |lam1> = cos(theta)|1> - sin(theta)|2>
    |lam2> = sin(theta)cos(phi)|1> + cos(theta)cos(phi)|2> - sin(phi)|3>
    |lam3> = sin(theta)sin(phi)|1> + cos(theta)sin(phi)|2> + cos(phi)|3>

and form the columns of the (real orthogonal) transform U, so U = A(theta)
B(phi) factors into two planar rotations.  The nonadiabatic coupling is
defined as F = U^dag dU/dt, which is real antisymmetric with

    F12 = theta' cos(phi),  F13 = theta' sin(phi),  F23 = phi'.
"""

from dataclasses import dataclass

import numpy as np

from .pulses import PulseSchedule

FRAME_UNITARY_TOL = 1e-10
FRAME_DIAG_TOL = 1e-9


@dataclass(frozen=True)
class AdiabaticFrame:
    """Frozen snapshot of the dressed frame at one time point."""

    t: float
    lam: np.ndarray        # (0, lam2, lam3)
    theta: float
    phi: float
    U: np.ndarray          # columns |lam1>, |lam2>, |lam3>
    F: np.ndarray          # U^dag dU/dt
    floor_engaged: bool


def hamiltonian(schedule: PulseSchedule, t: float) -> np.ndarray:
    """Rotating-frame Hamiltonian at time t (Hermitian, complex dtype)."""
    sample = schedule.rabi(t)
    delta, _ = schedule.delta(t)
    h = np.zeros((3, 3), dtype=complex)
    h[0, 2] = h[2, 0] = sample.omega_p
    h[1, 2] = h[2, 1] = sample.omega_c
    h[2, 2] = delta
    return h


def mixing_angles(schedule: PulseSchedule, t: float):
    """Ground- and excited-state mixing angles (theta, phi) plus Omega(t)."""
    sample = schedule.rabi(t)
    delta, _ = schedule.delta(t)
    theta = np.arctan2(sample.omega_p, sample.omega_c)
    phi = 0.5 * np.arctan2(2.0 * sample.omega, delta)
    return float(theta), float(phi), float(sample.omega)


def quasienergies(omega: float, delta: float) -> np.ndarray:
    root = np.hypot(delta, 2.0 * omega)
    return np.array([0.0, 0.5 * (delta - root), 0.5 * (delta + root)])


def transform(theta: float, phi: float) -> np.ndarray:
    """Bare-to-dressed transform U; columns are the dressed states."""
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    return np.array([
        [ct, st * cp, st * sp],
        [-st, ct * cp, ct * sp],
        [0.0, -sp, cp],
    ], dtype=complex)


def _angle_rates(schedule: PulseSchedule, t: float):
    sample = schedule.rabi(t)
    delta, ddelta = schedule.delta(t)
    theta_dot = (sample.domega_p * sample.omega_c
                 - sample.omega_p * sample.domega_c) / sample.omega ** 2
    phi_dot = (sample.domega * delta - sample.omega * ddelta) \
        / (delta * delta + 4.0 * sample.omega ** 2)
    return float(theta_dot), float(phi_dot)


def coupling_matrix(schedule: PulseSchedule, t: float) -> np.ndarray:
    """Nonadiabatic coupling F = U^dag dU/dt from analytic angle rates."""
    _, phi, _ = mixing_angles(schedule, t)
    theta_dot, phi_dot = _angle_rates(schedule, t)
    sp, cp = np.sin(phi), np.cos(phi)
    f = np.zeros((3, 3), dtype=complex)
    f[0, 1], f[1, 0] = theta_dot * cp, -theta_dot * cp
    f[0, 2], f[2, 0] = theta_dot * sp, -theta_dot * sp
    f[1, 2], f[2, 1] = phi_dot, -phi_dot
    return f


def frame(schedule: PulseSchedule, t: float) -> AdiabaticFrame:
    """Assemble the full dressed frame (quasienergies, angles, U, F) at t."""
    sample = schedule.rabi(t)
    delta, _ = schedule.delta(t)
    theta = float(np.arctan2(sample.omega_p, sample.omega_c))
    phi = float(0.5 * np.arctan2(2.0 * sample.omega, delta))
    lam = quasienergies(float(sample.omega), float(delta))
    return AdiabaticFrame(
        t=float(t),
        lam=lam,
        theta=theta,
        phi=phi,
        U=transform(theta, phi),
        F=coupling_matrix(schedule, t),
        floor_engaged=bool(sample.floor_engaged),
    )


def frame_arrays(schedule: PulseSchedule, times: np.ndarray) -> dict:
    """Vectorized frame quantities on a time grid.

    Returns arrays theta (n,), phi (n,), lam (n, 3), U (n, 3, 3),
    omega_p/omega_c/delta (n,) and floor_engaged (n,) for trajectory
    assembly and table output.
    """
    times = np.asarray(times, dtype=float)
    sample = schedule.rabi(times)
    delta, _ = schedule.delta(times)
    theta = np.arctan2(sample.omega_p, sample.omega_c)
    phi = 0.5 * np.arctan2(2.0 * sample.omega, delta)
    root = np.hypot(delta, 2.0 * sample.omega)
    lam = np.stack(
        [np.zeros_like(root), 0.5 * (delta - root), 0.5 * (delta + root)],
        axis=-1)
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    zeros = np.zeros_like(st)
    u = np.empty(times.shape + (3, 3), dtype=complex)
    u[..., 0, 0], u[..., 0, 1], u[..., 0, 2] = ct, st * cp, st * sp
    u[..., 1, 0], u[..., 1, 1], u[..., 1, 2] = -st, ct * cp, ct * sp
    u[..., 2, 0], u[..., 2, 1], u[..., 2, 2] = zeros, -sp, cp
    return {
        "theta": theta,
        "phi": phi,
        "lam": lam,
        "U": u,
        "omega_p": np.asarray(sample.omega_p, dtype=float),
        "omega_c": np.asarray(sample.omega_c, dtype=float),
        "delta": np.asarray(delta, dtype=float),
        "floor_engaged": np.asarray(sample.floor_engaged, dtype=bool),
    }
