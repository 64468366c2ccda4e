"""Time propagation of the density matrix in the bare and dressed bases.

The bare-basis master equation is

    drho/dt = -i [H(t), rho] + L(rho)

and its dressed-basis counterpart, with R = U^dag rho U and F = U^dag dU/dt,

    dR/dt = -i [H', R] + U^dag L(U R U^dag) U + [R, F],      H' = diag(lam).

Integration state is the real 9-vector (three populations plus real and
imaginary parts of the upper-triangle coherences), so Hermiticity is
structural; the trace is monitored, never renormalized.  Three propagation
routes are provided: an embedded adaptive Runge-Kutta pair (Dormand-Prince
5(4) or 8(5,3)), a fixed-step classical RK4, and a piecewise-constant
matrix-exponential oracle acting on the vectorized Liouvillian.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.linalg

from . import adiabatic
from .dissipation import Configuration, RateSet, dissipator, lindblad_ops
from .matops import dagger, ketbra
from .pulses import PulseSchedule

TRACE_TOL = 1e-8
HERMITICITY_TOL = 1e-10
POSITIVITY_TOL = 1e-8
PURITY_TOL = 1e-10

_RK_METHODS = {"rk45": "RK45", "dop853": "DOP853"}


class PropagationError(RuntimeError):
    """Numerical failure during propagation (step underflow, invariant
    breach beyond 10x tolerance, or solver abort)."""


@dataclass(frozen=True)
class PropagatorSettings:
    method: str = "adaptive_rk"       # adaptive_rk | fixed_rk4 | expm_oracle
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    max_step: float = np.inf
    n_steps: int = 4000               # fixed_rk4 grid resolution
    n_slices: int = 4000              # expm_oracle slice count
    rk_pair: str = "dop853"           # embedded pair: rk45 | dop853

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.method not in ("adaptive_rk", "fixed_rk4", "expm_oracle"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.rk_pair not in _RK_METHODS:
            raise ValueError(f"unknown rk_pair {self.rk_pair!r}")
        if self.n_steps < 1 or self.n_slices < 1:
            raise ValueError("step counts must be >= 1")


@dataclass(frozen=True)
class Trajectory:
    """Sampled density-matrix history with per-sample diagnostics."""

    times: np.ndarray            # (n,)
    rho: np.ndarray              # (n, 3, 3) bare basis
    R: np.ndarray                # (n, 3, 3) dressed basis
    purity: np.ndarray           # (n,)
    pops_bare: np.ndarray        # (n, 3)
    pops_adiabatic: np.ndarray   # (n, 3)
    theta: np.ndarray            # (n,)
    phi: np.ndarray              # (n,)
    lam: np.ndarray              # (n, 3)
    omega_p: np.ndarray          # (n,)
    omega_c: np.ndarray          # (n,)
    delta: np.ndarray            # (n,)
    floor_engaged: np.ndarray    # (n,) bool
    trace_err_max: float
    hermiticity_err_max: float
    min_eigenvalue: float


# --- real 9-vector representation -----------------------------------------

def pack(rho: np.ndarray) -> np.ndarray:
    """Hermitian 3x3 -> real 9-vector (populations, then Re/Im coherences)."""
    r = np.empty(9)
    r[0], r[1], r[2] = rho[0, 0].real, rho[1, 1].real, rho[2, 2].real
    r[3], r[4] = rho[0, 1].real, rho[0, 1].imag
    r[5], r[6] = rho[0, 2].real, rho[0, 2].imag
    r[7], r[8] = rho[1, 2].real, rho[1, 2].imag
    return r


def unpack(r: np.ndarray) -> np.ndarray:
    """Real 9-vector -> Hermitian 3x3."""
    rho = np.empty((3, 3), dtype=complex)
    rho[0, 0], rho[1, 1], rho[2, 2] = r[0], r[1], r[2]
    rho[0, 1] = r[3] + 1j * r[4]
    rho[0, 2] = r[5] + 1j * r[6]
    rho[1, 2] = r[7] + 1j * r[8]
    rho[1, 0] = np.conj(rho[0, 1])
    rho[2, 0] = np.conj(rho[0, 2])
    rho[2, 1] = np.conj(rho[1, 2])
    return rho


def unpack_many(rs: np.ndarray) -> np.ndarray:
    rs = np.asarray(rs)
    rho = np.empty(rs.shape[:-1] + (3, 3), dtype=complex)
    rho[..., 0, 0], rho[..., 1, 1], rho[..., 2, 2] = rs[..., 0], rs[..., 1], rs[..., 2]
    rho[..., 0, 1] = rs[..., 3] + 1j * rs[..., 4]
    rho[..., 0, 2] = rs[..., 5] + 1j * rs[..., 6]
    rho[..., 1, 2] = rs[..., 7] + 1j * rs[..., 8]
    rho[..., 1, 0] = np.conj(rho[..., 0, 1])
    rho[..., 2, 0] = np.conj(rho[..., 0, 2])
    rho[..., 2, 1] = np.conj(rho[..., 1, 2])
    return rho


def real_superop(apply_map) -> np.ndarray:
    """9x9 real matrix of a Hermiticity-preserving linear map on rho."""
    m = np.empty((9, 9))
    for k in range(9):
        e = np.zeros(9)
        e[k] = 1.0
        m[:, k] = pack(apply_map(unpack(e)))
    return m


# Commutator superoperators for the three Hamiltonian building blocks;
# the drive-dependent generator is their pointwise linear combination.
_BP = real_superop(lambda rho: -1j * ((ketbra(1, 3) + ketbra(3, 1)) @ rho
                                      - rho @ (ketbra(1, 3) + ketbra(3, 1))))
_BC = real_superop(lambda rho: -1j * ((ketbra(2, 3) + ketbra(3, 2)) @ rho
                                      - rho @ (ketbra(2, 3) + ketbra(3, 2))))
_BD = real_superop(lambda rho: -1j * (ketbra(3, 3) @ rho - rho @ ketbra(3, 3)))


def dissipator_superop(ops: list) -> np.ndarray:
    return real_superop(lambda rho: dissipator(ops, rho))


def liouvillian_matrix(h: np.ndarray, ops: list) -> np.ndarray:
    """Vectorized generator on the complex 9-dimensional space (row-major
    vec convention), Hamiltonian commutator plus Lindblad dissipator."""
    eye = np.eye(3)
    m = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for op in ops:
        anti = dagger(op) @ op
        m += np.kron(op, op.conj()) \
            - 0.5 * (np.kron(anti, eye) + np.kron(eye, anti.T))
    return m


# --- validation ------------------------------------------------------------

def _validate_initial(rho0: np.ndarray, name: str) -> np.ndarray:
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (3, 3):
        raise ValueError(f"{name} must be 3x3")
    if not np.all(np.isfinite(rho0)):
        raise ValueError(f"{name} has non-finite entries")
    if np.max(np.abs(rho0 - rho0.conj().T)) > HERMITICITY_TOL:
        raise ValueError(f"{name} must be Hermitian")
    if abs(np.trace(rho0).real - 1.0) > TRACE_TOL:
        raise ValueError(f"{name} must have unit trace")
    if np.linalg.eigvalsh(rho0).min() < -POSITIVITY_TOL:
        raise ValueError(f"{name} must be positive semidefinite")
    return rho0


def _assemble(times, rho, schedule) -> Trajectory:
    """Build a Trajectory from bare-basis samples, checking invariants."""
    frames = adiabatic.frame_arrays(schedule, times)
    u = frames["U"]
    ud = u.conj().swapaxes(-1, -2)
    big_r = ud @ rho @ u
    traces = np.einsum("nii->n", rho).real
    herm_err = np.max(np.abs(rho - rho.conj().swapaxes(-1, -2)))
    eigmin = float(np.linalg.eigvalsh(rho).min())
    purity = np.einsum("nij,nji->n", rho, rho).real
    trace_err = float(np.max(np.abs(traces - 1.0)))

    if trace_err > 10 * TRACE_TOL:
        raise PropagationError(f"trace drifted by {trace_err:.3e}")
    if herm_err > 10 * HERMITICITY_TOL:
        raise PropagationError(f"hermiticity violated by {herm_err:.3e}")
    if eigmin < -10 * POSITIVITY_TOL:
        raise PropagationError(f"negative population {eigmin:.3e}")
    if purity.max() > 1.0 + 10 * PURITY_TOL \
            or purity.min() < 1.0 / 3.0 - 10 * PURITY_TOL:
        raise PropagationError("purity left [1/3, 1]")

    return Trajectory(
        times=times,
        rho=rho,
        R=big_r,
        purity=purity,
        pops_bare=np.stack([rho[:, k, k].real for k in range(3)], axis=-1),
        pops_adiabatic=np.stack([big_r[:, k, k].real for k in range(3)],
                                axis=-1),
        theta=frames["theta"],
        phi=frames["phi"],
        lam=frames["lam"],
        omega_p=frames["omega_p"],
        omega_c=frames["omega_c"],
        delta=frames["delta"],
        floor_engaged=frames["floor_engaged"],
        trace_err_max=trace_err,
        hermiticity_err_max=float(herm_err),
        min_eigenvalue=eigmin,
    )


# --- integration backends --------------------------------------------------

def _solve_adaptive(rhs, r0, t_span, times, settings):
    sol = scipy.integrate.solve_ivp(
        rhs, t_span, r0, method=_RK_METHODS[settings.rk_pair],
        rtol=settings.rel_tol, atol=settings.abs_tol,
        max_step=settings.max_step, t_eval=times)
    if not sol.success:
        reached = sol.t[-1] if sol.t.size else t_span[0]
        raise PropagationError(
            f"adaptive integration failed near t={reached:.6g}: {sol.message}")
    return sol.y.T


def _solve_fixed_rk4(rhs, r0, horizon, times, n_steps):
    # integrate on a fine uniform grid and emit at the grid points nearest
    # the requested times (identical when samples - 1 divides n_steps)
    if n_steps < len(times) - 1:
        raise ValueError("fixed_rk4 needs n_steps >= samples - 1")
    grid = np.linspace(0.0, horizon, n_steps + 1)
    idx = np.rint(times / horizon * n_steps).astype(int)
    h = grid[1] - grid[0]
    out = np.empty((len(times), 9))
    r = np.array(r0)
    pos = {k: i for i, k in enumerate(idx)}
    if 0 in pos:
        out[pos[0]] = r
    for k in range(n_steps):
        t = grid[k]
        k1 = rhs(t, r)
        k2 = rhs(t + 0.5 * h, r + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, r + 0.5 * h * k2)
        k4 = rhs(t + h, r + h * k3)
        r = r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if k + 1 in pos:
            out[pos[k + 1]] = r
    return grid[idx], out


def _sample_times(horizon, samples):
    if samples < 2:
        raise ValueError("need at least 2 output samples")
    return np.linspace(0.0, horizon, samples)


# --- public propagators ----------------------------------------------------

def propagate_bare(config: Configuration, rates: RateSet,
                   schedule: PulseSchedule, rho0: np.ndarray,
                   settings: PropagatorSettings = None, samples: int = 1000,
                   xi_appendix_verbatim: bool = False) -> Trajectory:
    """Propagate the bare-basis master equation from rho0 over the horizon.

    Returns a Trajectory sampled on `samples` uniform times, carrying both
    the bare and dressed density matrices plus frame diagnostics.
    """
    settings = settings or PropagatorSettings()
    rho0 = _validate_initial(rho0, "rho0")
    if settings.method == "expm_oracle":
        return propagate_expm_oracle(config, rates, schedule, rho0,
                                     settings.n_slices, samples=samples,
                                     xi_appendix_verbatim=xi_appendix_verbatim)
    ops = lindblad_ops(config, rates, xi_appendix_verbatim)
    d9 = dissipator_superop(ops)
    pump_sample = schedule.pump.sample
    stokes_sample = schedule.stokes.sample
    delta_scalar = schedule.delta_scalar

    if schedule.is_static:
        gen = (d9 + pump_sample(0.0)[0] * _BP + stokes_sample(0.0)[0] * _BC
               + delta_scalar(0.0)[0] * _BD)

        def rhs(t, r):
            return gen @ r
    else:
        def rhs(t, r):
            op = pump_sample(t)[0]
            oc = stokes_sample(t)[0]
            dv = delta_scalar(t)[0]
            return d9 @ r + op * (_BP @ r) + oc * (_BC @ r) + dv * (_BD @ r)

    times = _sample_times(schedule.horizon, samples)
    if settings.method == "adaptive_rk":
        ys = _solve_adaptive(rhs, pack(rho0), (0.0, schedule.horizon), times,
                             settings)
    else:
        times, ys = _solve_fixed_rk4(rhs, pack(rho0), schedule.horizon,
                                     times, settings.n_steps)
    return _assemble(times, unpack_many(ys), schedule)


def propagate_adiabatic(config: Configuration, rates: RateSet,
                        schedule: PulseSchedule, R0: np.ndarray,
                        settings: PropagatorSettings = None,
                        samples: int = 1000,
                        xi_appendix_verbatim: bool = False) -> Trajectory:
    """Propagate the dressed-basis master equation from R0 over the horizon.

    The frame (U, F, quasienergies) is evaluated analytically at every
    right-hand-side call; the dissipator is applied by transforming to the
    bare basis and back, which keeps the two propagators consistent by
    construction.
    """
    settings = settings or PropagatorSettings()
    R0 = _validate_initial(R0, "R0")
    if settings.method == "expm_oracle":
        raise ValueError("the expm oracle propagates the bare basis; "
                         "use propagate_expm_oracle")
    ops = lindblad_ops(config, rates, xi_appendix_verbatim)
    d9 = dissipator_superop(ops)
    dissipative = len(ops) > 0
    rabi_scalar = schedule.rabi_scalar
    delta_scalar = schedule.delta_scalar

    if schedule.is_static:
        # constant frame: F = 0, U and the quasienergies are fixed, so the
        # whole generator collapses to one constant real 9x9 matrix
        fr = adiabatic.frame(schedule, 0.0)
        u = fr.U.real
        lam = fr.lam

        def apply_static(big_r):
            comm = -1j * (lam[:, None] - lam[None, :]) * big_r
            if not dissipative:
                return comm
            rho = u @ big_r @ u.T
            return comm + u.T @ unpack(d9 @ pack(rho)) @ u

        gen = real_superop(apply_static)

        def rhs(t, r):
            return gen @ r
    else:
        def rhs(t, r):
            op, oc, dop, doc, omega, domega, _ = rabi_scalar(t)
            dv, ddv = delta_scalar(t)
            theta = math.atan2(op, oc)
            phi = 0.5 * math.atan2(2.0 * omega, dv)
            root = math.hypot(dv, 2.0 * omega)
            lam2, lam3 = 0.5 * (dv - root), 0.5 * (dv + root)
            theta_dot = (dop * oc - op * doc) / (omega * omega)
            phi_dot = (domega * dv - omega * ddv) / (dv * dv
                                                     + 4.0 * omega * omega)

            st, ct = math.sin(theta), math.cos(theta)
            sp, cp = math.sin(phi), math.cos(phi)
            big_r = unpack(r)

            # -i [diag(lam), R]
            out = np.empty((3, 3), dtype=complex)
            out[0, 0] = out[1, 1] = out[2, 2] = 0.0
            out[0, 1] = 1j * lam2 * big_r[0, 1]
            out[0, 2] = 1j * lam3 * big_r[0, 2]
            out[1, 2] = 1j * (lam3 - lam2) * big_r[1, 2]
            out[1, 0] = np.conj(out[0, 1])
            out[2, 0] = np.conj(out[0, 2])
            out[2, 1] = np.conj(out[1, 2])

            f = np.array([[0.0, theta_dot * cp, theta_dot * sp],
                          [-theta_dot * cp, 0.0, phi_dot],
                          [-theta_dot * sp, -phi_dot, 0.0]])
            out += big_r @ f - f @ big_r

            if dissipative:
                u = np.array([[ct, st * cp, st * sp],
                              [-st, ct * cp, ct * sp],
                              [0.0, -sp, cp]])
                rho = u @ big_r @ u.T
                out += u.T @ unpack(d9 @ pack(rho)) @ u
            return pack(out)

    times = _sample_times(schedule.horizon, samples)
    if settings.method == "adaptive_rk":
        ys = _solve_adaptive(rhs, pack(R0), (0.0, schedule.horizon), times,
                             settings)
    else:
        times, ys = _solve_fixed_rk4(rhs, pack(R0), schedule.horizon, times,
                                     settings.n_steps)
    big_r = unpack_many(ys)
    frames = adiabatic.frame_arrays(schedule, times)
    u = frames["U"]
    rho = u @ big_r @ u.conj().swapaxes(-1, -2)
    return _assemble(times, rho, schedule)


def propagate_expm_oracle(config: Configuration, rates: RateSet,
                          schedule: PulseSchedule, rho0: np.ndarray,
                          n_slices: int, samples: int = 1000,
                          xi_appendix_verbatim: bool = False) -> Trajectory:
    """Piecewise-constant matrix-exponential propagation (verification
    oracle): the vectorized Liouvillian is sampled at each slice midpoint
    and exponentiated exactly, giving second-order accuracy in slice width.
    """
    if n_slices < 1:
        raise ValueError("n_slices must be >= 1")
    if samples > n_slices + 1:
        raise ValueError("cannot emit more samples than slice boundaries")
    rho0 = _validate_initial(rho0, "rho0")
    ops = lindblad_ops(config, rates, xi_appendix_verbatim)
    boundaries = np.linspace(0.0, schedule.horizon, n_slices + 1)
    keep = np.rint(np.linspace(0, n_slices, samples)).astype(int)
    pos = {k: i for i, k in enumerate(keep)}
    h = boundaries[1] - boundaries[0] if n_slices > 0 else schedule.horizon

    vec = rho0.reshape(9).astype(complex)
    out = np.empty((samples, 9), dtype=complex)
    if 0 in pos:
        out[pos[0]] = vec
    for k in range(n_slices):
        mid = 0.5 * (boundaries[k] + boundaries[k + 1])
        gen = liouvillian_matrix(adiabatic.hamiltonian(schedule, mid), ops)
        vec = scipy.linalg.expm(gen * h) @ vec
        if k + 1 in pos:
            out[pos[k + 1]] = vec
    rho = out.reshape(samples, 3, 3)
    # enforce exact Hermitian storage; the generator preserves it to rounding
    rho = 0.5 * (rho + rho.conj().swapaxes(-1, -2))
    return _assemble(boundaries[keep], rho, schedule)


def closed_system_solution(frame: adiabatic.AdiabaticFrame, R0: np.ndarray,
                           t) -> np.ndarray:
    """Dressed-basis free evolution R_ij(t) = R_ij(0) exp(-i(lam_i-lam_j)t)
    for a static frame without dissipation."""
    lam = np.asarray(frame.lam)
    diff = lam[:, None] - lam[None, :]
    t = np.asarray(t, dtype=float)
    phase = np.exp(-1j * diff * t[..., None, None]) if t.ndim else \
        np.exp(-1j * diff * t)
    return phase * np.asarray(R0, dtype=complex)
