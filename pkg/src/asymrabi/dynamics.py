"""Time-domain integration of the driven two-level amplitude equations.

Two frames are supported:

* ``original`` -- amplitudes ``C_a, C_b`` of the Schroedinger equation with
  ``H(t) = omega0 sz / 2 - E cos(wt) d``.
* ``transformed`` -- ``c_j = C_j exp(+-i omega0 t / 2 - i phi_j)`` with
  ``phi_j = E d_jj sin(wt) / w``. The diagonal dipoles drop out and the
  drive enters through ``E_eff(t) = E exp(-i kappa sin wt)``, expanded in
  a truncated Bessel series.

Because ``H`` is exactly periodic, long records can also be generated from
the one-period propagator (:func:`integrate_floquet`); this is equivalent
to direct integration up to the accumulated one-period error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .bessel import bessel_row
from .model import DriveParams, SystemParams, compute_kappa, rabi_frequency

__all__ = [
    "InitialState",
    "SamplingPlan",
    "SolverOptions",
    "AmplitudeTrajectory",
    "IntegrationError",
    "default_n_trunc",
    "propagate",
    "integrate_exact",
    "integrate_transformed",
    "to_original_frame",
    "period_propagators",
    "integrate_floquet",
    "population",
    "stroboscopic",
    "oscillation_frequency",
    "floquet_rabi",
]


class IntegrationError(RuntimeError):
    """The ODE solver failed; ``time`` is where it stopped."""

    def __init__(self, message, time=None):
        super().__init__(message if time is None else f"{message} (t = {time:.6g})")
        self.time = time


@dataclass(frozen=True)
class InitialState:
    c_a0: complex
    c_b0: complex

    def __post_init__(self):
        c_a0, c_b0 = complex(self.c_a0), complex(self.c_b0)
        if not (np.isfinite(c_a0) and np.isfinite(c_b0)):
            raise ValueError("initial amplitudes must be finite")
        if abs(abs(c_a0) ** 2 + abs(c_b0) ** 2 - 1.0) > 1e-12:
            raise ValueError("initial state must be normalised")
        object.__setattr__(self, "c_a0", c_a0)
        object.__setattr__(self, "c_b0", c_b0)

    @classmethod
    def excited(cls):
        return cls(1.0, 0.0)

    @classmethod
    def ground(cls):
        return cls(0.0, 1.0)

    @classmethod
    def superposition(cls, phase=0.0):
        s = 1.0 / math.sqrt(2.0)
        return cls(s, s * np.exp(1j * phase))

    def vector(self) -> np.ndarray:
        return np.array([self.c_a0, self.c_b0], dtype=complex)


@dataclass(frozen=True)
class SamplingPlan:
    """Uniform output grid commensurate with the drive period.

    The step is ``T / s`` with ``s`` the smallest integer giving at least
    ``per_drive_period`` samples per drive period and ``per_rabi_period``
    per Rabi period.
    """

    per_drive_period: int = 32
    per_rabi_period: int = 256
    max_samples: int = 50_000_000

    def samples_per_period(self, drive: DriveParams, omega_r: float = 0.0) -> int:
        s = self.per_drive_period
        if omega_r:
            s = max(s, math.ceil(self.per_rabi_period * abs(omega_r) / drive.omega))
        return int(s)

    def grid(self, drive: DriveParams, t_end: float, omega_r: float = 0.0) -> np.ndarray:
        dt = drive.period / self.samples_per_period(drive, omega_r)
        n = t_end / dt * (1 + 1e-12)
        if not n < self.max_samples:
            raise ValueError(f"grid would need {n:.3g} samples (limit {self.max_samples})")
        return np.arange(int(n) + 1) * dt


@dataclass(frozen=True)
class SolverOptions:
    rtol: float = 1e-10
    atol: float = 1e-12
    method: str = "DOP853"

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("tolerances must be positive")
        if self.method not in ("RK45", "DOP853"):
            raise ValueError(f"unsupported method {self.method!r}")


@dataclass
class AmplitudeTrajectory:
    times: np.ndarray
    c_a: np.ndarray
    c_b: np.ndarray
    frame: str = "original"
    norm_drift: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.frame not in ("original", "transformed"):
            raise ValueError(f"unknown frame {self.frame!r}")
        self.norm_drift = float(np.max(np.abs(np.abs(self.c_a) ** 2 + np.abs(self.c_b) ** 2 - 1.0)))

    def __len__(self):
        return len(self.times)


#: tightest relative tolerance used for one-period propagators
FLOQUET_RTOL_FLOOR = 3e-14


def default_n_trunc(kappa: float) -> int:
    return int(math.ceil(abs(kappa))) + 8


def _exact_rhs(sys: SystemParams, drive: DriveParams):
    half = 0.5 * sys.omega0
    e, w = drive.e_amp, drive.omega
    e_aa, e_bb, e_ab = e * sys.d_aa, e * sys.d_bb, e * sys.d_ab

    def rhs(t, y):
        y = y.reshape(2, -1)
        c = math.cos(w * t)
        out = np.empty_like(y)
        out[0] = (-1j * (half - e_aa * c)) * y[0] + (1j * e_ab * c) * y[1]
        out[1] = (1j * (half + e_bb * c)) * y[1] + (1j * e_ab * c) * y[0]
        return out.ravel()

    return rhs


def _transformed_rhs(sys: SystemParams, drive: DriveParams, n_trunc: int):
    kappa = compute_kappa(sys, drive)
    row = bessel_row(n_trunc, kappa).values
    orders = np.arange(-n_trunc, n_trunc + 1)
    weights = np.concatenate([row[:0:-1] * (-1.0) ** np.arange(n_trunc, 0, -1), row])
    w, w0 = drive.omega, sys.omega0
    e_ab = drive.e_amp * sys.d_ab

    def rhs(t, y):
        y = y.reshape(2, -1)
        # E_eff / E = sum_n J_n(kappa) exp(-i n w t)
        eff = np.dot(weights, np.exp(-1j * w * t * orders))
        g = e_ab * math.cos(w * t)
        ph = np.exp(1j * w0 * t)
        out = np.empty_like(y)
        out[0] = (1j * g * np.conj(eff) * ph) * y[1]
        out[1] = (1j * g * eff / ph) * y[0]
        return out.ravel()

    return rhs


def propagate(rhs, y0, t0, t1, t_eval=None, options: Optional[SolverOptions] = None):
    """Run ``solve_ivp`` on ``rhs`` and return the result, raising on failure."""
    options = options or SolverOptions()
    y0 = np.asarray(y0, dtype=complex).ravel()
    sol = solve_ivp(
        rhs, (t0, t1), y0, method=options.method, t_eval=t_eval,
        rtol=options.rtol, atol=options.atol,
    )
    if sol.status != 0:
        raise IntegrationError(sol.message, sol.t[-1] if sol.t.size else t0)
    if not np.all(np.isfinite(sol.y)):
        bad = np.argmax(~np.all(np.isfinite(sol.y), axis=0))
        raise IntegrationError("nonfinite state", sol.t[bad])
    return sol


def _grid_for(sys, drive, t_end, sampling):
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    sampling = sampling or SamplingPlan()
    omega_r = max((abs(rabi_frequency(sys, drive, m)) for m in (1, 2, 3)), default=0.0)
    return sampling.grid(drive, t_end, omega_r)


def integrate_exact(sys: SystemParams, drive: DriveParams, init: InitialState, t_end: float,
                    sampling: Optional[SamplingPlan] = None, options: Optional[SolverOptions] = None,
                    times: Optional[np.ndarray] = None) -> AmplitudeTrajectory:
    """Integrate the original-frame amplitude equations on a uniform grid."""
    if times is None:
        times = _grid_for(sys, drive, t_end, sampling)
    sol = propagate(_exact_rhs(sys, drive), init.vector(), 0.0, times[-1], times, options)
    return AmplitudeTrajectory(times, sol.y[0], sol.y[1], "original",
                               meta={"sys": sys, "drive": drive, "method": "direct"})


def integrate_transformed(sys: SystemParams, drive: DriveParams, init: InitialState, t_end: float,
                          sampling: Optional[SamplingPlan] = None, options: Optional[SolverOptions] = None,
                          n_trunc: Optional[int] = None, times: Optional[np.ndarray] = None) -> AmplitudeTrajectory:
    """Integrate the gauge-transformed equations driven by the Bessel-expanded field."""
    if n_trunc is None:
        n_trunc = default_n_trunc(compute_kappa(sys, drive))
    if times is None:
        times = _grid_for(sys, drive, t_end, sampling)
    sol = propagate(_transformed_rhs(sys, drive, n_trunc), init.vector(), 0.0, times[-1], times, options)
    return AmplitudeTrajectory(times, sol.y[0], sol.y[1], "transformed",
                               meta={"sys": sys, "drive": drive, "n_trunc": n_trunc, "method": "direct"})


def to_original_frame(traj: AmplitudeTrajectory) -> AmplitudeTrajectory:
    """Undo the gauge phases of a transformed-frame trajectory."""
    if traj.frame == "original":
        return traj
    try:
        sys, drive = traj.meta["sys"], traj.meta["drive"]
    except KeyError as exc:
        raise ValueError("transformed trajectory lacks sys/drive metadata to restore phases") from exc
    t = traj.times
    s = np.sin(drive.omega * t) * drive.e_amp / drive.omega
    half = 0.5 * sys.omega0 * t
    c_a = traj.c_a * np.exp(1j * (-half + sys.d_aa * s))
    c_b = traj.c_b * np.exp(1j * (half + sys.d_bb * s))
    return AmplitudeTrajectory(t, c_a, c_b, "original", meta=dict(traj.meta))


def period_propagators(sys: SystemParams, drive: DriveParams, samples_per_period: int,
                       options: Optional[SolverOptions] = None) -> np.ndarray:
    """Propagators ``U(j T / s)`` for ``j = 0 .. s``; shape ``(s + 1, 2, 2)``."""
    times = np.arange(samples_per_period + 1) * (drive.period / samples_per_period)
    times[-1] = drive.period
    sol = propagate(_exact_rhs(sys, drive), np.eye(2, dtype=complex), 0.0, drive.period, times, options)
    return sol.y.T.reshape(-1, 2, 2)


def integrate_floquet(sys: SystemParams, drive: DriveParams, init: InitialState, t_end: float,
                      sampling: Optional[SamplingPlan] = None, options: Optional[SolverOptions] = None) -> AmplitudeTrajectory:
    """Original-frame trajectory built from the one-period propagator.

    ``psi(k T + t_j) = U(t_j) U(T)^k psi(0)``; powers of ``U(T)`` use its
    eigendecomposition. Suited to records of thousands of drive periods.

    The one-period error compounds once per period, so the period
    propagator is computed at ``rtol / n_periods`` (floored at
    ``FLOQUET_RTOL_FLOOR``) to keep the whole record within ``rtol``.
    """
    options = options or SolverOptions()
    times = _grid_for(sys, drive, t_end, sampling)
    s = int(round(drive.period / (times[1] - times[0])))
    n_periods = max(1.0, times[-1] / drive.period)
    scale = max(FLOQUET_RTOL_FLOOR / options.rtol, 1.0 / n_periods)
    scale = min(scale, 1.0)
    tight = SolverOptions(options.rtol * scale, options.atol * scale, options.method)
    props = period_propagators(sys, drive, s, tight)
    u_t = props[-1]
    lam, vec = np.linalg.eig(u_t)
    coeff = np.linalg.solve(vec, init.vector())
    idx = np.arange(len(times))
    k, j = divmod(idx, s)
    # state at k T, for each sample
    base = (vec[None, :, :] * (lam[None, :] ** k[:, None])[:, None, :]) @ coeff
    psi = np.einsum("nij,nj->ni", props[j], base)
    return AmplitudeTrajectory(times, psi[:, 0], psi[:, 1], "original",
                               meta={"sys": sys, "drive": drive, "method": "floquet"})


def population(traj: AmplitudeTrajectory):
    """``(P_a, P_b)`` arrays; frame-independent."""
    return np.abs(traj.c_a) ** 2, np.abs(traj.c_b) ** 2


def stroboscopic(times: np.ndarray, values: np.ndarray, period: float):
    """Samples taken at integer multiples of ``period``."""
    dt = times[1] - times[0]
    step = int(round(period / dt))
    if abs(step * dt - period) > 1e-9 * period:
        raise ValueError("grid is not commensurate with the period")
    return times[::step], values[::step]


def oscillation_frequency(times: np.ndarray, signal: np.ndarray, period: Optional[float] = None) -> float:
    """Angular frequency of a slow oscillation from mean crossings.

    With ``period`` given the signal is first sampled stroboscopically,
    which removes micromotion at harmonics of the drive. Crossing times are
    linearly interpolated; the frequency follows from the span between
    the first and last crossing. Returns ``nan`` with fewer than two
    crossings.
    """
    if period is not None:
        times, signal = stroboscopic(times, signal, period)
    x = signal - 0.5 * (signal.max() + signal.min())
    sgn = np.signbit(x)
    idx = np.nonzero(sgn[1:] != sgn[:-1])[0]
    if len(idx) < 2:
        return math.nan
    tc = times[idx] - x[idx] * (times[idx + 1] - times[idx]) / (x[idx + 1] - x[idx])
    return math.pi * (len(tc) - 1) / (tc[-1] - tc[0])


def floquet_rabi(sys: SystemParams, drive: DriveParams, options: Optional[SolverOptions] = None):
    """Stroboscopic oscillation frequency and effective Rabi frequency.

    From the eigenphases of ``U(T)``: the excited-state population sampled
    at multiples of ``T`` oscillates at ``|arg(l1 / l2)| / T`` with depth
    ``4 |<a|f1>|^2 |<a|f2>|^2``. The effective Rabi frequency is the
    oscillation frequency times the square root of that depth. Valid
    while the oscillation stays slower than half the drive frequency.
    """
    u_t = period_propagators(sys, drive, 1, options)[-1]
    lam, vec = np.linalg.eig(u_t)
    freq = abs(np.angle(lam[0] / lam[1])) / drive.period
    vec = vec / np.linalg.norm(vec, axis=0)
    depth = 4 * abs(vec[0, 0]) ** 2 * abs(vec[0, 1]) ** 2
    return freq, freq * math.sqrt(min(depth, 1.0))
