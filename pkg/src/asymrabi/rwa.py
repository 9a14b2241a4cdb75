"""Rotating-wave solution near the m-th resonance ``omega0 ~ m omega``.

Phase convention: ``exp(i k sin wt) = sum_n J_n(k) exp(i n w t)``. With it
the resonant coupling carries a factor ``(-1)^(m-1)`` and the dipole line
weights are ``J_{n-m}(kappa)``; see :func:`asymrabi.model.signed_coupling`.
Magnitudes of all spectral lines are convention independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bessel import bessel_row
from .model import (
    DerivedParams,
    DriveParams,
    SystemParams,
    derived,
    dominance_table,
    rabi_frequency,
    signed_coupling,
)
from .dynamics import InitialState

__all__ = [
    "RwaSolution",
    "ValidityReport",
    "rwa_amplitudes",
    "dipole_rwa",
    "dipole_rwa_dc",
    "dipole_lines",
    "dipole_resonant_weak",
    "rwa_validity",
]


@dataclass(frozen=True)
class RwaSolution:
    sys: SystemParams
    drive: DriveParams
    m: int = 1
    init: InitialState = field(default_factory=InitialState.excited)

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("m must be a positive integer")

    @property
    def derived(self) -> DerivedParams:
        return derived(self.sys, self.drive, self.m)

    @property
    def coupling(self) -> float:
        return signed_coupling(self.sys, self.drive, self.m)


def rwa_amplitudes(sol: RwaSolution, t):
    """``(C_a(t), C_b(t))`` in the original frame; ``t`` may be an array."""
    t = np.asarray(t, dtype=float)
    sys, drive, m = sol.sys, sol.drive, sol.m
    p = sol.derived
    g = sol.coupling
    ca0, cb0 = sol.init.c_a0, sol.init.c_b0
    if p.omega_gen == 0.0:
        cos_, sin_, det, rab = np.ones_like(t), np.zeros_like(t), 0.0, 0.0
    else:
        half = 0.5 * p.omega_gen * t
        cos_, sin_ = np.cos(half), np.sin(half)
        det, rab = p.delta / p.omega_gen, g / p.omega_gen
    env_a = ca0 * (cos_ - 1j * det * sin_) + 1j * rab * cb0 * sin_
    env_b = cb0 * (cos_ + 1j * det * sin_) + 1j * rab * ca0 * sin_
    s = np.sin(drive.omega * t) * drive.e_amp / drive.omega
    spin = 0.5 * m * drive.omega * t
    c_a = env_a * np.exp(1j * (-spin + sys.d_aa * s))
    c_b = env_b * np.exp(1j * (spin + sys.d_bb * s))
    return c_a, c_b


def _require_excited(sol):
    if sol.init != InitialState.excited():
        raise ValueError("the closed-form dipole expansion assumes C_a(0) = 1, C_b(0) = 0")


_MEMBER = {-1: "lower", 0: "center", 1: "upper"}


def dipole_lines(sol: RwaSolution, n_range: Optional[int] = None):
    """Spectral lines of the RWA dipole as ``(frequency, cosine amplitude, label)``.

    Labels are ``"singlet"`` or ``(n, member)`` with member one of
    ``lower``/``center``/``upper``. The ``n = 0`` sidebands coincide with the
    singlet and are merged into it; DC is dropped.
    """
    _require_excited(sol)
    n_range = sol.m + 3 if n_range is None else n_range
    lines = []
    for (n, s), z in _phasors(sol, n_range).items():
        if n == 0 and s == 0:
            continue
        label = "singlet" if n == 0 else (n, _MEMBER[s])
        lines.append((_line_freq(sol, n, s), 2.0 * abs(z), label))
    lines.sort(key=lambda x: x[0])
    return lines


def _line_freq(sol, n, s):
    return n * sol.drive.omega + s * sol.derived.omega_gen


def _phasors(sol, n_range):
    """``{(n, s): z}`` with ``d(t) = sum z exp(i (n w + s W) t) + c.c.``, ``n >= 0``."""
    sys, m = sol.sys, sol.m
    p = sol.derived
    big = p.omega_gen
    out = {}

    def add(n, s, z):
        if n < 0 or (n == 0 and s < 0):
            n, s, z = -n, -s, np.conj(z)
        out[(n, s)] = out.get((n, s), 0.0) + z

    if big == 0.0:
        return out
    add(0, 1, 0.25 * (sys.d_aa - sys.d_bb) * (p.omega_r / big) ** 2)
    det = p.delta / big
    pref = -sys.d_ab * sol.coupling / (2.0 * big)
    row = bessel_row(n_range, p.kappa)
    for n in range(m - n_range, m + n_range + 1):
        jw = row[n - m]
        add(n, 0, pref * jw * det)
        add(n, -1, pref * jw * 0.5 * (1 - det))
        add(n, 1, -pref * jw * 0.5 * (1 + det))
    return out


def dipole_rwa(sol: RwaSolution, t, n_range: Optional[int] = None):
    """Real dipole ``d(t)`` near the m-th resonance, time-independent part removed.

    Singlet ``(d_aa - d_bb) (Omega_R^2 / 4 Omega^2) e^{i Omega t}`` plus the
    triplets at ``n omega, n omega +- Omega`` weighted by ``J_{n-m}(kappa)``
    for ``|n - m| <= n_range`` (default ``m + 3``), plus complex conjugate.
    """
    _require_excited(sol)
    t = np.asarray(t, dtype=float)
    m = sol.m
    n_range = m + 3 if n_range is None else n_range
    if n_range < 0:
        raise ValueError("n_range must be non-negative")
    d = np.zeros_like(t)
    for (n, s), z in _phasors(sol, n_range).items():
        if n == 0 and s == 0:
            continue
        d += 2.0 * np.real(z * np.exp(1j * _line_freq(sol, n, s) * t))
    return d


def dipole_rwa_dc(sol: RwaSolution, n_range: Optional[int] = None) -> float:
    """The time-independent dipole left out of :func:`dipole_rwa`."""
    _require_excited(sol)
    p = sol.derived
    sys = sol.sys
    if p.omega_gen == 0.0:
        return sys.d_aa
    n_range = sol.m + 3 if n_range is None else n_range
    dc = sys.d_aa - 0.5 * (sys.d_aa - sys.d_bb) * (p.omega_r / p.omega_gen) ** 2
    if sol.m <= n_range:
        jw = bessel_row(sol.m, p.kappa)[-sol.m]
        dc += -sys.d_ab * sol.coupling / p.omega_gen * jw * p.delta / p.omega_gen
    return dc


def dipole_resonant_weak(sys: SystemParams, drive: DriveParams, t, omega_r: Optional[float] = None):
    """Resonant, weak-asymmetry dipole ``(d_aa-d_bb)/2 cos(W t) - d_ab sin(w0 t) sin(W t)``.

    ``W`` defaults to the conventional Rabi frequency ``E d_ab``.
    """
    t = np.asarray(t, dtype=float)
    w = drive.e_amp * sys.d_ab if omega_r is None else omega_r
    return 0.5 * (sys.d_aa - sys.d_bb) * np.cos(w * t) - sys.d_ab * np.sin(sys.omega0 * t) * np.sin(w * t)


@dataclass
class ValidityReport:
    omega_r: float
    omega_r_tau: Optional[float]
    strong_coupling: str
    rwa_ratio: float
    rwa_hierarchy: str
    suppression: float
    dominance: dict
    isolated: bool
    messages: list

    @property
    def ok(self) -> bool:
        return "warn" not in (self.strong_coupling, self.rwa_hierarchy) and self.isolated

    def as_dict(self) -> dict:
        return {
            "omega_r": self.omega_r,
            "omega_r_tau": self.omega_r_tau,
            "strong_coupling": self.strong_coupling,
            "rwa_ratio": self.rwa_ratio,
            "rwa_hierarchy": self.rwa_hierarchy,
            "suppression": self.suppression,
            "dominance": {str(k): v for k, v in self.dominance.items()},
            "isolated": self.isolated,
            "messages": list(self.messages),
        }


#: Omega_R tau at or above this counts as strong coupling
STRONG_COUPLING_MIN = 10.0
#: |Omega_R| / omega at or below this satisfies the RWA hierarchy
RWA_RATIO_MAX = 0.1
#: |Omega_R| / |E d_ab| below this marks a resonance sitting near a Bessel zero
SUPPRESSION_MIN = 0.05


def rwa_validity(sys: SystemParams, drive: DriveParams, m: int = 1) -> ValidityReport:
    """Advisory checks on the assumptions behind the closed-form solution."""
    omega_r = rabi_frequency(sys, drive, m)
    messages = []
    if sys.tau is None:
        omega_r_tau, strong = None, "not evaluated"
    else:
        omega_r_tau = abs(omega_r) * sys.tau
        strong = "pass" if omega_r_tau >= STRONG_COUPLING_MIN else "warn"
        if strong == "warn":
            messages.append(f"Omega_R tau = {omega_r_tau:.3g}: linewidth not negligible")
    ratio = abs(omega_r) / drive.omega
    hierarchy = "pass" if ratio <= RWA_RATIO_MAX else "warn"
    if hierarchy == "warn":
        messages.append(f"Omega_R / omega = {ratio:.3g}: counter-rotating terms not negligible")

    conventional = abs(drive.e_amp * sys.d_ab)
    suppression = abs(omega_r) / conventional if conventional else math.nan
    ratios, isolated = dominance_table(sys, drive, m, warn=False)
    if conventional and suppression < SUPPRESSION_MIN:
        isolated = False
        messages.append(f"resonance m={m} suppressed: |Omega_R| = {suppression:.3g} E d_ab (near a zero of J_{m})")
        rivals = {n: abs(rabi_frequency(sys, drive, n)) for n in ratios if n != m}
        stronger = sorted(n for n, w in rivals.items() if w > abs(omega_r))
        if stronger:
            messages.append(f"harmonics {stronger} couple more strongly than m={m}")
    elif not isolated:
        messages.append(f"resonance m={m} not isolated: dominance ratios {ratios}")
    return ValidityReport(omega_r, omega_r_tau, strong, ratio, hierarchy, suppression, ratios, isolated, messages)
