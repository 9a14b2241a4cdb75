"""Parameters of a driven two-level system with unequal diagonal dipoles.

Internal units have hbar = 1. Field and dipoles are scalar projections
on the polarisation axis, so only products ``E * d_ij`` ever appear.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

from .bessel import bessel_j

__all__ = [
    "SystemParams",
    "DriveParams",
    "DerivedParams",
    "KAPPA_SMALL",
    "DOMINANT_MIN",
    "SUPPRESSED_MAX",
    "DominanceWarning",
    "compute_kappa",
    "rabi_frequency",
    "signed_coupling",
    "derived",
    "resonance_dominance",
    "dominance_table",
]

#: below this |kappa| the Bessel ratio J_m(k)/k is replaced by its series limit
KAPPA_SMALL = 1e-8
#: target resonance counts as isolated when its dominance ratio is at least this
DOMINANT_MIN = 1.0
#: ... and every other harmonic n <= m + 5 stays at or below this
SUPPRESSED_MAX = 0.1


class DominanceWarning(UserWarning):
    """A resonance is not cleanly isolated from neighbouring harmonics."""


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class SystemParams:
    """Two-level system: transition frequency and dipole matrix elements.

    ``d_aa`` and ``d_bb`` are the permanent dipoles of the excited and
    ground state, ``d_ab`` the (real) transition dipole and ``tau`` an
    optional lifetime used only for the strong-coupling check.
    """

    omega0: float
    d_aa: float
    d_bb: float
    d_ab: float
    tau: Optional[float] = None

    def __post_init__(self):
        for name in ("omega0", "d_aa", "d_bb", "d_ab"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        if self.omega0 <= 0:
            raise ValueError("omega0 must be positive")
        if self.d_ab == 0:
            raise ValueError("d_ab must be nonzero")
        if self.tau is not None:
            tau = _finite("tau", self.tau)
            if tau <= 0:
                raise ValueError("tau must be positive")
            object.__setattr__(self, "tau", tau)

    @property
    def asymmetry(self) -> float:
        """``d_bb - d_aa``, the combination entering kappa."""
        return self.d_bb - self.d_aa


@dataclass(frozen=True)
class DriveParams:
    """Monochromatic drive ``E cos(omega t)``."""

    e_amp: float
    omega: float

    def __post_init__(self):
        object.__setattr__(self, "e_amp", _finite("e_amp", self.e_amp))
        object.__setattr__(self, "omega", _finite("omega", self.omega))
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.e_amp < 0:
            raise ValueError("e_amp must be non-negative")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega


@dataclass(frozen=True)
class DerivedParams:
    kappa: float
    m: int
    delta: float
    omega_r: float
    omega_gen: float


def compute_kappa(sys: SystemParams, drive: DriveParams) -> float:
    """Symmetry-violation parameter ``E (d_bb - d_aa) / omega``."""
    kappa = drive.e_amp * (sys.d_bb - sys.d_aa) / drive.omega
    if not math.isfinite(kappa):
        raise ValueError("kappa overflows; rescale the parameters")
    return kappa


def _bessel_ratio(m: int, kappa: float) -> float:
    """``J_m(kappa) / kappa`` with the removable point at 0 filled in."""
    if abs(kappa) < KAPPA_SMALL:
        # leading series term (k/2)^m / (m! k); exact 0 for m >= 2 at k = 0
        if m == 1:
            return 0.5 * (1.0 - kappa * kappa / 8.0)
        return (0.5 * kappa) ** m / (math.factorial(m) * kappa) if kappa else 0.0
    return bessel_j(m, kappa) / kappa


def _check_m(m) -> int:
    if int(m) != m or m < 1:
        raise ValueError(f"resonance index must be a positive integer, got {m!r}")
    return int(m)


def rabi_frequency(sys: SystemParams, drive: DriveParams, m: int) -> float:
    """Rabi frequency at the ``m``-th resonance, ``2 E d_ab m J_m(k) / k``.

    Changes sign across the zeros of ``J_m``; the population oscillates at
    ``|omega_r|``.
    """
    m = _check_m(m)
    kappa = compute_kappa(sys, drive)
    return 2.0 * drive.e_amp * sys.d_ab * m * _bessel_ratio(m, kappa)


def signed_coupling(sys: SystemParams, drive: DriveParams, m: int) -> float:
    """Rabi frequency carrying the phase of the resonant drive harmonic.

    The resonant Fourier component of ``cos(wt) exp(-i k sin wt)`` at
    ``exp(i m w t)`` is ``(-1)^(m-1) m J_m(k) / k``, so even resonances
    couple with the opposite sign. Populations only see ``|omega_r|``;
    amplitudes and dipole phases need the sign.
    """
    m = _check_m(m)
    return (-1) ** (m - 1) * rabi_frequency(sys, drive, m)


def derived(sys: SystemParams, drive: DriveParams, m: int) -> DerivedParams:
    m = _check_m(m)
    omega_r = rabi_frequency(sys, drive, m)
    delta = sys.omega0 - m * drive.omega
    return DerivedParams(
        kappa=compute_kappa(sys, drive),
        m=m,
        delta=delta,
        omega_r=omega_r,
        omega_gen=math.hypot(omega_r, delta),
    )


def resonance_dominance(sys: SystemParams, drive: DriveParams, m: int, n: int) -> float:
    """``|E d_ab n J_n(k) / (k (omega0 - n omega))|`` for harmonic ``n``.

    ``m`` is the resonance the caller is targeting; it does not enter the
    ratio itself. Returns ``inf`` on exact resonance ``n omega = omega0``.
    """
    _check_m(m)
    n = _check_m(n)
    detuning = sys.omega0 - n * drive.omega
    if detuning == 0.0:
        return math.inf
    kappa = compute_kappa(sys, drive)
    return abs(drive.e_amp * sys.d_ab * n * _bessel_ratio(n, kappa) / detuning)


def dominance_table(sys: SystemParams, drive: DriveParams, m: int, n_max: Optional[int] = None, warn: bool = True):
    """Dominance ratios for ``n = 1 .. n_max`` (default ``m + 5``).

    Returns ``(ratios, isolated)``. Threshold misses are warned about,
    never raised.
    """
    m = _check_m(m)
    n_max = m + 5 if n_max is None else n_max
    ratios = {n: resonance_dominance(sys, drive, m, n) for n in range(1, n_max + 1)}
    target_ok = ratios[m] >= DOMINANT_MIN
    others_ok = all(r <= SUPPRESSED_MAX for n, r in ratios.items() if n != m)
    if warn and not target_ok:
        warnings.warn(f"resonance m={m} is weak: dominance {ratios[m]:.3g} < {DOMINANT_MIN}", DominanceWarning, stacklevel=2)
    if warn and not others_ok:
        bad = [n for n, r in ratios.items() if n != m and r > SUPPRESSED_MAX]
        warnings.warn(f"harmonics {bad} not suppressed below {SUPPRESSED_MAX} near m={m}", DominanceWarning, stacklevel=2)
    return ratios, target_ok and others_ok
