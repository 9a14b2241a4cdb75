"""Radiated-dipole series, periodograms and line classification.

Frequencies throughout are angular. Amplitudes are cosine amplitudes: a
component ``A cos(f t)`` is reported with amplitude ``A``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.signal import find_peaks, get_window

from .dynamics import AmplitudeTrajectory, to_original_frame
from .model import DerivedParams

__all__ = [
    "SPEED_OF_LIGHT",
    "DipoleSeries",
    "Peak",
    "SpectrumReport",
    "SeriesTooShort",
    "dipole_from_trajectory",
    "dipole_series",
    "periodogram",
    "classify_peaks",
    "predicted_lines",
    "radiated_intensity",
    "singlet_power",
]

#: cm / s
SPEED_OF_LIGHT = 2.99792458e10

NOISE_FLOOR = 1e-6
MIN_RABI_PERIODS = 16


class SeriesTooShort(ValueError):
    pass


@dataclass
class DipoleSeries:
    times: np.ndarray
    values: np.ndarray
    source: str = "exact"
    dc_offset: float = 0.0

    def __post_init__(self):
        if len(self.times) != len(self.values) or len(self.times) < 2:
            raise ValueError("times and values must have equal length >= 2")
        steps = np.diff(self.times)
        if np.ptp(steps) > 1e-9 * steps.mean():
            raise ValueError("dipole series needs a uniform time grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("dipole series contains nonfinite values")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


def dipole_series(times, values, source="exact") -> DipoleSeries:
    """Wrap raw samples, recording and removing their mean."""
    values = np.asarray(values, dtype=float)
    dc = float(values.mean())
    return DipoleSeries(np.asarray(times, dtype=float), values - dc, source, dc)


def dipole_from_trajectory(traj: AmplitudeTrajectory, sys) -> DipoleSeries:
    """``<psi|d|psi> = d_aa |C_a|^2 + d_bb |C_b|^2 + 2 d_ab Re(C_a* C_b)``."""
    traj = to_original_frame(traj)
    d = (sys.d_aa * np.abs(traj.c_a) ** 2 + sys.d_bb * np.abs(traj.c_b) ** 2
         + 2.0 * sys.d_ab * np.real(np.conj(traj.c_a) * traj.c_b))
    return dipole_series(traj.times, d, "exact")


@dataclass
class Peak:
    freq: float
    amplitude: float
    kind: str = "unclassified"  # singlet | triplet | unidentified | unclassified
    n: Optional[int] = None
    member: Optional[str] = None  # lower | center | upper

    @property
    def label(self) -> str:
        if self.kind == "triplet":
            return f"triplet(n={self.n},{self.member})"
        return self.kind


@dataclass
class SpectrumReport:
    freqs: np.ndarray
    power: np.ndarray
    amplitude: np.ndarray
    resolution: float
    window: str
    peaks: list = field(default_factory=list)
    mean_square: float = 0.0

    def find(self, kind, n=None, member=None):
        for p in self.peaks:
            if p.kind == kind and (n is None or p.n == n) and (member is None or p.member == member):
                return p
        return None


def _refine(freqs, amp, k):
    """Quadratic interpolation of log-amplitude over bins ``k-1, k, k+1``."""
    if k <= 0 or k >= len(amp) - 1:
        return freqs[k]
    a, b, c = np.log(amp[k - 1:k + 2] + 1e-300)
    den = a - 2 * b + c
    offset = 0.5 * (a - c) / den if den < 0 else 0.0
    offset = max(-0.5, min(0.5, offset))
    return freqs[k] + offset * (freqs[1] - freqs[0])


@lru_cache(maxsize=None)
def _leakage_envelope(window: str, oversample: int = 16, length: int = 1024) -> np.ndarray:
    """Decreasing envelope of ``|W(delta)| / W(0)`` sampled every ``1/oversample`` bin."""
    w = get_window(window, length, fftbins=True)
    mag = np.abs(np.fft.rfft(w, oversample * length))
    mag /= mag[0]
    return np.maximum.accumulate(mag[::-1])[::-1]


def _leakage(window: str, offset_bins: float, oversample: int = 16) -> float:
    env = _leakage_envelope(window, oversample)
    k = int(max(offset_bins, 0.0) * oversample)
    return float(env[min(k, len(env) - 1)])


def _separate(idx, amp, window, margin):
    """Drop candidates explained by window leakage from stronger accepted peaks."""
    kept = []
    for k in sorted(idx, key=lambda k: -amp[k]):
        # one bin of slack: both the source and the candidate may sit half a bin off-grid
        leak = sum(amp[j] * _leakage(window, abs(k - j) - 1.0) for j in kept)
        if amp[k] > margin * leak:
            kept.append(k)
    return sorted(kept)


def periodogram(series: DipoleSeries, window: str = "hann", resolve: Optional[float] = None,
                floor: float = NOISE_FLOOR, leakage_margin: float = 3.0) -> SpectrumReport:
    """One-sided windowed spectrum with detected, refined peaks.

    ``power`` is normalised so that its sum matches the mean square of
    the (mean-removed) series. ``amplitude`` is the coherent-gain-corrected
    cosine amplitude per bin. Peaks are local maxima above ``floor`` times
    the largest power that stand ``leakage_margin`` times above the
    window sidelobes of every stronger peak; their frequency is refined by
    quadratic interpolation and their amplitude taken from the windowed
    transform at that frequency.

    ``resolve`` is an angular frequency (typically the Rabi frequency) the
    record must cover at least 16 periods of.
    """
    x = series.values - series.values.mean()
    n = len(x)
    dt = series.dt
    span = n * dt
    if resolve is not None and resolve > 0 and span < MIN_RABI_PERIODS * 2 * math.pi / resolve:
        raise SeriesTooShort(
            f"record of {span:.4g} covers {span * resolve / (2 * math.pi):.3g} periods; need {MIN_RABI_PERIODS}")
    w = get_window(window, n, fftbins=True)
    fx = np.fft.rfft(w * x)
    freqs = 2 * math.pi * np.fft.rfftfreq(n, dt)
    power = np.abs(fx) ** 2 / (n * np.sum(w ** 2))
    power[1:] *= 2.0
    if n % 2 == 0:
        power[-1] /= 2.0
    amp = 2.0 * np.abs(fx) / np.sum(w)
    amp[0] /= 2.0

    peaks = []
    if power.max() > 0:
        idx, _ = find_peaks(power, height=floor * power.max())
        idx = _separate(idx, amp, window, leakage_margin)
        wx = w * x
        t = series.times - series.times[0]
        for k in idx:
            f = _refine(freqs, amp, k)
            a = 2.0 * abs(np.dot(wx, np.exp(-1j * f * t))) / np.sum(w)
            peaks.append(Peak(float(f), float(a)))
    return SpectrumReport(freqs, power, amp, float(freqs[1]), window, peaks, float(np.mean(x ** 2)))


def predicted_lines(derived: DerivedParams, omega: float, n_max: int):
    """``[(freq, kind, n, member)]`` for the singlet and triplets ``n = 1..n_max``."""
    big = derived.omega_gen
    lines = [(big, "singlet", None, None)] if big > 0 else []
    for n in range(1, n_max + 1):
        lines.append((n * omega, "triplet", n, "center"))
        if big > 0:
            lines.append((n * omega - big, "triplet", n, "lower"))
            lines.append((n * omega + big, "triplet", n, "upper"))
    return lines


def classify_peaks(report: SpectrumReport, derived: DerivedParams, omega: float, n_max: int = 4) -> SpectrumReport:
    """Match each peak to the nearest predicted line within ``Omega / 2``.

    Each line is claimed by at most one peak, the strongest candidate.
    Everything else is labelled ``unidentified``.
    """
    lines = predicted_lines(derived, omega, n_max)
    tol = 0.5 * derived.omega_gen if derived.omega_gen > 0 else 0.5 * omega
    peaks = [replace(p, kind="unidentified", n=None, member=None) for p in report.peaks]
    claimed = {}
    for i, p in enumerate(peaks):
        if not lines:
            break
        j = min(range(len(lines)), key=lambda j: abs(lines[j][0] - p.freq))
        if abs(lines[j][0] - p.freq) > tol:
            continue
        if j not in claimed or peaks[claimed[j]].amplitude < p.amplitude:
            claimed[j] = i
    for j, i in claimed.items():
        _, kind, n, member = lines[j]
        peaks[i] = replace(peaks[i], kind=kind, n=n, member=member)
    return replace(report, peaks=peaks)


def singlet_power(delta_d: float, omega_r: float, c: float = SPEED_OF_LIGHT) -> float:
    """Time-averaged power ``|delta_d|^2 omega_r^4 / (12 c^3)`` (Gaussian units)."""
    return abs(delta_d) ** 2 * omega_r ** 4 / (12.0 * c ** 3)


def radiated_intensity(sys, omega_r: float, c: float = SPEED_OF_LIGHT) -> float:
    """Power radiated at the Rabi frequency by the permanent-dipole beat.

    ``sys`` needs ``d_aa`` and ``d_bb`` in statC cm; ``omega_r`` is in
    rad/s and the result in erg/s.
    """
    return singlet_power(sys.d_aa - sys.d_bb, omega_r, c)
