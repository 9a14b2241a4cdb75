"""Physical presets and order-of-magnitude emission estimates.

All physics here is in Gaussian (CGS) units; SI appears only at the
reporting boundary (V/cm for fields, W and W/cm^2 for powers).

Constants are CODATA 2018:

==============  ==========================  =========
e               4.803204712570263e-10        statC
hbar            1.054571817e-27              erg s
c               2.99792458e10                cm / s
a_B             5.29177210903e-9             cm
1 Debye         1e-18                        statC cm
1 statV         299.792458                   V
1 eV            1.602176634e-12              erg
==============  ==========================  =========
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .bessel import bessel_j
from .model import DriveParams, SystemParams
from .spectrum import radiated_intensity

__all__ = [
    "UnitContext",
    "CGS",
    "HYDROGEN_RABI_COEFF",
    "HYDROGEN_DIPOLE_COEFF",
    "WeakFieldWarning",
    "CoherenceWarning",
    "QdGeometry",
    "ScenarioPreset",
    "ArrayEstimate",
    "hydrogen_rabi",
    "hydrogen_effective_dipole",
    "hydrogen_preset",
    "qd_preset",
    "qd_array_preset",
    "qd_drive_for_rabi",
    "qd_intensity_per_area",
    "array_power",
    "qubit_preset",
    "to_dimensionless",
    "PRESETS",
    "get_preset",
    "estimate",
]

#: exact rational prefactors of the hydrogen estimates
HYDROGEN_RABI_COEFF_EXACT = 4 * Fraction(2, 3) ** 5
HYDROGEN_DIPOLE_COEFF_EXACT = Fraction(1, 8) * Fraction(4, 3) ** 11
HYDROGEN_RABI_COEFF = float(HYDROGEN_RABI_COEFF_EXACT)
HYDROGEN_DIPOLE_COEFF = float(HYDROGEN_DIPOLE_COEFF_EXACT)

#: fields above this fraction of e / a_B^2 trigger a WeakFieldWarning
WEAK_FIELD_FRACTION = 0.1


class WeakFieldWarning(UserWarning):
    pass


class CoherenceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class UnitContext:
    e: float = 4.803204712570263e-10
    hbar: float = 1.054571817e-27
    c: float = 2.99792458e10
    a_bohr: float = 5.29177210903e-9
    debye: float = 1e-18
    statvolt: float = 299.792458
    ev: float = 1.602176634e-12
    watt: float = 1e7  # erg / s

    def debye_to_cgs(self, d):
        return d * self.debye

    def cgs_to_debye(self, d):
        return d / self.debye

    def field_to_cgs(self, v_per_cm):
        return v_per_cm / self.statvolt

    def field_to_si(self, statv_per_cm):
        return statv_per_cm * self.statvolt

    def ev_to_erg(self, energy):
        return energy * self.ev

    def erg_to_ev(self, energy):
        return energy / self.ev

    def power_to_watt(self, erg_per_s):
        return erg_per_s / self.watt

    @property
    def atomic_field(self) -> float:
        """``e / a_B^2`` in statV/cm."""
        return self.e / self.a_bohr ** 2


CGS = UnitContext()


def _weak_field_check(field_cgs, units):
    if abs(field_cgs) > WEAK_FIELD_FRACTION * units.atomic_field:
        warnings.warn(
            f"field {units.field_to_si(field_cgs):.3g} V/cm is not small against the "
            f"intra-atomic field {units.field_to_si(units.atomic_field):.3g} V/cm",
            WeakFieldWarning, stacklevel=3)


def hydrogen_rabi(e_field: float, units: UnitContext = CGS) -> float:
    """Rabi frequency (rad/s) of ground-state hydrogen driven by ``e_field`` V/cm."""
    f = units.field_to_cgs(e_field)
    _weak_field_check(f, units)
    return HYDROGEN_RABI_COEFF * units.e * units.a_bohr * f / units.hbar


def hydrogen_effective_dipole(static_field: float, units: UnitContext = CGS, a: Optional[float] = None) -> float:
    """``|d_aa - d_bb|`` (statC cm) induced by a static field in V/cm.

    ``a`` replaces the Bohr radius by a characteristic size of another
    system; the weak-field check then no longer applies.
    """
    f = units.field_to_cgs(static_field)
    if a is None:
        a = units.a_bohr
        _weak_field_check(f, units)
    return HYDROGEN_DIPOLE_COEFF * a ** 3 * f


@dataclass(frozen=True)
class QdGeometry:
    height: float        # cm
    area: float          # cm^2, emitting area per dot
    density: float       # dots per cm^2
    count: Optional[float] = None  # array size; None -> coherence-area capacity


@dataclass(frozen=True)
class ScenarioPreset:
    """Named physical configuration.

    ``sys`` is in CGS (rad/s and statC cm) except for dimensionless
    presets, where ``frequency_unit`` gives rad/s per internal unit.
    ``drive_range`` is a field interval in V/cm (or internal units).
    """

    name: str
    sys: SystemParams
    drive_range: tuple
    static_field: Optional[float] = None  # V/cm
    geometry: Optional[QdGeometry] = None
    frequency_unit: float = 1.0
    dimensionless: bool = False
    drive: Optional[DriveParams] = None
    notes: str = ""


def hydrogen_preset(static_field: float = 1e5, units: UnitContext = CGS) -> ScenarioPreset:
    """Hydrogen 1s-2p pair in a static field ``static_field`` V/cm."""
    omega0 = units.ev_to_erg(10.2043) / units.hbar
    d_ab = HYDROGEN_RABI_COEFF * units.e * units.a_bohr
    dd = hydrogen_effective_dipole(static_field, units)
    sys = SystemParams(omega0=omega0, d_aa=dd, d_bb=0.0, d_ab=d_ab)
    return ScenarioPreset("hydrogen", sys, (0.0, 1e6), static_field,
                          notes="Rabi and Stark-dipole prefactors taken as printed")


# III-nitride dot: interband and permanent dipoles both ~10 D, GaN-like gap
QD_DIPOLE_DEBYE = 10.0
QD_GAP_EV = 3.4
QD_BUILTIN_FIELD = 2e6  # V/cm, "several MV/cm"


def qd_preset(units: UnitContext = CGS) -> ScenarioPreset:
    d = units.debye_to_cgs(QD_DIPOLE_DEBYE)
    sys = SystemParams(omega0=units.ev_to_erg(QD_GAP_EV) / units.hbar, d_aa=d, d_bb=0.0, d_ab=d)
    geom = QdGeometry(height=2e-7, area=1e-12, density=1e11)
    return ScenarioPreset("qd", sys, (0.0, 1e6), QD_BUILTIN_FIELD, geom,
                          notes="10 D dipoles and 1e-12 cm^2 area are order-of-magnitude inputs")


def qd_array_preset(count: Optional[float] = None, units: UnitContext = CGS) -> ScenarioPreset:
    base = qd_preset(units)
    geom = QdGeometry(base.geometry.height, base.geometry.area, base.geometry.density, count)
    return ScenarioPreset("qd-array", base.sys, base.drive_range, base.static_field, geom, notes=base.notes)


def qd_drive_for_rabi(omega_r: float, preset: Optional[ScenarioPreset] = None, units: UnitContext = CGS) -> float:
    """Drive field (V/cm) giving Rabi frequency ``omega_r`` (rad/s) via ``E d_cv / hbar``."""
    preset = preset or qd_preset(units)
    if omega_r < 0:
        raise ValueError("target Rabi frequency must be non-negative")
    return units.field_to_si(units.hbar * omega_r / abs(preset.sys.d_ab))


def qd_intensity_per_area(omega_r: float, preset: Optional[ScenarioPreset] = None, units: UnitContext = CGS) -> float:
    """Per-dot singlet intensity in W/cm^2 over the preset's dot area."""
    preset = preset or qd_preset(units)
    power = units.power_to_watt(radiated_intensity(preset.sys, omega_r, units.c))
    return power / preset.geometry.area


@dataclass(frozen=True)
class ArrayEstimate:
    count: float
    per_dot_power: float   # W
    total_power: float     # W
    wavelength: float      # cm
    capacity: float        # dots inside lambda_R^2
    supported: bool

    @property
    def order_of_magnitude(self) -> int:
        return int(math.floor(math.log10(self.total_power))) if self.total_power > 0 else 0


def array_power(preset: ScenarioPreset, count: Optional[float], omega_r: float, units: UnitContext = CGS) -> ArrayEstimate:
    """Coherent emission of ``count`` dots, scaling as ``count**2``.

    Dots radiate in phase only within a lateral size ``lambda_R = 2 pi c /
    omega_r``; ``capacity`` is the number of dots that fit at the preset
    density. ``count=None`` uses that capacity.
    """
    geom = preset.geometry
    if geom is None:
        raise ValueError(f"preset {preset.name!r} has no array geometry")
    wavelength = 2 * math.pi * units.c / omega_r
    capacity = geom.density * wavelength ** 2
    if count is None:
        count = geom.count if geom.count is not None else capacity
    if count < 1:
        raise ValueError("array needs at least one dot")
    supported = count <= capacity
    if not supported:
        warnings.warn(f"{count:.3g} dots exceed the {capacity:.3g} that fit in lambda_R^2", CoherenceWarning, stacklevel=2)
    per_dot = units.power_to_watt(radiated_intensity(preset.sys, omega_r, units.c))
    return ArrayEstimate(float(count), per_dot, per_dot * count ** 2, wavelength, capacity, supported)


def qubit_preset(kappa: float = 0.5, ratio: float = 100.0) -> ScenarioPreset:
    """Dimensionless superconducting-qubit regime: omega0 / Omega_R = ``ratio``.

    One internal frequency unit is ``2 pi x 10 GHz``, so the Rabi line
    sits at 100 MHz for the default ratio.
    """
    omega0 = 1.0
    omega_r = omega0 / ratio
    e_amp = 1.0
    j1 = bessel_j(1, kappa) / kappa if kappa else 0.5
    sys = SystemParams(omega0=omega0, d_aa=0.0, d_bb=kappa * omega0 / e_amp, d_ab=omega_r / (2 * e_amp * j1))
    drive = DriveParams(e_amp, omega0)
    return ScenarioPreset("qubit", sys, (0.0, 2.0), frequency_unit=2 * math.pi * 10e9,
                          dimensionless=True, drive=drive,
                          notes="asymmetry set by the gate offset; kappa at the nominal drive")


def to_dimensionless(preset: ScenarioPreset, e_field: Optional[float] = None, units: UnitContext = CGS):
    """``(SystemParams, DriveParams, frequency_unit)`` with hbar = omega0 = d_ab = 1.

    ``e_field`` is in V/cm for physical presets (default: the upper end of
    the drive range); the drive is tuned to the first resonance.
    """
    if preset.dimensionless:
        drive = preset.drive or DriveParams(preset.drive_range[1], preset.sys.omega0)
        if e_field is not None:
            drive = DriveParams(e_field, drive.omega)
        return preset.sys, drive, preset.frequency_unit
    s = preset.sys
    e_field = preset.drive_range[1] if e_field is None else e_field
    sys = SystemParams(1.0, s.d_aa / s.d_ab, s.d_bb / s.d_ab, 1.0, None if s.tau is None else s.tau * s.omega0)
    e_amp = units.field_to_cgs(e_field) * s.d_ab / (units.hbar * s.omega0)
    return sys, DriveParams(abs(e_amp), 1.0), s.omega0


PRESETS = {
    "hydrogen": hydrogen_preset,
    "qd": qd_preset,
    "qd-array": qd_array_preset,
    "qubit": qubit_preset,
}


def get_preset(name: str, **kwargs) -> ScenarioPreset:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return factory(**kwargs)


def estimate(name: str, rabi_hz: float = 1e12, static_field: Optional[float] = None,
             count: Optional[float] = None, units: UnitContext = CGS) -> dict:
    """End-to-end emission estimate for a named preset, as a flat dict.

    ``rabi_hz`` is the target Rabi frequency (ordinary frequency) for the
    dot presets; for hydrogen the drive field is chosen to produce it.
    """
    omega_r = 2 * math.pi * rabi_hz
    out = {"preset": name, "rabi_hz": rabi_hz, "omega_r": omega_r}
    if name == "hydrogen":
        eps = 1e5 if static_field is None else static_field
        preset = hydrogen_preset(eps, units)
        dd = abs(preset.sys.d_aa - preset.sys.d_bb)
        e_drive = units.field_to_si(units.hbar * omega_r / (HYDROGEN_RABI_COEFF * units.e * units.a_bohr))
        power = units.power_to_watt(radiated_intensity(preset.sys, omega_r, units.c))
        out.update(static_field_v_per_cm=eps, drive_field_v_per_cm=e_drive,
                   effective_dipole_debye=units.cgs_to_debye(dd), power_w=power,
                   wavelength_cm=2 * math.pi * units.c / omega_r)
        return out
    if name in ("qd", "qd-array"):
        preset = qd_array_preset(count, units) if name == "qd-array" else qd_preset(units)
        e_drive = qd_drive_for_rabi(omega_r, preset, units)
        intensity = qd_intensity_per_area(omega_r, preset, units)
        dd = abs(preset.sys.d_aa - preset.sys.d_bb)
        eps = preset.static_field if static_field is None else static_field
        h_dip = hydrogen_effective_dipole(eps, units)
        out.update(drive_field_v_per_cm=e_drive, effective_dipole_debye=units.cgs_to_debye(dd),
                   intensity_w_per_cm2=intensity, qd_area_cm2=preset.geometry.area,
                   static_field_v_per_cm=eps, hydrogen_dipole_debye=units.cgs_to_debye(h_dip),
                   dipole_ratio_qd_to_hydrogen=dd / h_dip,
                   wavelength_cm=2 * math.pi * units.c / omega_r)
        if name == "qd-array":
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                arr = array_power(preset, count, omega_r, units)
            out.update(count=arr.count, per_dot_power_w=arr.per_dot_power, total_power_w=arr.total_power,
                       capacity=arr.capacity, supported=arr.supported,
                       warnings=[str(w.message) for w in caught])
        return out
    if name == "qubit":
        preset = qubit_preset()
        sys, drive, unit = to_dimensionless(preset)
        from .model import compute_kappa, rabi_frequency
        w_r = abs(rabi_frequency(sys, drive, 1))
        out.update(omega0_hz=sys.omega0 * unit / (2 * math.pi), rabi_hz=w_r * unit / (2 * math.pi),
                   omega_r=w_r * unit, ratio=sys.omega0 / w_r, kappa=compute_kappa(sys, drive))
        return out
    raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
