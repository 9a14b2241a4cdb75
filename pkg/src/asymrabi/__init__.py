"""Strongly driven two-level systems with broken inversion symmetry."""
from .bessel import bessel_j, bessel_row
from .model import (
    DerivedParams,
    DriveParams,
    SystemParams,
    compute_kappa,
    derived,
    rabi_frequency,
    resonance_dominance,
)
from .dynamics import InitialState, integrate_exact, integrate_floquet, integrate_transformed, population
from .rwa import RwaSolution, dipole_rwa, rwa_amplitudes, rwa_validity
from .spectrum import classify_peaks, dipole_from_trajectory, periodogram, radiated_intensity

__version__ = "0.1.0"
