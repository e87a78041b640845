"""Physical constants and unit conversions.

Everything inside the package is SI. The handful of non-SI units that the
design numbers are usually quoted in (cm, cm^3, cm^-3, rad*MHz/T, ...) are
converted here and nowhere else.
"""

import math

from scipy import constants as _c

# Bump whenever a value below changes; echoed in every CLI provenance block.
CONSTANTS_VERSION = "2026.1"

hbar = _c.hbar            # J s
h = _c.h                  # J s
k_B = _c.k                # J / K
mu0 = _c.mu_0             # T^2 m^3 / J
mu_B = _c.physical_constants["Bohr magneton"][0]  # J / T

# Generic nuclear gyromagnetic ratio used for liquid-state and impurity
# estimates (rad s^-1 T^-1).
GAMMA_N = 95.8e6
# Electron ratio 2 mu_B / hbar, rounded as used in the dipolar estimates.
GAMMA_B = 176e9

SI_ATOM_DENSITY = 5.0e22 * 1e6   # silicon atoms per m^3
NATURAL_29SI_PERCENT = 4.7

NU_J = 100e3                   # interqubit indirect coupling, Hz
GATE_ERROR_TARGET = 1e-5       # tolerated relative error per logic operation
SPECTROMETER_RESOLUTION = NU_J * GATE_ERROR_TARGET  # Hz

# unit multipliers to SI
nm = 1e-9
um = 1e-6
cm = 1e-2
cm3 = 1e-6
per_cm3 = 1e6
MHz = 1e6
GHz = 1e9
rad_MHz_per_T = 1e6
rad_GHz_per_T = 1e9
hour = 3600.0

TWO_PI = 2.0 * math.pi


def to_cm(length_m):
    return length_m / cm


def from_cm(length_cm):
    return length_cm * cm


def to_cm3(volume_m3):
    return volume_m3 / cm3


def from_cm3(volume_cm3):
    return volume_cm3 * cm3


def table():
    """Return the constants table as a plain dict (for provenance output)."""
    return {
        "version": CONSTANTS_VERSION,
        "hbar[J s]": hbar,
        "k_B[J/K]": k_B,
        "mu0[T^2 m^3/J]": mu0,
        "mu_B[J/T]": mu_B,
        "gamma_N[rad/s/T]": GAMMA_N,
        "gamma_B[rad/s/T]": GAMMA_B,
        "Si_density[1/m^3]": SI_ATOM_DENSITY,
        "nu_J[Hz]": NU_J,
        "gate_error_target": GATE_ERROR_TARGET,
    }
