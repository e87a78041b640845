"""Electron-nuclear spin physics of a single shallow donor.

The donor is an S=1/2 electron coupled to an I=1/2 nucleus by an isotropic
contact interaction A I.S in a static field B along z. Levels are labelled by
(F, mF) as in the Breit-Rabi treatment; the basis states of the electron and
nuclear z-projections are (M, m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from . import constants as C
from .errors import DomainError

VALID_LEVELS = ((0, 0), (1, -1), (1, 0), (1, 1))

# Weak-field window of the RF gain effect, tesla. The lower edge is where the
# hyperfine and electron Zeeman energies cross (X ~ 1), the upper one where
# the gain factor drops to ~1.
GAIN_WINDOW = (3.9e-3, 3.5)


@dataclass(frozen=True)
class DonorSpecies:
    name: str
    gamma_e: float       # rad s^-1 T^-1
    gamma_I: float       # rad s^-1 T^-1
    hyperfine_A: float   # J

    def __post_init__(self):
        if not (self.gamma_e > self.gamma_I > 0):
            raise DomainError("need gamma_e > gamma_I > 0")
        if not self.hyperfine_A > 0:
            raise DomainError("hyperfine constant must be positive")

    @property
    def hyperfine_hz(self):
        return self.hyperfine_A / (C.TWO_PI * C.hbar)

    def x_parameter(self, B):
        """Dimensionless field X = (gamma_e + gamma_I) hbar B / A."""
        return (self.gamma_e + self.gamma_I) * C.hbar * B / self.hyperfine_A


P31 = DonorSpecies(
    name="P31",
    gamma_e=176.08 * C.rad_GHz_per_T,
    gamma_I=108.0 * C.rad_MHz_per_T,
    hyperfine_A=C.TWO_PI * C.hbar * 116.0 * C.MHz,
)

SPECIES = {"P31": P31}


@dataclass(frozen=True)
class QuantumLevel:
    F: int
    mF: int
    energy: float  # J
    # dominant (M, m) projections at high field
    M: float = field(default=0.0, compare=False)
    m: float = field(default=0.0, compare=False)


_HIGH_FIELD_LABELS = {
    (1, 1): (0.5, 0.5),
    (1, 0): (0.5, -0.5),
    (1, -1): (-0.5, -0.5),
    (0, 0): (-0.5, 0.5),
}


def _check_field(B, strict=False):
    if not math.isfinite(B) or B < 0 or (strict and B == 0):
        raise DomainError(f"field must be {'>' if strict else '>='} 0, got {B!r}")


def energy_level(species: DonorSpecies, F: int, mF: int, B: float) -> QuantumLevel:
    """Breit-Rabi energy of level (F, mF) at field B.

    For |mF| = 1 the square root is the perfect square (1 + mF X)^2 and the
    signed root 1 + mF X is taken; with the principal root the (1, -1) level
    would be wrong for X > 1.
    """
    if (F, mF) not in VALID_LEVELS:
        raise DomainError(f"invalid level (F={F}, mF={mF})")
    _check_field(B)
    A = species.hyperfine_A
    X = species.x_parameter(B)
    if abs(mF) == 1:
        root = 1.0 + mF * X
    else:
        root = math.sqrt(1.0 + X * X)
    sign = -1.0 if F % 2 else 1.0
    E = -A / 4.0 - species.gamma_I * C.hbar * B * mF - sign * (A / 2.0) * root
    M, m = _HIGH_FIELD_LABELS[(F, mF)]
    return QuantumLevel(F, mF, E, M, m)


def all_levels(species, B):
    return {key: energy_level(species, *key, B) for key in VALID_LEVELS}


@dataclass(frozen=True)
class TransitionSet:
    """Angular frequencies (rad/s) of the donor transitions.

    Electron lines: B = (1,1)<->(0,0), C = (1,0)<->(1,-1),
    D = (1,0)<->(0,0) (flip-flop), S = (1,1)<->(1,-1) (flip-flip, forbidden
    to first order). Nuclear lines: A+ = (1,-1)<->(0,0), A- = (1,1)<->(1,0).
    """

    omega_A_plus: float
    omega_A_minus: float
    omega_B: float
    omega_C: float
    omega_D: float
    omega_S: float
    allowed: dict = field(
        default_factory=lambda: {
            "A+": True, "A-": True, "B": True, "C": True, "D": True, "S": False,
        },
        compare=False,
    )

    def as_dict(self):
        return {
            "A+": self.omega_A_plus,
            "A-": self.omega_A_minus,
            "B": self.omega_B,
            "C": self.omega_C,
            "D": self.omega_D,
            "S": self.omega_S,
        }


def transition_frequencies(species: DonorSpecies, B: float) -> TransitionSet:
    _check_field(B)
    if B == 0:
        raise DomainError("B = 0: the (1,1) and (1,0) levels are degenerate, "
                          "omega_A- is undefined")
    E = {k: v.energy for k, v in all_levels(species, B).items()}
    hb = C.hbar
    return TransitionSet(
        omega_A_plus=(E[(1, -1)] - E[(0, 0)]) / hb,
        omega_A_minus=(E[(1, 1)] - E[(1, 0)]) / hb,
        omega_B=(E[(1, 1)] - E[(0, 0)]) / hb,
        omega_C=(E[(1, 0)] - E[(1, -1)]) / hb,
        omega_D=(E[(1, 0)] - E[(0, 0)]) / hb,
        omega_S=(E[(1, 1)] - E[(1, -1)]) / hb,
    )


def approximate_nuclear_frequencies(species, B):
    """High-field expansions of omega_A+ and omega_A- as usually quoted.

    Comparison output only. Note the second-order hyperfine term enters the
    exact splittings with the opposite sign (+A^2/4 gamma_e hbar B for A+),
    so these agree with the exact values to O(A/X), not better.
    """
    _check_field(B, strict=True)
    A = species.hyperfine_A
    zI = species.gamma_I * C.hbar * B
    second = A * A / (4.0 * species.gamma_e * C.hbar * B)
    plus = (zI + A / 2.0 - second) / C.hbar
    minus = (-zI + A / 2.0 + second) / C.hbar
    return plus, minus


def mixing_alpha(species: DonorSpecies, B: float) -> float:
    """Weight of |M=+1/2, m=-1/2> in the singlet-like ground state |0,0>."""
    _check_field(B)
    X = species.x_parameter(B)
    # 1 - X/sqrt(1+X^2) written without cancellation
    return 0.5 / (1.0 + X * X + X * math.sqrt(1.0 + X * X))


def magnetization_elements(species: DonorSpecies, B: float):
    """Diagonal nuclear-moment elements <0,0|M_z|0,0> and <1,-1|M_z|1,-1> (J/T)."""
    _check_field(B)
    X = species.x_parameter(B)
    unit = species.gamma_I * C.hbar / 2.0
    return X / math.sqrt(1.0 + X * X) * unit, -unit


class GainFactor(NamedTuple):
    eta: float
    in_window: bool


def gain_factor(species: DonorSpecies, B: float) -> GainFactor:
    """eta = A / (2 gamma_I hbar B); b_eff ~ (1 + eta) b in the weak-field window.

    Outside GAIN_WINDOW the value is still returned, flagged ``in_window=False``.
    """
    if not (B > 0):
        raise DomainError(f"gain factor needs B > 0, got {B!r}")
    eta = species.hyperfine_A / (2.0 * species.gamma_I * C.hbar * B)
    lo, hi = GAIN_WINDOW
    return GainFactor(eta, lo < B < hi)


def effective_rf_amplitude(species: DonorSpecies, B: float, b: float) -> float:
    if b < 0:
        raise DomainError("RF amplitude must be non-negative")
    alpha = mixing_alpha(species, B)
    ratio = species.gamma_e / species.gamma_I
    return b * (math.sqrt(alpha) * ratio + math.sqrt(1.0 - alpha))


def rabi_frequency(species: DonorSpecies, B: float, b: float) -> float:
    """Nutation frequency of the (0,0)<->(1,-1) transition, rad/s."""
    return species.gamma_I * effective_rf_amplitude(species, B, b)
