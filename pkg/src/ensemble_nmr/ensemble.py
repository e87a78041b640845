"""Thermal-equilibrium statistics of an L-qubit ensemble member."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import constants as C
from .donor import DonorSpecies, transition_frequencies
from .errors import DomainError

# quoted estimate for the allowed qubit count at threshold 1e-3
QUOTED_LMAX = "L < 12"


@dataclass(frozen=True)
class ThermalContext:
    temperature: float  # K
    omega_A: float      # rad/s
    L: int = 1

    def __post_init__(self):
        if not self.temperature > 0:
            raise DomainError("temperature must be positive")
        if not self.omega_A > 0:
            raise DomainError("transition frequency must be positive")
        if int(self.L) != self.L or self.L < 1:
            raise DomainError("L must be a positive integer")

    @property
    def x(self):
        """hbar omega_A / k T."""
        return C.hbar * self.omega_A / (C.k_B * self.temperature)

    @classmethod
    def from_ratio(cls, x, L=1, temperature=1.0):
        """Context with a prescribed hbar omega / kT."""
        return cls(temperature, x * C.k_B * temperature / C.hbar, L)

    @classmethod
    def for_donor(cls, species: DonorSpecies, B, temperature, L=1):
        """Context on the A+ nuclear line of a donor at field B."""
        w = transition_frequencies(species, B).omega_A_plus
        return cls(temperature, w, L)


def _log_partition_per_spin(x):
    # log(e^{x/2} + e^{-x/2})
    return float(np.logaddexp(x / 2.0, -x / 2.0))


def pseudo_pure_epsilon(ctx: ThermalContext) -> float:
    """Population difference between the lowest and highest of the 2^L states.

    epsilon = 2 sinh(L x/2) / (2 cosh(x/2))^L with x = hbar omega / kT,
    evaluated in log space so that large L does not overflow.
    """
    x, L = ctx.x, ctx.L
    log_top = L * (x / 2.0 - _log_partition_per_spin(x))
    return math.exp(log_top) * -math.expm1(-L * x)


def level_populations(ctx: ThermalContext):
    """(p_lowest, p_highest): the all-ground and all-excited L-qubit states."""
    x, L = ctx.x, ctx.L
    logZ = L * _log_partition_per_spin(x)
    return math.exp(L * x / 2.0 - logZ), math.exp(-L * x / 2.0 - logZ)


def max_nuclear_magnetization(species: DonorSpecies, B, ctx: ThermalContext, N, volume):
    """Largest equilibrium nuclear magnetization (J T^-1 m^-3).

    ``N`` resonant nuclei in ``volume`` (m^3); ``ctx.omega_A`` should be the
    A+ line at field ``B`` (see ThermalContext.for_donor).
    """
    if N < 0 or not volume > 0:
        raise DomainError("need N >= 0 and volume > 0")
    X = species.x_parameter(B)
    p_low, p_high = level_populations(ctx)
    mixing = X / math.sqrt(1.0 + X * X)
    return species.gamma_I * C.hbar / 2.0 * (N / volume) * (mixing * p_low - p_high)


def high_temperature_magnetization(species, ctx, N, volume):
    """Small-polarization, strong-field limit: gamma hbar/2 (N/V) 2^-L L x."""
    return (species.gamma_I * C.hbar / 2.0 * (N / volume)
            * ctx.L * 2.0 ** (-ctx.L) * ctx.x)


def max_qubits_for_threshold(threshold: float) -> int:
    """Largest L with L 2^-L > threshold.

    L 2^-L peaks at 1/2 (L = 1 and 2, ties go to 2) and decreases after,
    so the search walks up from L = 2 until the inequality fails.
    """
    if not (threshold > 0):
        raise DomainError("threshold must be positive")
    if threshold >= 0.5:
        raise DomainError(f"no L satisfies L 2^-L > {threshold} (maximum is 1/2)")
    L = 2
    while (L + 1) * 2.0 ** (-(L + 1)) > threshold:
        L += 1
    return L
