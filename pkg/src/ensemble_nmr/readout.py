"""One-coil NMR read-out budget: signal, Johnson noise and S/N.

Two regimes are covered: a liquid bulk ensemble at high temperature, where
the pseudo-pure probability epsilon(L) suppresses the signal, and the planar
donor register at full nuclear polarization.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from . import constants as C
from .donor import DonorSpecies
from .ensemble import ThermalContext, pseudo_pure_epsilon
from .errors import DomainError

EXCHANGE_MAX_LX = 20e-9  # m

# Coefficients of the rounded order-of-magnitude forms (dimensionless, volume in cm^3).
LIQUID_SHORTHAND_COEFF = 1e-9
SOLID_SHORTHAND_COEFF = 1e-10
TWO_QUBIT_LIQUID_COEFF = 1e-17


@dataclass(frozen=True)
class CoilCircuit:
    """Tuned pick-up circuit.

    ``omega_A`` is optional; when given, K*A_turn is checked against
    sqrt(R V_s / (mu0 Q omega_A)) to 1 %.
    """

    Q: float
    K: int
    A_turn: float      # m^2
    R: float           # ohm
    bandwidth: float   # Hz
    V_s: float         # m^3
    omega_A: float | None = None

    def __post_init__(self):
        if not (self.Q > 0 and self.K >= 1 and self.A_turn > 0 and self.V_s > 0):
            raise DomainError("need Q > 0, K >= 1, A_turn > 0, V_s > 0")
        if not (self.R > 0 and self.bandwidth > 0):
            raise DomainError("need R > 0 and bandwidth > 0")
        if self.omega_A is not None:
            expected = self.ka_from_circuit(self.R, self.V_s, self.Q, self.omega_A)
            if abs(self.K * self.A_turn - expected) > 0.01 * expected:
                raise DomainError(
                    f"K*A = {self.K * self.A_turn:.4g} m^2 inconsistent with "
                    f"R, V_s, Q, omega_A (expects {expected:.4g} m^2)")

    @staticmethod
    def ka_from_circuit(R, V_s, Q, omega_A):
        return math.sqrt(R * V_s / (C.mu0 * Q * omega_A))

    @classmethod
    def from_resonance(cls, Q, R, V_s, omega_A, bandwidth=1.0, K=1):
        ka = cls.ka_from_circuit(R, V_s, Q, omega_A)
        return cls(Q=Q, K=K, A_turn=ka / K, R=R, bandwidth=bandwidth, V_s=V_s,
                   omega_A=omega_A)

    @property
    def inductance(self):
        return C.mu0 * (self.K * self.A_turn) ** 2 / self.V_s

    def capacitance(self, omega_A=None):
        w = omega_A if omega_A is not None else self.omega_A
        if w is None:
            raise DomainError("resonance frequency needed for the capacitance")
        return 1.0 / (w * w * self.inductance)


@dataclass(frozen=True)
class RegisterGeometry:
    l_x: float     # donor spacing along a chain, m
    l_y: float     # spacing along the strips, m
    d: float       # donor depth, m
    delta: float   # plate thickness, m
    L: int         # qubits per chain
    N0: int        # chains per block
    n: int = 1
    p: int = 1

    def __post_init__(self):
        if min(self.L, self.N0, self.n, self.p) < 1:
            raise DomainError("all counts must be >= 1")
        if min(self.l_x, self.l_y, self.d, self.delta) <= 0:
            raise DomainError("lengths must be positive")
        if self.l_x > EXCHANGE_MAX_LX * (1 + 1e-12):
            warnings.warn(f"l_x = {self.l_x:.3g} m exceeds the 20 nm exchange limit",
                          stacklevel=2)

    @property
    def N(self):
        return self.n * self.p * self.N0

    @property
    def molecule_volume(self):
        return self.delta * self.l_x * self.l_y * self.L

    @property
    def sample_volume(self):
        return self.molecule_volume * self.N


def signal_amplitude(species: DonorSpecies, circuit: CoilCircuit, spin_density,
                     epsilon, omega_A, filling_factor=1.0):
    """Peak induced voltage |V_max| (V)."""
    if not 0 <= epsilon <= 1:
        raise DomainError("epsilon must lie in [0, 1]")
    return (C.mu0 / 4.0 * circuit.Q * circuit.K * circuit.A_turn * spin_density
            * species.gamma_I * C.hbar * omega_A * epsilon * filling_factor)


def noise_voltage(temperature, R, bandwidth):
    """RMS Johnson noise sqrt(4 k T R dnu) (V)."""
    if temperature < 0 or R < 0 or bandwidth < 0:
        raise DomainError("noise inputs must be non-negative")
    return math.sqrt(4.0 * C.k_B * temperature * R * bandwidth)


def snr_closed_form(gamma_I, Q, V_s, bandwidth, temperature, omega_A, N, epsilon):
    """(1/8) sqrt(mu0 hbar Q hbar omega / (V_s dnu k T)) gamma_I N epsilon."""
    x = C.hbar * omega_A / (C.k_B * temperature)
    return (math.sqrt(C.mu0 * C.hbar * Q * x / (V_s * bandwidth))
            * gamma_I * N * epsilon / 8.0)


@dataclass(frozen=True)
class SNREstimate:
    exact: float
    shorthand: float
    epsilon: float

    @property
    def ratio(self):
        return self.exact / self.shorthand if self.shorthand else math.nan


def signal_to_noise_liquid(species: DonorSpecies, circuit: CoilCircuit, N, L,
                           temperature, omega_A, epsilon=None):
    """S/N of a liquid ensemble of N molecules with L qubits each.

    ``epsilon`` defaults to the thermal pseudo-pure probability; pass a value
    to reproduce estimates that substitute a rounded one. The exact value is
    signal_amplitude / noise_voltage with K*A taken from the tuned circuit;
    the shorthand is sqrt((Q/V_s[cm^3]) hbar omega/kT) N epsilon 1e-9.
    """
    if N < 0:
        raise DomainError("N must be non-negative")
    if epsilon is None:
        epsilon = pseudo_pure_epsilon(ThermalContext(temperature, omega_A, L))
    ka = CoilCircuit.ka_from_circuit(circuit.R, circuit.V_s, circuit.Q, omega_A)
    tuned = CoilCircuit(circuit.Q, 1, ka, circuit.R, circuit.bandwidth, circuit.V_s)
    signal = signal_amplitude(species, tuned, N / circuit.V_s, epsilon, omega_A)
    exact = signal / noise_voltage(temperature, circuit.R, circuit.bandwidth)
    x = C.hbar * omega_A / (C.k_B * temperature)
    shorthand = (math.sqrt(circuit.Q / C.to_cm3(circuit.V_s) * x) * N * epsilon
                 * LIQUID_SHORTHAND_COEFF)
    return SNREstimate(exact, shorthand, epsilon)


@dataclass(frozen=True)
class SolidSNR:
    shorthand: float   # sqrt(Q N / (delta l_x l_y L)[cm^3]) 1e-10
    liquid_form: float  # sqrt(Q hbar omega / (kT V_s[cm^3])) N 1e-9
    exact: float       # closed form with epsilon = 1, bandwidth 1 Hz


def _solid_snr(gamma_I, geometry, N, Q, temperature, omega_A, bandwidth=1.0):
    v_cm3 = C.to_cm3(geometry.molecule_volume)
    V_s = geometry.molecule_volume * N
    shorthand = math.sqrt(Q * N / v_cm3) * SOLID_SHORTHAND_COEFF
    x = C.hbar * omega_A / (C.k_B * temperature)
    liquid_form = math.sqrt(Q * x / C.to_cm3(V_s)) * N * LIQUID_SHORTHAND_COEFF
    exact = snr_closed_form(gamma_I, Q, V_s, bandwidth, temperature, omega_A, N, 1.0)
    return SolidSNR(shorthand, liquid_form, exact)


def signal_to_noise_solid(species: DonorSpecies, geometry: RegisterGeometry, Q,
                          temperature, omega_A, N=None, bandwidth=1.0) -> SolidSNR:
    """S/N of the planar register at full polarization.

    ``N`` overrides geometry.N (the sample volume always scales with N).
    """
    if N is None:
        N = geometry.N
    if N < 0 or Q <= 0:
        raise DomainError("need N >= 0, Q > 0")
    return _solid_snr(species.gamma_I, geometry, N, Q, temperature, omega_A, bandwidth)


def required_ensemble_size(target_snr, species, geometry, Q, temperature,
                           omega_A=None, method="shorthand"):
    """Smallest N whose solid-state S/N reaches ``target_snr``.

    S/N grows as sqrt(N), so the continuous solution is squared and then
    nudged to the exact integer boundary.
    """
    if target_snr <= 0:
        return 1
    if method not in ("shorthand", "exact"):
        raise DomainError(f"unknown method {method!r}")
    if method == "exact" and omega_A is None:
        raise DomainError("exact method needs omega_A")
    w = omega_A if omega_A is not None else 1.0

    def snr(N):
        est = _solid_snr(species.gamma_I, geometry, N, Q, temperature, w)
        return getattr(est, method)

    # rounding in unit conversion must not push an exact boundary up by one
    goal = target_snr * (1 - 1e-12)
    per_root = snr(1)
    N = max(1, math.ceil((target_snr / per_root) ** 2 * (1 - 1e-12)))
    while N > 1 and snr(N - 1) >= goal:
        N -= 1
    while snr(N) < goal:
        N += 1
    return N


@dataclass(frozen=True)
class BlockLayout:
    n: int
    p: int
    side_x: float  # m
    side_y: float  # m

    @property
    def side(self):
        return math.sqrt(self.side_x * self.side_y)

    @property
    def area(self):
        return self.side_x * self.side_y


def block_layout(N, N0, L, l_x, l_y, aspect=1.0) -> BlockLayout:
    """Split N chains into an n x p grid of N0-chain blocks.

    A block is L*l_x long (x) and N0*l_y wide (y); n is chosen so that
    side_x / side_y is closest to ``aspect``, then p = ceil(N / (n N0)).
    """
    if min(N, N0, L) < 1:
        raise DomainError("N, N0, L must be >= 1")
    if min(l_x, l_y, aspect) <= 0:
        raise DomainError("spacings and aspect must be positive")
    n_cont = math.sqrt(aspect * N * l_y / (L * l_x))
    n_max = math.ceil(N / N0)
    n = min(max(1, round(n_cont)), n_max)
    p = math.ceil(N / (n * N0))
    return BlockLayout(n, p, n * L * l_x, p * N0 * l_y)


# Planar register from the read-out budget: 20 nm x 50 nm cells, 1000-qubit
# chains, 100 chains per block, 16 x 63 blocks, 0.1 cm plate.
DESIGN_GEOMETRY = RegisterGeometry(l_x=20e-9, l_y=50e-9, d=20e-9, delta=0.1e-2,
                                  L=1000, N0=100, n=16, p=63)
DESIGN_Q_SOLID = 1e6
DESIGN_T_SOLID = 0.1
