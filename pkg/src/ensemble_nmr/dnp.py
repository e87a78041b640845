"""Four-level population kinetics of a donor under forbidden-transition pumping.

State order throughout is (p11, p10, p1m1, p00) for levels (1,1), (1,0),
(1,-1), (0,0). Every relaxation channel is written as a pair exchange
(p_upper - r p_lower) / T with r = exp(-hbar omega / kT), which has the
Boltzmann distribution as its fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from . import constants as C
from .bloch import RelaxationTimes, _rate
from .donor import DonorSpecies, TransitionSet, all_levels
from .errors import ConvergenceError, DomainError

I11, I10, I1M1, I00 = range(4)
SATURATION_THRESHOLD = 10.0


@dataclass(frozen=True)
class PopulationState:
    p11: float
    p10: float
    p1m1: float
    p00: float

    def __post_init__(self):
        vals = self.as_array()
        if np.any(vals < -1e-12) or np.any(vals > 1 + 1e-12):
            raise DomainError(f"populations must lie in [0, 1]: {vals}")
        if abs(vals.sum() - 1.0) > 1e-9:
            raise DomainError(f"populations sum to {vals.sum():.12g}, not 1")

    def as_array(self):
        return np.array([self.p11, self.p10, self.p1m1, self.p00], dtype=float)

    @classmethod
    def from_array(cls, p):
        return cls(*(float(v) for v in p))


def populations_to_polarizations(p: PopulationState):
    """(P_S, P_I): electron and nuclear polarization of the four-level system."""
    P_S = p.p11 + p.p10 - p.p1m1 - p.p00
    P_I = p.p11 - p.p10 - p.p1m1 + p.p00
    return P_S, P_I


def boltzmann_populations(species: DonorSpecies, B, temperature) -> PopulationState:
    levels = all_levels(species, B)
    E = np.array([levels[k].energy for k in ((1, 1), (1, 0), (1, -1), (0, 0))])
    w = np.exp(-(E - E.min()) / (C.k_B * temperature))
    return PopulationState.from_array(w / w.sum())


def _pair(R, upper, lower, T, r):
    """Add (p_upper - r p_lower)/T flowing from upper into lower."""
    g = _rate(T)
    R[upper, upper] -= g
    R[upper, lower] += g * r
    R[lower, upper] += g
    R[lower, lower] -= g * r


def thermal_ratio(omega, temperature):
    """exp(-hbar omega / kT); omega may be negative (inverted pair)."""
    if not temperature > 0:
        raise DomainError("temperature must be positive")
    return math.exp(-C.hbar * omega / (C.k_B * temperature))


def rate_matrix_full(relax: RelaxationTimes, W_e, temperature,
                     frequencies: TransitionSet):
    """Generator R with dp/dt = R p for the full four-level kinetics.

    Pairs: B (1,1)/(0,0), D (1,0)/(0,0), A+ (1,-1)/(0,0), C (1,0)/(1,-1),
    A- (1,1)/(1,0), all thermal with the exact line frequencies; the pump
    W_e equalizes (1,1) and (1,-1) without a thermal bias.
    """
    if W_e < 0:
        raise DomainError("W_e must be non-negative")
    f = frequencies
    R = np.zeros((4, 4))
    _pair(R, I11, I00, relax.T_par_B, thermal_ratio(f.omega_B, temperature))
    _pair(R, I10, I00, relax.T_par_D, thermal_ratio(f.omega_D, temperature))
    _pair(R, I1M1, I00, relax.T_par_A, thermal_ratio(f.omega_A_plus, temperature))
    _pair(R, I10, I1M1, relax.T_par_C, thermal_ratio(f.omega_C, temperature))
    _pair(R, I11, I10, relax.T_par_A, thermal_ratio(f.omega_A_minus, temperature))
    if W_e > 0:
        _pair(R, I11, I1M1, 1.0 / W_e, 1.0)
    return R


def rate_derivative_full(p: PopulationState, relax: RelaxationTimes, W_e,
                         temperature, frequencies: TransitionSet):
    return rate_matrix_full(relax, W_e, temperature, frequencies) @ p.as_array()


def rate_matrix_simplified(T_par_B, T_par_A, W_e):
    """Generator of the zero-temperature simplification.

    Electron lines B and C relax downward only (r = 0) with T_par_B, the
    nuclear lines exchange symmetrically (r = 1) with pair time T_par_A,
    flip-flop relaxation is switched off.
    """
    if W_e < 0:
        raise DomainError("W_e must be non-negative")
    R = np.zeros((4, 4))
    _pair(R, I11, I00, T_par_B, 0.0)
    _pair(R, I10, I1M1, T_par_B, 0.0)
    _pair(R, I1M1, I00, T_par_A, 1.0)
    _pair(R, I11, I10, T_par_A, 1.0)
    if W_e > 0:
        _pair(R, I11, I1M1, 1.0 / W_e, 1.0)
    return R


def rate_derivative_simplified(p: PopulationState, T_par_B, T_par_A, W_e):
    return rate_matrix_simplified(T_par_B, T_par_A, W_e) @ p.as_array()


@dataclass(frozen=True)
class PopulationTrajectory:
    t: np.ndarray
    p: np.ndarray  # shape (n, 4)

    def polarizations(self):
        P_S = self.p[:, I11] + self.p[:, I10] - self.p[:, I1M1] - self.p[:, I00]
        P_I = self.p[:, I11] - self.p[:, I10] - self.p[:, I1M1] + self.p[:, I00]
        return P_S, P_I


def integrate_populations(p0: PopulationState, rate_matrix, times, method="expm"):
    """Evolve populations under a constant generator at the given times.

    ``method="expm"`` propagates exactly between successive times;
    ``"ode"`` uses an implicit adaptive integrator.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0 or np.any(np.diff(times) < 0) or times[0] < 0:
        raise DomainError("times must be a non-empty, non-decreasing, non-negative array")
    R = np.asarray(rate_matrix, dtype=float)
    y = p0.as_array()
    if method == "expm":
        out = np.empty((times.size, 4))
        t_prev = 0.0
        for i, t in enumerate(times):
            y = expm(R * (t - t_prev)) @ y
            out[i] = y
            t_prev = t
        return PopulationTrajectory(times, out)
    if method == "ode":
        if times[-1] == 0:
            return PopulationTrajectory(times, np.tile(y, (times.size, 1)))
        sol = solve_ivp(lambda t, v: R @ v, (0.0, times[-1]), y, method="Radau",
                        t_eval=times, jac=R, rtol=1e-10, atol=1e-13)
        if sol.status != 0:
            raise ConvergenceError(f"population integration failed: {sol.message}")
        return PopulationTrajectory(sol.t, sol.y.T)
    raise DomainError(f"unknown method {method!r}")


def polarization_matrix(W_e, T_par_B, T_par_A):
    """(M, c) with d(P_S, P_I)/dt = M (P_S, P_I) + c."""
    gB, gA = _rate(T_par_B), _rate(T_par_A)
    M = np.array([[-W_e - gB, -W_e],
                  [-W_e, -W_e - gA]])
    c = np.array([-gB, 0.0])
    return M, c


@dataclass(frozen=True)
class PolarizationTrajectory:
    t: np.ndarray
    P_S: np.ndarray
    P_I: np.ndarray


def _check_polarization(P0):
    P_S, P_I = P0
    if abs(P_S) > 1 + 1e-12 or abs(P_I) > 1 + 1e-12:
        raise DomainError("polarizations must lie in [-1, 1]")


def integrate_polarizations(P0, W_e, T_par_B, T_par_A, duration, n_samples=201,
                            times=None, rtol=1e-11, atol=1e-13):
    """Integrate the reduced (P_S, P_I) kinetics numerically.

    This is the reduction of rate_matrix_simplified with nuclear pair time
    2 T_par_A. Samples are uniform on [0, duration] unless ``times`` is given.
    """
    _check_polarization(P0)
    if W_e < 0:
        raise DomainError("W_e must be non-negative")
    if times is None:
        if not duration > 0:
            raise DomainError("duration must be positive")
        times = np.linspace(0.0, duration, n_samples)
    times = np.asarray(times, dtype=float)
    M, c = polarization_matrix(W_e, T_par_B, T_par_A)
    sol = solve_ivp(lambda t, y: M @ y + c, (0.0, float(times[-1])), np.asarray(P0, float),
                    method="Radau", jac=M, t_eval=times, rtol=rtol, atol=atol)
    if sol.status != 0:
        raise ConvergenceError(f"polarization integration failed: {sol.message}")
    return PolarizationTrajectory(sol.t, sol.y[0], sol.y[1])


def polarization_closed_form(P0, W_e, T_par_B, T_par_A, times):
    """Exact solution of the reduced kinetics via an augmented matrix exponential."""
    _check_polarization(P0)
    M, c = polarization_matrix(W_e, T_par_B, T_par_A)
    G = np.zeros((3, 3))
    G[:2, :2] = M
    G[:2, 2] = c
    y0 = np.array([P0[0], P0[1], 1.0])
    times = np.asarray(times, dtype=float)
    out = np.array([expm(G * t) @ y0 for t in times])
    return PolarizationTrajectory(times, out[:, 0], out[:, 1])


def polarization_steady_state(W_e, T_par_B, T_par_A):
    """(P_S, P_I) fixed point of the reduced kinetics."""
    if math.isinf(T_par_A):
        if W_e == 0:
            raise DomainError("no fixed point: P_I is conserved without pumping or relaxation")
        return -1.0, 1.0
    P_I = W_e * T_par_A / (1.0 + W_e * (T_par_A + T_par_B))
    P_S = P_I * T_par_B / T_par_A - 1.0
    return P_S, P_I


def forbidden_rate(species: DonorSpecies, b_mw, linewidth):
    """Upper bound (gamma_e b_mw)^2 / linewidth on the pumped flip-flip rate, 1/s."""
    if b_mw < 0 or not linewidth > 0:
        raise DomainError("need b_mw >= 0 and linewidth > 0")
    return (species.gamma_e * b_mw) ** 2 / linewidth


def microwave_amplitude_for_rate(species: DonorSpecies, W_e, linewidth):
    if W_e < 0 or not linewidth > 0:
        raise DomainError("need W_e >= 0 and linewidth > 0")
    return math.sqrt(W_e * linewidth) / species.gamma_e


def linewidth_from_t2star(T_perp_S_star):
    return 2.0 / T_perp_S_star


@dataclass(frozen=True)
class SaturationCheck:
    satisfied: bool
    margin: float


def saturation_check(W_e, T_par_S, T_perp_S_star=None,
                     threshold=SATURATION_THRESHOLD) -> SaturationCheck:
    """W_e T_par_S >> 1, read as margin >= threshold.

    T_perp_S_star only sets the linewidth already folded into W_e and does
    not enter the margin.
    """
    if W_e < 0 or not T_par_S > 0:
        raise DomainError("need W_e >= 0 and T_par_S > 0")
    margin = W_e * T_par_S
    return SaturationCheck(margin >= threshold, margin)


@dataclass(frozen=True)
class MicrowaveDrive:
    W_e: float        # 1/s
    omega_S: float    # rad/s
    linewidth: float  # rad/s
    Q_c: float
    V_r: float        # m^3
    b_mw: float | None = None  # T; derived from W_e when omitted

    def __post_init__(self):
        if min(self.omega_S, self.linewidth, self.Q_c, self.V_r) <= 0 or self.W_e < 0:
            raise DomainError("microwave drive parameters must be positive")

    def amplitude(self, species):
        if self.b_mw is not None:
            return self.b_mw
        return microwave_amplitude_for_rate(species, self.W_e, self.linewidth)


def saturation_power(drive: MicrowaveDrive, species: DonorSpecies):
    """Lower bound on the cavity dissipation needed for the pump rate W_e, watt."""
    return (drive.omega_S * drive.V_r * drive.W_e * drive.linewidth
            / (2.0 * C.mu0 * drive.Q_c * species.gamma_e ** 2))


def cavity_power(omega_S, b_mw, V_r, Q_c):
    """omega b^2 V_r / (2 mu0 Q_c): dissipation for a given field amplitude."""
    return omega_S * b_mw ** 2 * V_r / (2.0 * C.mu0 * Q_c)


# Relaxation scenario used for the pumping estimates. T_par_S is only bounded
# below by the quoted values and is an assumption.
DESIGN_RELAXATION = RelaxationTimes(
    T_perp_I=1.0,
    T_par_I=10 * C.hour,
    T_par_A=10 * C.hour,
    T_par_B=1e3,
    T_par_C=1e3,
    T_par_D=30 * C.hour,
    T_par_S=100 * C.hour,
)
DESIGN_DRIVE = MicrowaveDrive(W_e=1e3, omega_S=1e11, linewidth=1e8, Q_c=1e3,
                             V_r=1e-6)
QUOTED_POWER = "P > 1 mW"
