"""Bloch-type dynamics of the nuclear magnetization under a linear RF drive.

The drive is 2 b_eff cos(omega t) along x on top of the static omega_A/gamma
along z. No rotating-wave approximation is made in the integrator; the
rotating-frame steady state is provided separately as a reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import constants as C
from .errors import ConvergenceError, DomainError

MAX_SAMPLES = 5_000_000  # desk-scale cap on stored lab-frame samples


@dataclass(frozen=True)
class MagnetizationVector:
    Mx: float
    My: float
    Mz: float
    Mz0: float

    def as_array(self):
        return np.array([self.Mx, self.My, self.Mz], dtype=float)

    @property
    def norm(self):
        return math.sqrt(self.Mx ** 2 + self.My ** 2 + self.Mz ** 2)

    @classmethod
    def equilibrium(cls, Mz0):
        return cls(0.0, 0.0, Mz0, Mz0)


@dataclass(frozen=True)
class RelaxationTimes:
    """Relaxation times in seconds; ``math.inf`` switches a channel off.

    T_perp_I / T_par_I act on the nuclear Bloch vector. The T_par_* entries
    are longitudinal times of the individual level pairs (A: nuclear lines,
    B, C: allowed electron lines, D: flip-flop, S: forbidden flip-flip).
    """

    T_perp_I: float = math.inf
    T_par_I: float = math.inf
    T_par_A: float = math.inf
    T_par_B: float = math.inf
    T_par_C: float = math.inf
    T_par_D: float = math.inf
    T_par_S: float = math.inf

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value > 0:
                raise DomainError(f"{name} must be positive, got {value!r}")


def _rate(T):
    return 0.0 if math.isinf(T) else 1.0 / T


def _rhs_factory(gamma, b_eff, omega, omega_A, Mz0, T_perp, T_par):
    g_perp, g_par = _rate(T_perp), _rate(T_par)
    two_b = 2.0 * b_eff
    cos = math.cos

    def rhs(t, y):
        mx, my, mz = y
        bx = two_b * cos(omega * t)
        # gamma * (M x B), B = (bx, 0, omega_A / gamma)
        return (
            omega_A * my - g_perp * mx,
            gamma * mz * bx - omega_A * mx - g_perp * my,
            -gamma * my * bx - g_par * (mz - Mz0),
        )

    return rhs


def bloch_derivative(M: MagnetizationVector, species, b_eff, omega, omega_A, t,
                     relax: RelaxationTimes):
    """dM/dt at time t (same units as M per second)."""
    rhs = _rhs_factory(species.gamma_I, b_eff, omega, omega_A, M.Mz0,
                       relax.T_perp_I, relax.T_par_I)
    return np.array(rhs(t, M.as_array()))


def optimal_rf_amplitude(species, relax: RelaxationTimes):
    """Drive amplitude 1/(gamma_I sqrt(T_perp T_par)) maximising the steady M_x."""
    return 1.0 / (species.gamma_I * math.sqrt(relax.T_perp_I * relax.T_par_I))


def rotating_frame_steady_state(Mz0, gamma, b_eff, T_perp, T_par, detuning=0.0):
    """Steady transverse amplitude of the rotating-wave Bloch equations."""
    w1 = gamma * b_eff
    dt = detuning * T_perp
    return Mz0 * w1 * T_perp * math.sqrt(1.0 + dt * dt) / (
        1.0 + dt * dt + w1 * w1 * T_perp * T_par)


@dataclass(frozen=True)
class BlochTrajectory:
    t: np.ndarray        # s
    M: np.ndarray        # shape (3, n)
    Mz0: float
    omega: float         # drive frequency, rad/s

    @property
    def Mx(self):
        return self.M[0]

    @property
    def My(self):
        return self.M[1]

    @property
    def Mz(self):
        return self.M[2]

    def steady_amplitude(self, periods=10):
        """Amplitude of the M_x component at the drive frequency.

        Quadrature demodulation over the last ``periods`` drive periods;
        the trajectory must be sampled uniformly there.
        """
        period = C.TWO_PI / self.omega
        start = self.t[-1] - periods * period
        sel = self.t >= start - 1e-9 * period
        t, mx = self.t[sel][:-1], self.Mx[sel][:-1]
        if t.size < 8 * periods:
            raise DomainError("too few samples in the demodulation window")
        phase = np.exp(1j * self.omega * t)
        return 2.0 * abs(np.mean(mx * phase))


def integrate_bloch(M0: MagnetizationVector, species, b_eff, omega, omega_A,
                    relax: RelaxationTimes, duration, rtol=1e-8, atol=None,
                    samples_per_period=64, method="DOP853"):
    """Integrate the lab-frame Bloch equations from M0 over ``duration``.

    Samples are uniform with ``samples_per_period`` points per drive period.
    Raises ConvergenceError if the adaptive step collapses.
    """
    if not duration > 0:
        raise DomainError("duration must be positive")
    scale = max(abs(M0.Mz0), M0.norm, 1e-300)
    if atol is None:
        atol = rtol * scale * 1e-2
    period = C.TWO_PI / omega
    n = int(math.ceil(duration / period * samples_per_period))
    if n > MAX_SAMPLES:
        raise DomainError(
            f"{n:.3g} samples over {duration / period:.3g} drive periods exceeds "
            f"{MAX_SAMPLES:.0e}; scale the relaxation times down keeping "
            f"omega_A*T_perp = {omega_A * relax.T_perp_I:.3g} large")
    t_eval = np.linspace(0.0, duration, n + 1)
    rhs = _rhs_factory(species.gamma_I, b_eff, omega, omega_A, M0.Mz0,
                       relax.T_perp_I, relax.T_par_I)
    sol = solve_ivp(rhs, (0.0, duration), M0.as_array(), method=method,
                    t_eval=t_eval, rtol=rtol, atol=atol)
    if sol.status != 0:
        w1 = species.gamma_I * b_eff
        raise ConvergenceError(
            f"Bloch integration failed ({sol.message}); "
            f"omega_A*T_perp = {omega_A * relax.T_perp_I:.3g}, "
            f"gamma*b_eff/omega_A = {w1 / omega_A:.3g}")
    return BlochTrajectory(sol.t, sol.y, M0.Mz0, omega)


def steady_state_run(species, b_eff, omega_A, relax: RelaxationTimes, Mz0=1.0,
                     settle=8.0, periods=10, rtol=1e-8):
    """Drive on resonance from equilibrium and return the demodulated M_x amplitude.

    Integrates for ``settle`` * max(T_perp, T_par) plus ``periods`` drive periods.
    """
    T = max(relax.T_perp_I, relax.T_par_I)
    if math.isinf(T):
        raise DomainError("steady state needs finite relaxation times")
    duration = settle * T + periods * C.TWO_PI / omega_A
    traj = integrate_bloch(MagnetizationVector.equilibrium(Mz0), species, b_eff,
                           omega_A, omega_A, relax, duration, rtol=rtol)
    return traj.steady_amplitude(periods)
