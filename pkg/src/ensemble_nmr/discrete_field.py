"""Read-out signal of a discrete planar spin array inside a flat solenoid.

Spins sit in the plane z = 0 on a rectangular lattice, magnetic moments along
the solenoid axis x. Two routes to the induced voltage are provided:

* ``brute_force_signal`` sums the exact dipole flux of every spin through the
  coil cross-section at each axial position, takes its modulus and averages
  over the solenoid length;
* ``analytic_signal`` is the continuum estimate with the logarithmic
  geometry factor (X / pi D) log(X / (delta sqrt e)).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import constants as C
from .errors import ConvergenceError, DomainError

SINGULAR_RADIUS = 1e-3  # in units of l_y
MAX_SPINS = 10 ** 6


@dataclass(frozen=True)
class SpinArrayLayout:
    """n columns along x (period L_spacing) by p_N0 rows along y (period l_y).

    Sites are centred: x_i = (i - (n-1)/2) L_spacing, likewise in y, so the
    array holds exactly n * p_N0 spins. The coil cross-section is D x delta
    with D = p_N0 l_y; the solenoid length is X = n L_spacing.
    ``strict=False`` admits odd counts (single-spin checks).
    """

    n: int
    p_N0: int
    L_spacing: float
    l_y: float
    delta: float
    strict: bool = True

    def __post_init__(self):
        if min(self.L_spacing, self.l_y, self.delta) <= 0:
            raise DomainError("spacings and delta must be positive")
        if self.strict:
            if self.n < 2 or self.p_N0 < 2 or self.n % 2 or self.p_N0 % 2:
                raise DomainError("n and p_N0 must be even and >= 2")
        elif self.n < 1 or self.p_N0 < 1:
            raise DomainError("n and p_N0 must be >= 1")
        if self.N > MAX_SPINS:
            raise DomainError(f"{self.N} spins exceeds the desk-scale cap {MAX_SPINS}")
        if self.strict and self.X / self.L_spacing < 10 * (1 - 1e-9):
            warnings.warn("X / L_spacing < 10: solenoid not long against the period",
                          stacklevel=2)
        if self.strict and self.D / self.delta < 10 * (1 - 1e-9):
            warnings.warn("D / delta < 10: coil cross-section not flat", stacklevel=2)

    @property
    def N(self):
        return self.n * self.p_N0

    @property
    def X(self):
        return self.n * self.L_spacing

    @property
    def D(self):
        return self.p_N0 * self.l_y

    @property
    def area(self):
        return self.D * self.delta

    @property
    def volume(self):
        return self.area * self.X

    def x_sites(self):
        return (np.arange(self.n) - (self.n - 1) / 2.0) * self.L_spacing

    def y_sites(self):
        return (np.arange(self.p_N0) - (self.p_N0 - 1) / 2.0) * self.l_y

    @classmethod
    def from_ratios(cls, n, p_N0, X_over_D, X_over_delta, X=1.0):
        """Layout with prescribed aspect ratios; absolute scale X (m)."""
        D = X / X_over_D
        return cls(n, p_N0, X / n, D / p_N0, X / X_over_delta)


def _prefactor(gamma):
    return C.mu0 * gamma * C.hbar / (16.0 * math.pi)


def peak_field_at(layout: SpinArrayLayout, species, point):
    """Axial field B_x (T) of the whole array at ``point`` = (x, y, z)."""
    x, y, z = (float(v) for v in point)
    a = x - layout.x_sites()[:, None]
    b = y - layout.y_sites()[None, :]
    r2 = a * a + b * b + z * z
    if math.sqrt(r2.min()) < SINGULAR_RADIUS * layout.l_y:
        raise DomainError(f"field point {point} coincides with a spin site")
    s = np.sum((b * b + z * z - 2.0 * a * a) / r2 ** 2.5)
    return _prefactor(species.gamma_I) * float(s)


def far_field_exponent(layout: SpinArrayLayout, species, z_values):
    """Log-log slope of |B_x(0, 0, z)| against z."""
    z = np.asarray(z_values, dtype=float)
    B = np.array([abs(peak_field_at(layout, species, (0.0, 0.0, zi))) for zi in z])
    return float(np.polyfit(np.log(z), np.log(B), 1)[0])


def rect_flux(a, b1, b2, z1, z2):
    """Integral of (b^2 + z^2 - 2a^2) / r^5 over b in [b1, b2], z in [z1, z2].

    r^2 = a^2 + b^2 + z^2; closed form from the antiderivative
    h = -b z (a^2 + r^2) / (r (a^2 + b^2)(a^2 + z^2)). Corners must not sit
    on b = 0 or z = 0 when a = 0.
    """
    a2 = np.asarray(a, dtype=float) ** 2

    def h(b, z):
        r = np.sqrt(a2 + b * b + z * z)
        return -b * z * (a2 + r * r) / (r * (a2 + b * b) * (a2 + z * z))

    return h(b2, z2) - h(b1, z2) - h(b2, z1) + h(b1, z1)


def _column_flux(layout, a):
    """Flux density sum over one column of spins, as a function of x offset a."""
    D, half_d = layout.D, layout.delta / 2.0
    out = np.zeros_like(a)
    for yj in layout.y_sites():
        out += rect_flux(a, -D / 2.0 - yj, D / 2.0 - yj, -half_d, half_d)
    return out


def _half_cell_nodes(layout, order, panels):
    """Gauss-Legendre nodes on [0, L/2], graded towards the lattice site."""
    half = layout.L_spacing / 2.0
    s0 = 1e-4 * min(layout.delta, layout.l_y, half)
    brk = np.concatenate([[0.0], np.geomspace(s0, half, panels)])
    g, w = np.polynomial.legendre.leggauss(order)
    lo, hi = brk[:-1, None], brk[1:, None]
    t = ((g + 1.0) / 2.0 * (hi - lo) + lo).ravel()
    wt = (w / 2.0 * (hi - lo)).ravel()
    return t, wt


def _flux_integral(layout, order, panels):
    """Integral over x in [-X/2, X/2] of |total flux density through the coil|."""
    t, w = _half_cell_nodes(layout, order, panels)
    n, L = layout.n, layout.L_spacing
    shifts = np.arange(-(n - 1), n) * L
    total = 0.0
    for sign in (1.0, -1.0):
        # G[k, q] = column flux at offset sign*t_q + shifts[k]
        G = _column_flux(layout, sign * t[None, :] + shifts[:, None])
        # cell c sees columns i with offset (c - i) L, index k = c - i + n - 1
        cs = np.cumsum(np.vstack([np.zeros_like(G[:1]), G]), axis=0)
        c = np.arange(n)
        S = cs[c + n] - cs[c]
        total += float(np.sum(np.abs(S) * w[None, :]))
    return total


@dataclass(frozen=True)
class BruteForceResult:
    voltage: float      # V
    coarse: float       # V, lower grid level
    rel_change: float

    def __float__(self):
        return self.voltage


def brute_force_signal(layout: SpinArrayLayout, species, Q, K, omega_A, order=8,
                       panels=24, rtol=1e-2) -> BruteForceResult:
    """Peak voltage from the exact lattice flux, Q omega (K/X) integral |flux| dx.

    The axial integral is done on two grid levels (``panels`` and twice that);
    a relative change above ``rtol`` raises ConvergenceError.
    """
    if Q <= 0 or K < 0 or omega_A <= 0:
        raise DomainError("need Q > 0, K >= 0, omega_A > 0")
    scale = Q * omega_A * K / layout.X * _prefactor(species.gamma_I)
    coarse = scale * _flux_integral(layout, order, panels)
    fine = scale * _flux_integral(layout, order, 2 * panels)
    ref = max(abs(fine), 1e-300)
    rel = abs(fine - coarse) / ref if fine or coarse else 0.0
    if rel > rtol:
        raise ConvergenceError(
            f"axial quadrature not converged: levels differ by {rel:.3g} "
            f"(panels={panels}, order={order})")
    return BruteForceResult(fine, coarse, rel)


def geometry_factor(X, D, delta):
    """(X / pi D) log(X / (delta sqrt e))."""
    if min(X, D, delta) <= 0:
        raise DomainError("lengths must be positive")
    arg = X / (delta * math.sqrt(math.e))
    if arg <= 1.0:
        raise DomainError(f"X / (delta sqrt e) = {arg:.4g} <= 1: logarithm not positive")
    return X / (math.pi * D) * math.log(arg)


def analytic_signal(layout: SpinArrayLayout, species, Q, K_A_product, omega_A,
                    N_total=None):
    """Continuum estimate (mu0/4) Q K A omega (N/V_s) gamma hbar times the geometry factor."""
    N = layout.N if N_total is None else N_total
    G = geometry_factor(layout.X, layout.D, layout.delta)
    return (C.mu0 / 4.0 * Q * K_A_product * omega_A * N / layout.volume
            * species.gamma_I * C.hbar * G)


def macroscopic_signal(layout: SpinArrayLayout, species, Q, K_A_product, omega_A,
                       N_total=None):
    """The same estimate without the geometry factor (uniform magnetization)."""
    N = layout.N if N_total is None else N_total
    return (C.mu0 / 4.0 * Q * K_A_product * omega_A * N / layout.volume
            * species.gamma_I * C.hbar)


def lattice_sum(f, spacing, half_count):
    """Direct sum of f(spacing * p) for p = -half_count .. half_count."""
    p = np.arange(-half_count, half_count + 1)
    return float(np.sum(f(spacing * p)))


def poisson_zero_mode(f, spacing, half_count):
    """nu = 0 term of the Poisson-summed lattice sum: (1/spacing) times the integral of f."""
    W = (half_count + 0.5) * spacing
    val, _ = integrate.quad(f, -W, W, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val / spacing


def gaussian_aliasing_bound(sigma, spacing, terms=50):
    """Size of the dropped nu != 0 terms for a Gaussian of width sigma on an infinite lattice."""
    nu = np.arange(1, terms + 1)
    q = 2.0 * math.pi ** 2 * sigma ** 2 / spacing ** 2
    return 2.0 * sigma * math.sqrt(2.0 * math.pi) / spacing * float(np.sum(np.exp(-q * nu * nu)))


def poisson_gaussian_check(sigma=1.5, spacing=1.0, half_count=40):
    """(direct, nu=0 estimate, aliasing bound) for a Gaussian test function."""
    def f(x):
        return np.exp(-np.asarray(x) ** 2 / (2.0 * sigma ** 2))

    return (lattice_sum(f, spacing, half_count), poisson_zero_mode(f, spacing, half_count),
            gaussian_aliasing_bound(sigma, spacing))


# Test grid of aspect ratios (X/D, X/delta) for the cross-validation
VALIDATION_GRID = tuple((rd, rdl) for rd in (10, 30, 100) for rdl in (1e2, 1e3, 1e4))


def design_layout(l_x=20e-9, l_y=50e-9, d=20e-9, L=1000, N0=100, n=16, p=63):
    """Array of the planar register: one resonant spin per L-qubit chain.

    The coil thickness is taken as 2 d (spins at depth d below the gate
    plane), the smallest cross-section enclosing the donor layer.
    """
    n_even = n + (n % 2)
    p_even = p * N0 + (p * N0) % 2
    return SpinArrayLayout(n_even, p_even, L * l_x, l_y, 2.0 * d)
