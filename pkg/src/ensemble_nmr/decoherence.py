"""Closed-form decoherence and impurity budget for the donor register.

Dipolar estimates use the generic nuclear and electron gyromagnetic ratios
GAMMA_N and GAMMA_B from the constants table; override them per call.
Concentrations are in m^-3.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

from . import constants as C
from .errors import DomainError

DIPOLAR = C.mu0 / (4.0 * math.pi)

QUOTED_ESTIMATES = {
    "C_S": "C_S < 1e15 cm^-3",
    "C_N": "C_N < 2e18 cm^-3",
    "C_N_percent": "0.4e-2 %",
    "secular_shift": "~10 Hz",
    "magic_angle": "54.74 deg",
    "coherence_length": "~6.3e5 l_x",
}


@dataclass(frozen=True)
class ImpurityBudget:
    tau_D: float                 # s
    C_S: float = 0.0             # paramagnetic centres, m^-3
    C_N: float = 0.0             # nuclear-spin impurities, m^-3
    abundance: float = C.NATURAL_29SI_PERCENT  # %

    def __post_init__(self):
        if not self.tau_D > 0:
            raise DomainError("tau_D must be positive")
        if self.C_S < 0 or self.C_N < 0:
            raise DomainError("concentrations must be non-negative")
        if not 0 < self.abundance <= 100:
            raise DomainError("abundance must be in (0, 100] %")


def inhomogeneous_linewidth(C_S, gamma_N=C.GAMMA_N, gamma_B=C.GAMMA_B):
    """Nuclear line broadening by paramagnetic centres, rad/s."""
    if C_S < 0:
        raise DomainError("C_S must be non-negative")
    return DIPOLAR * gamma_N * gamma_B * C.hbar * C_S


def paramagnetic_limit(tau_D, gamma_N=C.GAMMA_N, gamma_B=C.GAMMA_B):
    """C_S at which the broadening equals 1/tau_D."""
    if not tau_D > 0:
        raise DomainError("tau_D must be positive")
    return 1.0 / (tau_D * DIPOLAR * gamma_N * gamma_B * C.hbar)


def nuclear_dipolar_rate(C_N, gamma_N=C.GAMMA_N):
    """Decoherence rate (mu0/4pi) gamma_N^2 hbar C_N from nuclear impurities, 1/s."""
    if C_N < 0:
        raise DomainError("C_N must be non-negative")
    return DIPOLAR * gamma_N ** 2 * C.hbar * C_N


@dataclass(frozen=True)
class NuclearImpurityLimit:
    C_N: float       # m^-3
    percent: float   # of silicon atoms


def allowed_nuclear_impurity(tau_D, gamma_N=C.GAMMA_N) -> NuclearImpurityLimit:
    """Largest C_N whose dipolar rate stays below 1/tau_D."""
    if not tau_D > 0:
        raise DomainError("tau_D must be positive")
    C_N = 4.0 * math.pi / (C.mu0 * gamma_N ** 2 * C.hbar * tau_D)
    return NuclearImpurityLimit(C_N, 100.0 * C_N / C.SI_ATOM_DENSITY)


def abundance_limit_percent(abundance):
    """Allowed residual fraction (%) of an isotope with natural ``abundance`` %."""
    if not 0 < abundance <= 100:
        raise DomainError("abundance must be in (0, 100] %")
    return 1e-2 * 100.0 / abundance


def cleaning_factor(tau_D, abundance=C.NATURAL_29SI_PERCENT, gamma_N=C.GAMMA_N):
    """Required isotopic depletion: natural abundance over the allowed percent."""
    return abundance / allowed_nuclear_impurity(tau_D, gamma_N).percent


def secular_shift(l_x, gamma_N=C.GAMMA_N, gamma_B=C.GAMMA_B):
    """Static dipolar shift of a nuclear line by a neighbour electron at l_x, Hz."""
    if not l_x > 0:
        raise DomainError("l_x must be positive")
    return DIPOLAR * gamma_N * gamma_B * C.hbar / l_x ** 3 / C.TWO_PI


def magic_angle():
    """Polar angle where 3 cos^2 theta - 1 vanishes, rad."""
    return math.acos(1.0 / math.sqrt(3.0))


def coherence_length(nu_J, l_x, tau_D):
    """Distance covered coherently by a pulse-driven state, 2 pi nu_J tau_D l_x, m."""
    if nu_J < 0 or l_x < 0 or tau_D < 0:
        raise DomainError("inputs must be non-negative")
    return C.TWO_PI * nu_J * tau_D * l_x


def pi_pulse_rabi(delta_omega, k):
    """Rabi frequency making a pi pulse a 2 pi k rotation for a spin detuned by delta_omega."""
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    return abs(delta_omega) / math.sqrt(4.0 * k * k - 1.0)


@dataclass(frozen=True)
class BudgetRow:
    mechanism: str
    value: float
    unit: str
    limit: float | None
    passed: bool | None
    note: str = ""


@dataclass(frozen=True)
class BudgetReport:
    tau_D: float
    gate_error_target: float
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r.passed is not False for r in self.rows)

    def to_dict(self):
        return {
            "tau_D_s": self.tau_D,
            "gate_error_target": self.gate_error_target,
            "passed": self.passed,
            "rows": [asdict(r) for r in self.rows],
            "notes": list(self.notes),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_table(self, notes=True):
        head = f"{'mechanism':<28}{'value':>14}  {'unit':<8}{'limit':>14}  status"
        lines = [head, "-" * len(head)]
        for r in self.rows:
            limit = "" if r.limit is None else f"{r.limit:.4e}"
            status = {True: "PASS", False: "FAIL", None: "info"}[r.passed]
            line = f"{r.mechanism:<28}{r.value:>14.4e}  {r.unit:<8}{limit:>14}  {status}"
            if r.note:
                line += f"  ({r.note})"
            lines.append(line)
        if notes:
            lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines)


def error_budget_report(geometry, impurities: ImpurityBudget, nu_J=C.NU_J,
                        gate_error_target=C.GATE_ERROR_TARGET,
                        gamma_N=C.GAMMA_N, gamma_B=C.GAMMA_B) -> BudgetReport:
    """Collect every budget item for a register geometry into one pass/fail table.

    ``geometry`` needs ``l_x`` and ``L`` (a RegisterGeometry works).
    """
    tau = impurities.tau_D
    rate_cap = 1.0 / tau
    tol = 1 + 1e-12
    rows = []

    dw = inhomogeneous_linewidth(impurities.C_S, gamma_N, gamma_B)
    rows.append(BudgetRow("paramagnetic broadening", dw, "rad/s", rate_cap,
                          dw <= rate_cap * tol,
                          f"C_S limit {paramagnetic_limit(tau, gamma_N, gamma_B) / C.per_cm3:.3g} cm^-3;"
                          f" quoted {QUOTED_ESTIMATES['C_S']}"))

    gn = nuclear_dipolar_rate(impurities.C_N, gamma_N)
    lim = allowed_nuclear_impurity(tau, gamma_N)
    rows.append(BudgetRow("nuclear impurity dipolar", gn, "1/s", rate_cap,
                          gn <= rate_cap * tol,
                          f"C_N limit {lim.C_N / C.per_cm3:.3g} cm^-3 = {lim.percent:.3g} %;"
                          f" quoted {QUOTED_ESTIMATES['C_N']}"))

    rows.append(BudgetRow("secular dipolar shift", secular_shift(geometry.l_x, gamma_N, gamma_B),
                          "Hz", None, None, "static, removable by calibration"))

    lam = coherence_length(nu_J, geometry.l_x, tau)
    span = geometry.L * geometry.l_x
    rows.append(BudgetRow("coherence length", lam, "m", span, lam >= span / tol,
                          "must cover one chain"))

    err = 1.0 / (tau * nu_J) if nu_J > 0 else math.inf
    rows.append(BudgetRow("error per gate", err, "", gate_error_target,
                          err <= gate_error_target * tol, "1/(tau_D nu_J)"))

    notes = [
        "gate-voltage thermal noise is not computed",
        f"29Si cleaning factor {cleaning_factor(tau, impurities.abundance, gamma_N):.3g}"
        f" for abundance {impurities.abundance} %",
    ]
    return BudgetReport(tau, gate_error_target, rows, notes)


DESIGN_IMPURITIES = ImpurityBudget(tau_D=1.0, C_S=1e15 * C.per_cm3, C_N=2e18 * C.per_cm3)
