"""Configuration-level simulator of a frequency-addressed spin-chain automaton.

A chain of donor nuclear spins alternates between sublattices A (even sites)
and B (odd sites). In the ground state A spins point up and B spins down.
The resonance line of a site depends on its sublattice and on the summed
projection of its two nuclear neighbours, so a global pi pulse at one line
flips every site of that class at once (synchronous update). Spins are
definite up/down values; superpositions are out of scope.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Sequence

from . import constants as C
from .donor import P31
from .errors import AmbiguityError, DomainError, LayoutError, ParseError

UP, DOWN = 1, -1

# Logical codewords on an A, B, A, B window.
CODEWORDS = {0: (DOWN, UP, UP, DOWN), 1: (UP, DOWN, DOWN, UP)}
# Six-spin control unit starting on a B site.
CONTROL_UNIT = (UP, DOWN, DOWN, UP, UP, DOWN)

PORT_OFFSET_UNITS = 5.0  # port line offset in units of I_n / hbar


def sublattice(index):
    return "A" if index % 2 == 0 else "B"


def ground_orientation(index):
    return UP if index % 2 == 0 else DOWN


@dataclass(frozen=True)
class SpinChain:
    states: tuple                       # +1 / -1 per site
    ports: frozenset = frozenset()
    boundary: str = "fixed"

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(int(s) for s in self.states))
        object.__setattr__(self, "ports", frozenset(self.ports))
        if any(s not in (UP, DOWN) for s in self.states):
            raise DomainError("site states must be +1 or -1")
        if self.boundary not in ("fixed", "open"):
            raise DomainError(f"unknown boundary policy {self.boundary!r}")
        bad = [p for p in self.ports if not 0 <= p < len(self.states)]
        if bad:
            raise LayoutError(f"port indices out of range: {sorted(bad)}")

    def __len__(self):
        return len(self.states)

    def projection(self, index):
        """Nuclear z-projection of site ``index``; phantom sites past the ends."""
        if 0 <= index < len(self.states):
            return 0.5 * self.states[index]
        if self.boundary == "fixed":
            return 0.5 * ground_orientation(index)
        return 0.0

    def neighbour_sum(self, index):
        return self.projection(index - 1) + self.projection(index + 1)

    def with_states(self, states):
        return replace(self, states=tuple(states))

    def flipped(self, indices):
        s = list(self.states)
        for i in indices:
            s[i] = -s[i]
        return self.with_states(s)


def ground_state(length: int, ports: Sequence[int] = (), boundary="fixed") -> SpinChain:
    if length < 4:
        raise DomainError("chain length must be >= 4")
    return SpinChain(tuple(ground_orientation(i) for i in range(length)),
                     frozenset(ports), boundary)


@dataclass(frozen=True)
class ChainCouplings:
    A: float                      # hyperfine energy, J
    J_ex: float                   # exchange, J
    B: float                      # field, T
    I_n: float | None = None      # indirect nuclear coupling, J; default A^2 / J_ex
    gamma_I: float = P31.gamma_I
    port_offset: float | None = None  # rad/s; default 5 I_n / hbar

    def __post_init__(self):
        if min(self.A, self.J_ex, self.B, self.gamma_I) <= 0:
            raise DomainError("couplings and field must be positive")
        if self.I_n is None:
            object.__setattr__(self, "I_n", self.A ** 2 / self.J_ex)
        if self.port_offset is None:
            object.__setattr__(self, "port_offset",
                               PORT_OFFSET_UNITS * self.I_n / C.hbar)
        if not self.I_n > 0:
            raise DomainError("I_n must be positive")
        zeeman = self.gamma_I * C.hbar * self.B
        if self.I_n > 0.1 * min(zeeman, self.A / 2.0):
            raise DomainError("I_n must be small against gamma_I hbar B and A/2")

    @property
    def splitting(self):
        """Line shift per unit change of the neighbour sum, rad/s."""
        return self.I_n / C.hbar


def design_couplings(B=1.0):
    return ChainCouplings(A=P31.hyperfine_A, J_ex=6.5e-23, B=B)


def line_frequency(couplings: ChainCouplings, sub, m_sum, port=False):
    """Resonance of a sublattice-``sub`` site with neighbour sum ``m_sum``, rad/s."""
    sign = 1.0 if sub == "A" else -1.0
    c = couplings
    w = abs(c.gamma_I * C.hbar * c.B + sign * c.A / 2.0 - c.I_n * m_sum) / C.hbar
    return w + c.port_offset if port else w


def site_frequency(chain: SpinChain, site: int, couplings: ChainCouplings):
    if not 0 <= site < len(chain):
        raise DomainError(f"site {site} outside the chain")
    return line_frequency(couplings, sublattice(site), chain.neighbour_sum(site),
                          site in chain.ports)


def frequency_classes(chain: SpinChain, couplings):
    """Distinct (sublattice, neighbour sum, port) classes present, with their lines."""
    out = {}
    for i in range(len(chain)):
        key = (sublattice(i), chain.neighbour_sum(i), i in chain.ports)
        out[key] = line_frequency(couplings, *key)
    return out


def possible_lines(chain: SpinChain, couplings):
    """Every line the chain could show in any configuration."""
    sums = (-1.0, -0.5, 0.0, 0.5, 1.0) if chain.boundary == "open" else (-1.0, 0.0, 1.0)
    kinds = {(sublattice(i), i in chain.ports) for i in range(len(chain))}
    return sorted({line_frequency(couplings, sub, m, port)
                   for sub, port in kinds for m in sums})


def apply_pulse(chain: SpinChain, target_frequency, tolerance, couplings,
                order: Sequence[int] | None = None) -> SpinChain:
    """Global pi pulse: flip every site whose pre-pulse line is within tolerance.

    Lines are all taken from the pre-pulse configuration, so ``order`` (the
    site visiting order) cannot change the result. Raises AmbiguityError if
    the window could hold two distinct lines.
    """
    lines = possible_lines(chain, couplings)
    gap = min((b - a for a, b in zip(lines, lines[1:])), default=math.inf)
    if not tolerance < gap / 2.0:
        raise AmbiguityError(
            f"tolerance {tolerance:.4g} rad/s not below half the line gap {gap:.4g} rad/s")
    pre = [site_frequency(chain, i, couplings) for i in range(len(chain))]
    idx = range(len(chain)) if order is None else order
    if sorted(idx) != list(range(len(chain))):
        raise DomainError("order must be a permutation of the site indices")
    states = list(chain.states)
    for i in idx:
        if abs(pre[i] - target_frequency) <= tolerance:
            states[i] = -chain.states[i]
    return chain.with_states(states)


def default_tolerance(couplings):
    return 0.25 * couplings.splitting


def encode_logical(bit: int):
    if bit not in CODEWORDS:
        raise DomainError("logical bit must be 0 or 1")
    return CODEWORDS[bit]


def decode_logical(pattern):
    """0 or 1 for a valid codeword, None otherwise."""
    p = tuple(int(s) for s in pattern)
    for bit, word in CODEWORDS.items():
        if p == word:
            return bit
    return None


def control_unit_pattern():
    return CONTROL_UNIT


@dataclass(frozen=True)
class RegisterLayout:
    length: int
    qubits: tuple = ()          # start indices of 4-site codeword windows (A sites)
    control_units: tuple = ()   # start indices of 6-site units (B sites)


def validate_layout(layout: RegisterLayout):
    """Check alignment, overlap and odd spacer counts between units."""
    blocks = [(s, 4, "qubit") for s in layout.qubits]
    blocks += [(s, 6, "control unit") for s in layout.control_units]
    for s, w, kind in blocks:
        if s < 0 or s + w > layout.length:
            raise LayoutError(f"{kind} at {s} does not fit in {layout.length} sites")
    for s in layout.qubits:
        if sublattice(s) != "A":
            raise LayoutError(f"qubit window at {s} must start on an A site")
    for s in layout.control_units:
        if sublattice(s) != "B":
            raise LayoutError(f"control unit at {s} must start on a B site")
    blocks.sort()
    for (s1, w1, k1), (s2, _, k2) in zip(blocks, blocks[1:]):
        spacers = s2 - (s1 + w1)
        if spacers < 0:
            raise LayoutError(f"{k1} at {s1} overlaps {k2} at {s2}")
        if k1 != k2 and spacers % 2 == 0:
            raise LayoutError(f"{k1} at {s1} and {k2} at {s2} separated by "
                              f"{spacers} spacers; an odd number is required")
    return True


def build_register(layout: RegisterLayout, bits=None, ports=(), boundary="fixed"):
    """Ground-state chain with codewords and control units written in."""
    validate_layout(layout)
    bits = list(bits) if bits is not None else [0] * len(layout.qubits)
    if len(bits) != len(layout.qubits):
        raise DomainError("one bit per qubit window is required")
    states = list(ground_state(layout.length).states)
    for s, bit in zip(layout.qubits, bits):
        states[s:s + 4] = encode_logical(bit)
    for s in layout.control_units:
        states[s:s + 6] = CONTROL_UNIT
    return SpinChain(tuple(states), frozenset(ports), boundary)


def neel_temperature(J_ex):
    """Ordering temperature J / k of the exchange-coupled electrons, K."""
    if J_ex < 0:
        raise DomainError("J must be non-negative")
    return J_ex / C.k_B


@dataclass(frozen=True)
class Pulse:
    frequency: float   # rad/s
    tolerance: float   # rad/s
    label: str = ""


@dataclass(frozen=True)
class PortSchedule:
    port: int
    target: int
    pulses: tuple = field(default_factory=tuple)

    def __len__(self):
        return len(self.pulses)


def execute_schedule(chain: SpinChain, pulses, couplings) -> SpinChain:
    for p in pulses:
        chain = apply_pulse(chain, p.frequency, p.tolerance, couplings)
    return chain


def _conditional(chain, control, target, couplings, tol, label):
    """Pulse flipping ``target`` iff ``control`` is up; other neighbour as is."""
    trial = list(chain.states)
    trial[control] = UP
    m = SpinChain(tuple(trial), chain.ports, chain.boundary).neighbour_sum(target)
    w = line_frequency(couplings, sublattice(target), m, target in chain.ports)
    return Pulse(w, tol, label)


def _swap_pulses(chain, port, target, couplings, tol):
    """Three conditional flips exchanging the port and target states."""
    pulses = []
    for c, t, lab in ((port, target, "cnot port->target"),
                      (target, port, "cnot target->port"),
                      (port, target, "cnot port->target")):
        p = _conditional(chain, c, t, couplings, tol, lab)
        pulses.append(p)
        chain = apply_pulse(chain, p.frequency, p.tolerance, couplings)
    return pulses, chain


def _flip_port(chain, port, couplings, tol, label):
    return Pulse(site_frequency(chain, port, couplings), tol, label)


SEARCH_MAX_SITES = 16


def _target(chain, port):
    if port not in chain.ports:
        raise LayoutError(f"site {port} is not a port")
    for t in (port + 1, port - 1):
        if 0 <= t < len(chain):
            return t
    raise LayoutError(f"port {port} has no neighbour to exchange with")


def _search(chain, goal, couplings, tol):
    """Shortest pulse sequence taking ``chain`` to the ``goal`` states (BFS)."""
    lines = possible_lines(chain, couplings)
    prev = {chain.states: None}
    queue = deque([chain.states])
    while queue:
        s = queue.popleft()
        if s == goal:
            break
        cur = chain.with_states(s)
        for w in lines:
            nxt = apply_pulse(cur, w, tol, couplings).states
            if nxt not in prev:
                prev[nxt] = (s, w)
                queue.append(nxt)
    if goal not in prev:
        return None
    seq, s = [], goal
    while prev[s] is not None:
        s, w = prev[s]
        seq.append(Pulse(w, tol, "search"))
    return seq[::-1]


def port_io_sequence(chain: SpinChain, port: int, data_bit: int, couplings) -> PortSchedule:
    """Pulse schedule writing ``data_bit`` (1 = up) into the port's neighbour.

    Set the port spin, exchange it with the neighbour by three conditional
    flips, then restore the port. The schedule is simulated on ``chain``; if
    it disturbs any other site (an interior port also shifts the line of its
    second neighbour), a breadth-first search over global pulses finds the
    shortest clean sequence for chains up to SEARCH_MAX_SITES.
    """
    if data_bit not in (0, 1):
        raise DomainError("data bit must be 0 or 1")
    target = _target(chain, port)
    tol = default_tolerance(couplings)
    want = UP if data_bit else DOWN
    pulses, cur = [], chain
    if cur.states[port] != want:
        p = _flip_port(cur, port, couplings, tol, "set port")
        pulses.append(p)
        cur = apply_pulse(cur, p.frequency, p.tolerance, couplings)
    swap, cur = _swap_pulses(cur, port, target, couplings, tol)
    pulses += swap
    if cur.states[port] != chain.states[port]:
        p = _flip_port(cur, port, couplings, tol, "reset port")
        pulses.append(p)
        cur = apply_pulse(cur, p.frequency, p.tolerance, couplings)
    goal = list(chain.states)
    goal[target] = want
    goal = tuple(goal)
    if cur.states == goal:
        return PortSchedule(port, target, tuple(pulses))
    if len(chain) > SEARCH_MAX_SITES:
        raise LayoutError(f"exchange through port {port} disturbs other sites")
    found = _search(chain, goal, couplings, tol)
    if found is None:
        raise LayoutError(f"no pulse sequence writes site {target} through port {port}")
    return PortSchedule(port, target, tuple(found))


def port_read(chain: SpinChain, port: int, couplings):
    """Read the port neighbour: exchange into the port, read, undo.

    Every global pulse is its own inverse (it only flips sites of one
    sublattice, whose lines depend on the other one), so replaying the
    exchange pulses in reverse restores the chain. The pulses must move
    either value of the neighbour into the port; LayoutError otherwise.
    Returns (bit, schedule, final chain).
    """
    target = _target(chain, port)
    tol = default_tolerance(couplings)
    swap, mid = _swap_pulses(chain, port, target, couplings, tol)
    for v in (UP, DOWN):
        probe = list(chain.states)
        probe[target] = v
        end = execute_schedule(chain.with_states(probe), swap, couplings)
        if end.states[port] != v:
            raise LayoutError(f"exchange through port {port} does not carry site {target}")
    bit = 1 if mid.states[port] == UP else 0
    back = tuple(reversed(swap))
    end = execute_schedule(mid, back, couplings)
    return bit, PortSchedule(port, target, tuple(swap) + back), end


_ARROWS = {(True, UP): "↑", (True, DOWN): "↓", (False, UP): "⇑", (False, DOWN): "⇓"}
_FROM_ARROW = {v: k for k, v in _ARROWS.items()}


def chain_to_text(chain: SpinChain) -> str:
    """One token per site: sublattice (D for ports) and arrow.

    Single arrows mark the ground orientation, double arrows a flipped site;
    ports always use single arrows.
    """
    toks = []
    for i, s in enumerate(chain.states):
        if i in chain.ports:
            toks.append("D" + ("↑" if s == UP else "↓"))
        else:
            toks.append(sublattice(i) + _ARROWS[(s == ground_orientation(i), s)])
    return f"boundary={chain.boundary}\n" + " ".join(toks) + "\n"


def chain_from_text(text: str) -> SpinChain:
    lines = text.splitlines()
    if len(lines) < 2 or not lines[0].startswith("boundary="):
        raise ParseError("expected 'boundary=...' header and a token line", 1, 1)
    boundary = lines[0].split("=", 1)[1].strip()
    states, ports = [], set()
    col = 1
    for tok in lines[1].split(" "):
        if not tok:
            col += 1
            continue
        i = len(states)
        if len(tok) != 2:
            raise ParseError(f"bad site token {tok!r}", 2, col)
        letter, arrow = tok
        if letter == "D" and arrow in "↑↓":
            states.append(UP if arrow == "↑" else DOWN)
            ports.add(i)
        elif letter in "AB" and arrow in _FROM_ARROW and letter == sublattice(i):
            ground, s = _FROM_ARROW[arrow]
            if (s == ground_orientation(i)) != ground:
                raise ParseError(f"arrow {arrow} inconsistent with site {i}", 2, col)
            states.append(s)
        else:
            raise ParseError(f"bad site token {tok!r} at site {i}", 2, col)
        col += len(tok) + 1
    return SpinChain(tuple(states), frozenset(ports), boundary)


def schedule_to_text(schedule: PortSchedule) -> str:
    rows = [f"port={schedule.port} target={schedule.target}"]
    rows += [f"pulse {p.frequency:.9e} {p.tolerance:.9e} {p.label}" for p in schedule.pulses]
    return "\n".join(rows) + "\n"
