import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ensemble_nmr import constants as C
from ensemble_nmr.donor import (GAIN_WINDOW, P31, DonorSpecies, all_levels,
                                approximate_nuclear_frequencies, effective_rf_amplitude,
                                energy_level, gain_factor, magnetization_elements,
                                mixing_alpha, rabi_frequency, transition_frequencies)
from ensemble_nmr.errors import DomainError

import oracles

# frozen from oracles.donor_levels_by_mF at 1 T
FROZEN_A_PLUS_MHZ = 75.3086997139543
FROZEN_A_MINUS_MHZ = 40.691300286044985

fields = st.floats(min_value=1e-4, max_value=20.0)


def mhz(w):
    return w / C.TWO_PI / C.MHz


def test_frozen_nuclear_lines_at_one_tesla():
    ts = transition_frequencies(P31, 1.0)
    assert mhz(ts.omega_A_plus) == pytest.approx(FROZEN_A_PLUS_MHZ, rel=1e-12)
    assert mhz(ts.omega_A_minus) == pytest.approx(FROZEN_A_MINUS_MHZ, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(fields)
def test_levels_match_block_diagonalisation(B):
    ref = oracles.donor_levels_by_mF(P31.gamma_e, P31.gamma_I, P31.hyperfine_A, B)
    for key, E in ref.items():
        got = energy_level(P31, *key, B).energy
        assert got == pytest.approx(E, rel=1e-10, abs=1e-12 * P31.hyperfine_A)


@settings(max_examples=100, deadline=None)
@given(fields)
def test_sum_of_levels_is_trace(B):
    # trace of the Hamiltonian vanishes
    total = sum(l.energy for l in all_levels(P31, B).values())
    assert abs(total) < 1e-12 * P31.hyperfine_A


@settings(max_examples=100, deadline=None)
@given(fields)
def test_transition_sum_rules(B):
    ts = transition_frequencies(P31, B)
    assert ts.omega_S == pytest.approx(ts.omega_B - ts.omega_A_plus, rel=1e-12)
    assert ts.omega_D == pytest.approx(ts.omega_B - ts.omega_A_minus, rel=1e-12)
    # the two nuclear lines add up to the hyperfine splitting
    assert ts.omega_A_plus + ts.omega_A_minus == pytest.approx(
        P31.hyperfine_A / C.hbar, rel=1e-9)


def test_level_at_zero_field_is_hyperfine_pattern():
    lv = all_levels(P31, 0.0)
    A = P31.hyperfine_A
    assert lv[(0, 0)].energy == pytest.approx(-3 * A / 4)
    for key in ((1, 1), (1, 0), (1, -1)):
        assert lv[key].energy == pytest.approx(A / 4)


def test_transitions_undefined_at_zero_field():
    with pytest.raises(DomainError):
        transition_frequencies(P31, 0.0)


@pytest.mark.parametrize("F, mF", [(0, 1), (2, 0), (1, 2), (0, -1)])
def test_invalid_level_labels(F, mF):
    with pytest.raises(DomainError):
        energy_level(P31, F, mF, 1.0)


def test_negative_field_rejected():
    with pytest.raises(DomainError):
        energy_level(P31, 1, 1, -0.1)


def test_forbidden_flag():
    ts = transition_frequencies(P31, 1.0)
    assert ts.allowed["S"] is False
    assert all(ts.allowed[k] for k in ("A+", "A-", "B", "C", "D"))


def test_high_field_expansion_agrees_to_first_order():
    B = 5.0
    exact = transition_frequencies(P31, B)
    plus, minus = approximate_nuclear_frequencies(P31, B)
    # the second-order term is of relative size A / (gamma_e hbar B) ~ 1e-3
    assert plus == pytest.approx(exact.omega_A_plus, rel=3e-3)
    assert minus == pytest.approx(exact.omega_A_minus, rel=3e-2)


def test_gain_factor_values():
    assert 1 + gain_factor(P31, 1.0).eta == pytest.approx(4.4, rel=0.02)
    assert 1 + gain_factor(P31, 0.01).eta == pytest.approx(338, rel=0.02)


def test_gain_factor_window_flag():
    assert gain_factor(P31, 1.0).in_window
    assert not gain_factor(P31, 10.0).in_window
    assert not gain_factor(P31, 1e-3).in_window
    assert GAIN_WINDOW[0] < GAIN_WINDOW[1]


@pytest.mark.parametrize("B", [0.0, -1.0])
def test_gain_factor_requires_positive_field(B):
    with pytest.raises(DomainError):
        gain_factor(P31, B)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=1e-3, max_value=10.0))
def test_mixing_matches_eigenvector(B):
    proj = oracles.singlet_nuclear_projection(P31.gamma_e, P31.gamma_I, P31.hyperfine_A, B)
    alpha = mixing_alpha(P31, B)
    # <I_z> = (1 - alpha)/2 - alpha/2
    assert 0.5 - alpha == pytest.approx(proj, abs=1e-9)
    m00, m1m1 = magnetization_elements(P31, B)
    assert m00 / (P31.gamma_I * C.hbar) == pytest.approx(proj, abs=1e-9)
    assert m1m1 == pytest.approx(-P31.gamma_I * C.hbar / 2)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=1e-3, max_value=50.0))
def test_mixing_bounded_and_decreasing(B):
    a1, a2 = mixing_alpha(P31, B), mixing_alpha(P31, B * 1.1)
    assert 0 < a2 < a1 < 0.5


def test_mixing_at_zero_field_is_half():
    assert mixing_alpha(P31, 0.0) == pytest.approx(0.5)


@pytest.mark.parametrize("B", [0.05, 0.1, 0.5, 1.0, 2.0, 3.5])
def test_effective_amplitude_consistent_with_gain(B):
    # the matrix-element route and 1 + eta agree where X >> 1
    ratio = effective_rf_amplitude(P31, B, 1.0)
    assert ratio == pytest.approx(1 + gain_factor(P31, B).eta, rel=0.05)


def test_rabi_frequency_linear_in_b():
    assert rabi_frequency(P31, 1.0, 2e-4) == pytest.approx(2 * rabi_frequency(P31, 1.0, 1e-4))
    with pytest.raises(DomainError):
        effective_rf_amplitude(P31, 1.0, -1.0)


def test_species_validation():
    with pytest.raises(DomainError):
        DonorSpecies("bad", 1.0, 2.0, 1e-26)
    with pytest.raises(DomainError):
        DonorSpecies("bad", 2.0, 1.0, 0.0)
    assert P31.hyperfine_hz == pytest.approx(116e6)


def test_random_fields_eigenvalues_sorted():
    rng = np.random.default_rng(7)
    for B in rng.uniform(0.01, 5.0, 20):
        ev = oracles.donor_eigenvalues(P31.gamma_e, P31.gamma_I, P31.hyperfine_A, B)
        ours = np.sort([l.energy for l in all_levels(P31, B).values()])
        assert np.allclose(ours, ev, rtol=1e-10, atol=1e-12 * P31.hyperfine_A)
