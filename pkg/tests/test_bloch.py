import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ensemble_nmr.bloch import (MagnetizationVector, RelaxationTimes, bloch_derivative,
                                integrate_bloch, optimal_rf_amplitude,
                                rotating_frame_steady_state, steady_state_run)
from ensemble_nmr.donor import P31
from ensemble_nmr.errors import DomainError

import oracles

OMEGA_A = 1e3  # rad/s, scaled so that omega_A T stays large at desk-scale cost


def relax(T1, T2=None):
    return RelaxationTimes(T_perp_I=T1 if T2 is None else T2, T_par_I=T1)


def test_relaxation_times_validated():
    with pytest.raises(DomainError):
        RelaxationTimes(T_perp_I=0.0)
    with pytest.raises(DomainError):
        RelaxationTimes(T_par_I=-1.0)


def test_optimal_amplitude_values():
    r = relax(1e4)
    assert optimal_rf_amplitude(P31, r) == pytest.approx(1 / (P31.gamma_I * 1e4))
    assert optimal_rf_amplitude(P31, r) == pytest.approx(9.26e-13, rel=1e-2)
    # invariant under T_perp -> 4 T_perp, T_par -> T_par / 4
    a = optimal_rf_amplitude(P31, RelaxationTimes(T_perp_I=4.0, T_par_I=1.0))
    b = optimal_rf_amplitude(P31, RelaxationTimes(T_perp_I=1.0, T_par_I=4.0))
    assert a == pytest.approx(b)
    assert optimal_rf_amplitude(P31, relax(4.0)) == pytest.approx(
        optimal_rf_amplitude(P31, relax(1.0)) / 4)


@settings(max_examples=100, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(0, 10))
def test_derivative_matches_cross_product(mx, my, mz, t):
    b, w, wA = 1e-6, 900.0, 1e3
    r = relax(5.0, 2.0)
    M = MagnetizationVector(mx, my, mz, 0.7)
    got = bloch_derivative(M, P31, b, w, wA, t, r)
    field = np.array([2 * b * math.cos(w * t), 0.0, wA / P31.gamma_I])
    ref = P31.gamma_I * np.cross([mx, my, mz], field)
    ref -= np.array([mx / 2.0, my / 2.0, (mz - 0.7) / 5.0])
    assert np.allclose(got, ref, rtol=1e-12, atol=1e-12)


def test_free_precession_conserves_length():
    M0 = MagnetizationVector(0.6, 0.0, 0.8, 1.0)
    traj = integrate_bloch(M0, P31, 0.0, OMEGA_A, OMEGA_A, RelaxationTimes(), 0.5,
                           rtol=1e-10)
    assert np.allclose(np.linalg.norm(traj.M, axis=0), 1.0, atol=1e-7)
    # transverse phase advances at omega_A
    phase = np.unwrap(np.arctan2(traj.My, traj.Mx))
    assert abs(phase[-1] - phase[0]) == pytest.approx(OMEGA_A * 0.5, rel=1e-6)


def test_relaxation_returns_to_equilibrium():
    M0 = MagnetizationVector(1.0, 0.0, -1.0, 1.0)
    traj = integrate_bloch(M0, P31, 0.0, OMEGA_A, OMEGA_A, relax(0.2, 0.1), 1.0)
    assert traj.Mz[-1] == pytest.approx(1 - 2 * math.exp(-5), rel=1e-6)
    assert math.hypot(traj.Mx[-1], traj.My[-1]) == pytest.approx(math.exp(-10), abs=1e-8)


def test_rotating_frame_reference_matches_oracle():
    for f in (0.1, 1.0, 7.0):
        b = f / (P31.gamma_I * 3.0)
        assert rotating_frame_steady_state(1.0, P31.gamma_I, b, 3.0, 3.0) == pytest.approx(
            oracles.rotating_wave_amplitude(1.0, P31.gamma_I, b, 3.0, 3.0), rel=1e-12)
    # peak of the closed form sits at the optimal amplitude
    bs = np.linspace(0.2, 5, 2001) / (P31.gamma_I * 3.0)
    vals = [rotating_frame_steady_state(1.0, P31.gamma_I, b, 3.0, 3.0) for b in bs]
    assert bs[int(np.argmax(vals))] == pytest.approx(1 / (P31.gamma_I * 3.0), rel=5e-3)


def test_detuning_reduces_response():
    on = rotating_frame_steady_state(1.0, P31.gamma_I, 1e-9, 2.0, 2.0)
    off = rotating_frame_steady_state(1.0, P31.gamma_I, 1e-9, 2.0, 2.0, detuning=5.0)
    assert off < on


@pytest.mark.slow
@pytest.mark.parametrize("factor", [0.5, 3.0])
def test_lab_frame_steady_state_matches_rotating_wave(factor):
    T = 2e3 / OMEGA_A
    r = relax(T)
    b = factor * optimal_rf_amplitude(P31, r)
    got = steady_state_run(P31, b, OMEGA_A, r)
    ref = rotating_frame_steady_state(1.0, P31.gamma_I, b, T, T)
    assert got == pytest.approx(ref, rel=2e-2)


def test_steady_state_needs_relaxation():
    with pytest.raises(DomainError):
        steady_state_run(P31, 1e-9, OMEGA_A, RelaxationTimes())


def test_unscaled_run_rejected_before_allocation():
    r = relax(2.0)
    with pytest.raises(DomainError, match="omega_A"):
        steady_state_run(P31, 1e-9, 4.7e8, r)
