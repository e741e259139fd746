import numpy as np
import pytest

from superres.core.errors import DomainError
from superres.core.model import EffectiveSignal
from superres.core.units import hz_to_rad
from superres.sensing.probability import (
    calibration_probability, contrast, contrast_probability, expansion_coefficients,
    expansion_for, first_contrast_zero, fit_calibration, half_sinc, half_sinc_derivative,
    small_delta_r_probability, transition_probability, transition_probability_decohered,
    transition_probability_partials,
)

from conftest import AMPLITUDE, DELTA_S, T_SR


def test_half_sinc_at_zero_detuning():
    assert half_sinc(0.0, 2e-5) == pytest.approx(1e-5)
    assert half_sinc(1e3, 2e-5) == pytest.approx(np.sin(1e-2) / 1e3, rel=1e-12)


def test_half_sinc_derivative_matches_finite_difference():
    t = 60e-6
    for delta in (500.0, 5000.0, hz_to_rad(12500.0)):
        h = 1e-4 * delta
        numeric = (half_sinc(delta + h, t) - half_sinc(delta - h, t)) / (2 * h)
        assert float(half_sinc_derivative(delta, t)) == pytest.approx(numeric, rel=1e-6)


def test_zero_at_start_and_at_superresolution(reference_eff):
    assert transition_probability(reference_eff, 0.0) == 0.0
    assert transition_probability(reference_eff, T_SR) < 1e-12


def test_probability_bounds(reference_eff):
    times = np.linspace(0.0, 400e-6, 4001)
    for delta_r_hz in (0.0, 800.0, 3000.0, 9000.0):
        p = transition_probability(reference_eff.with_delta_r(hz_to_rad(delta_r_hz)), times)
        assert np.all(p >= 0.0)
        # 1/2 (1 - J0(0) min J0) is the largest value the Bessel product allows
        assert np.all(p <= 0.7015)


def test_negative_time_rejected(reference_eff):
    with pytest.raises(DomainError):
        transition_probability(reference_eff, -1e-6)
    with pytest.raises(DomainError):
        transition_probability_decohered(reference_eff, 1e-6, -1.0)


def test_decohered_probability(reference_eff):
    eff = reference_eff.with_delta_r(hz_to_rad(300.0))
    times = np.linspace(0.0, 100e-6, 11)
    np.testing.assert_allclose(transition_probability_decohered(eff, times, 0.0),
                               transition_probability(eff, times), rtol=1e-14, atol=0)
    assert transition_probability_decohered(eff, 50e-6, 1e7) == pytest.approx(0.5)


def test_contrast():
    point = contrast(0.25, 1e-5)
    assert point.contrast == 0.5
    with pytest.raises(DomainError):
        contrast(1.5)


def test_contrast_at_superresolution(reference_eff):
    assert contrast_probability(reference_eff, T_SR).contrast == pytest.approx(1.0, abs=1e-12)


def test_expansion_at_superresolution():
    expansion = expansion_coefficients(AMPLITUDE, DELTA_S, T_SR)
    assert expansion.a_t < 1e-12
    assert expansion.b_t == pytest.approx(1.16295e-8, rel=1e-3)
    assert expansion.b_t == pytest.approx((AMPLITUDE * T_SR / DELTA_S) ** 2, rel=1e-9)


def test_expansion_residual_is_fourth_order(reference_eff):
    t = 60e-6
    expansion = expansion_for(reference_eff, t)
    residuals = []
    for delta_r_hz in (50.0, 100.0):
        delta_r = hz_to_rad(delta_r_hz)
        exact = transition_probability(reference_eff.with_delta_r(delta_r), t)
        residuals.append(exact - expansion.probability(delta_r))
    assert residuals[1] / residuals[0] == pytest.approx(16.0, rel=0.05)


def test_expansion_vectorized_over_time():
    times = np.linspace(1e-6, 100e-6, 50)
    expansion = expansion_coefficients(AMPLITUDE, DELTA_S, times)
    assert expansion.a_t.shape == times.shape
    single = expansion_coefficients(AMPLITUDE, DELTA_S, times[17])
    assert expansion.b_t[17] == pytest.approx(single.b_t, rel=1e-12)
    with pytest.raises(DomainError):
        expansion_coefficients(AMPLITUDE, 0.0, times)


def test_small_delta_r_approximation(reference_eff):
    delta_r = hz_to_rad(100.0)
    exact = transition_probability(reference_eff.with_delta_r(delta_r), T_SR)
    approx = small_delta_r_probability(AMPLITUDE, DELTA_S, T_SR, delta_r)
    assert approx == pytest.approx(exact, rel=0.02)
    # at the superresolution time the form reads (A t / 2 pi)^2 delta_r^2 t^2
    assert approx == pytest.approx((AMPLITUDE * T_SR / (2 * np.pi)) ** 2 * (delta_r * T_SR) ** 2,
                                   rel=1e-9)


def test_partials_match_finite_differences(reference_eff):
    eff = reference_eff.with_delta_r(hz_to_rad(500.0))
    partials = transition_probability_partials(eff, T_SR)

    def central(shift, h):
        return (transition_probability(shift(h), T_SR)
                - transition_probability(shift(-h), T_SR)) / (2 * h)

    h = 1e-3 * eff.delta_r
    assert partials.d_delta_r == pytest.approx(
        central(lambda d: eff.with_delta_r(eff.delta_r + d), h), rel=1e-5)
    assert partials.d_delta_s == pytest.approx(
        central(lambda d: eff.with_delta_s(eff.delta_s + d), h), rel=1e-5)
    h = 1e-4 * AMPLITUDE
    assert partials.d_amplitude == pytest.approx(
        central(lambda d: eff.with_amplitude(AMPLITUDE + d), h), rel=1e-5)


def test_calibration_curve_and_first_zero():
    assert calibration_probability(AMPLITUDE, 0.0) == 0.0
    t0 = first_contrast_zero(AMPLITUDE)
    assert calibration_probability(AMPLITUDE, t0, tones=1) == pytest.approx(0.5, abs=1e-12)
    # two tones: P = 1/2 (1 - J0^2) reaches 1/2 at the same time
    assert calibration_probability(AMPLITUDE, t0, tones=2) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(DomainError):
        calibration_probability(AMPLITUDE, t0, tones=3)
    with pytest.raises(DomainError):
        first_contrast_zero(0.0)


@pytest.mark.parametrize('tones', [1, 2])
def test_calibration_fit_recovers_amplitude(tones):
    times = np.linspace(0.5e-6, 60e-6, 120)
    data = calibration_probability(AMPLITUDE, times, tones)
    fit = fit_calibration(times, data, tones)
    assert fit.amplitude == pytest.approx(AMPLITUDE, rel=1e-6)
    assert fit.residual_rms < 1e-8


def test_unequal_amplitudes_are_supported():
    eff = EffectiveSignal.from_detunings(AMPLITUDE, DELTA_S, hz_to_rad(200.0),
                                         amplitude_2=0.5 * AMPLITUDE)
    p = transition_probability(eff, np.linspace(0.0, 100e-6, 101))
    assert np.all((p >= 0.0) & (p <= 0.7015))
