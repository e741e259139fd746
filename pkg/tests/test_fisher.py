import math

import numpy as np
import pytest

from superres.core.errors import ConfigError, DomainError
from superres.core.model import EffectiveSignal, TwoToneSignal, ramsey_effective
from superres.core.units import hz_to_rad, rad_to_hz
from superres.estimation.fisher import (
    NoiseKind, NoiseModel, crb_curve, crb_uncertainty, decoherence_epsilon, decoherence_fi,
    epsilon_floor_fi, fisher_curve, fisher_information, ramsey_fi, superresolution_fi,
)
from superres.estimation.resolution import resolution_limit
from superres.sensing.probability import expansion_for

from conftest import AMPLITUDE, DECAY_RATE, DELTA_S, N_EXP, T_SR

T_OFF = 2.56 * math.pi / DELTA_S


class TestNoiseModel:
    def test_from_config(self):
        assert NoiseModel.from_config('qpn_only').kind is NoiseKind.QPN_ONLY
        model = NoiseModel.from_config({'decoherence': 769.2})
        assert model.kind is NoiseKind.DECOHERENCE
        assert model.value == pytest.approx(769.2)
        assert NoiseModel.from_config({'epsilon_floor': 1e-3}) == NoiseModel.epsilon(1e-3)

    @pytest.mark.parametrize('value', ['white', {'bogus': 1.0}, {'epsilon_floor': 1, 'x': 2}])
    def test_unknown_models(self, value):
        with pytest.raises(ConfigError):
            NoiseModel.from_config(value)

    def test_negative_parameter(self):
        with pytest.raises(DomainError):
            NoiseModel.epsilon(-0.1)

    def test_variances(self):
        assert NoiseModel.qpn_only().variance(0.25) == pytest.approx(0.1875)
        assert NoiseModel.epsilon(0.05).variance(0.25) == pytest.approx(0.3 * 0.7)
        assert NoiseModel.readout(0.01).variance(0.25) == pytest.approx(0.1975)


class TestFisherInformation:
    def test_limit_at_superresolution(self, reference_eff):
        result = fisher_information(reference_eff, T_SR, n_exp=N_EXP)
        assert result.status == 'limit'
        expected = 4.0 * AMPLITUDE ** 2 * T_SR ** 4 / (2 * math.pi) ** 2
        assert result.fi_per_shot == pytest.approx(expected, rel=1e-6)
        assert result.fi_per_shot == pytest.approx(superresolution_fi(AMPLITUDE, DELTA_S, T_SR),
                                                   rel=1e-9)

    def test_qpn_floor(self, reference_eff):
        result = fisher_information(reference_eff, T_SR, n_exp=N_EXP)
        assert result.crb_std == pytest.approx(12.76, rel=1e-3)
        assert rad_to_hz(crb_uncertainty(result)) == pytest.approx(2.03, rel=0.01)

    def test_inverse_square_time_scaling(self):
        times = np.array([80e-6, 160e-6, 320e-6])
        crbs = []
        for t in times:
            eff = EffectiveSignal.from_detunings(AMPLITUDE, 2 * math.pi / t, 0.0)
            crbs.append(fisher_information(eff, t, n_exp=N_EXP).crb_std)
        slope, _ = np.polyfit(np.log(times), np.log(crbs), 1)
        assert slope == pytest.approx(-2.0, abs=1e-6)

    def test_no_information_off_superresolution(self, reference_eff):
        eff = reference_eff.with_delta_r(hz_to_rad(10.0))
        on = fisher_information(eff, T_SR, n_exp=N_EXP).crb_std
        off = fisher_information(eff, T_OFF, n_exp=N_EXP).crb_std
        assert off > 10 * on

    def test_epsilon_floor_closed_form(self, reference_eff):
        delta_r = hz_to_rad(100.0)
        b_t = expansion_for(reference_eff, T_SR).b_t
        result = fisher_information(reference_eff.with_delta_r(delta_r), T_SR,
                                    noise=NoiseModel.epsilon(1e-3))
        assert result.fi_per_shot == pytest.approx(epsilon_floor_fi(b_t, delta_r, 1e-3), rel=0.05)
        assert epsilon_floor_fi(b_t, 0.0, 1e-3) == 0.0

    def test_decoherence_closed_form(self, reference_eff):
        delta_r = hz_to_rad(50.0)
        b_t = expansion_for(reference_eff, T_SR).b_t
        result = fisher_information(reference_eff.with_delta_r(delta_r), T_SR,
                                    noise=NoiseModel.decoherence(DECAY_RATE))
        closed = decoherence_fi(b_t, delta_r, DECAY_RATE, T_SR)
        assert result.fi_per_shot == pytest.approx(closed, rel=0.01)
        assert decoherence_epsilon(DECAY_RATE, T_SR) == pytest.approx(0.032743, rel=1e-4)

    def test_decay_rate_conflict(self, reference_eff):
        with pytest.raises(DomainError):
            fisher_information(reference_eff, T_SR, decay_rate=100.0,
                               noise=NoiseModel.decoherence(200.0))

    def test_no_information_gives_infinite_bound(self, reference_eff):
        result = fisher_information(reference_eff.with_delta_r(hz_to_rad(100.0)), 0.0)
        assert result.fi_per_shot == 0.0
        assert math.isinf(result.crb_std)

    def test_curve_matches_pointwise(self, reference_eff):
        eff = reference_eff.with_delta_r(hz_to_rad(300.0))
        times = np.linspace(10e-6, 100e-6, 7)
        curve = fisher_curve(eff, times)
        for t, value in zip(times, curve):
            assert value == pytest.approx(fisher_information(eff, t).fi_per_shot, rel=1e-9)

    def test_crb_curve(self, reference_eff):
        delta_rs = hz_to_rad(np.array([10.0, 100.0, 1000.0]))
        qpn = crb_curve(reference_eff, delta_rs, T_SR, N_EXP)
        decohered = crb_curve(reference_eff, delta_rs, T_SR, N_EXP,
                              noise=NoiseModel.decoherence(DECAY_RATE))
        assert qpn.shape == (3,)
        assert np.all(decohered > qpn)

    def test_ramsey_closed_form(self):
        assert ramsey_fi(2.0, 4.0, 3.0) == pytest.approx(4 * 4.0 * 9.0 / 16.0)

    def test_ramsey_bound_inverse_time_scaling(self):
        omega_s, delta_r = hz_to_rad(12500.0), hz_to_rad(1.0)
        amplitude = hz_to_rad(1000.0)
        eff = ramsey_effective(TwoToneSignal(amplitude, amplitude, omega_s + delta_r,
                                             omega_s - delta_r))
        times = 2 * math.pi * np.array([1, 2, 4, 8]) / omega_s
        crbs = [crb_curve(eff, [eff.delta_r], t, N_EXP)[0] for t in times]
        slope, _ = np.polyfit(np.log(times), np.log(crbs), 1)
        assert slope == pytest.approx(-1.0, abs=0.02)
        for t in times:
            assert fisher_information(eff, t).fi_per_shot == pytest.approx(
                ramsey_fi(amplitude, omega_s, t), rel=1e-4)

    # the closed forms are small-delta_r expansions, so agreement is checked where
    # (A delta_r t / delta_s)^2 stays below 1e-5
    @pytest.mark.parametrize('delta_r_hz', [0.05, 0.2, 1.0, 2.0])
    def test_numeric_path_matches_limit(self, reference_eff, delta_r_hz):
        near = fisher_information(reference_eff.with_delta_r(hz_to_rad(delta_r_hz)), T_SR)
        assert near.status == 'ok'
        assert near.fi_per_shot == pytest.approx(superresolution_fi(AMPLITUDE, DELTA_S, T_SR),
                                                 rel=1e-4)

    @pytest.mark.parametrize('delta_r_hz', [0.5, 2.0, 5.0])
    def test_epsilon_floor_matches_numeric(self, reference_eff, delta_r_hz):
        delta_r = hz_to_rad(delta_r_hz)
        b_t = expansion_for(reference_eff, T_SR).b_t
        result = fisher_information(reference_eff.with_delta_r(delta_r), T_SR,
                                    noise=NoiseModel.epsilon(1e-3))
        assert result.fi_per_shot == pytest.approx(epsilon_floor_fi(b_t, delta_r, 1e-3),
                                                   rel=1e-4)

    @pytest.mark.parametrize('delta_r_hz', [0.5, 2.0, 5.0])
    def test_decoherence_matches_numeric(self, reference_eff, delta_r_hz):
        delta_r = hz_to_rad(delta_r_hz)
        b_t = expansion_for(reference_eff, T_SR).b_t
        result = fisher_information(reference_eff.with_delta_r(delta_r), T_SR,
                                    noise=NoiseModel.decoherence(DECAY_RATE))
        closed = decoherence_fi(b_t, delta_r, DECAY_RATE, T_SR)
        assert result.fi_per_shot == pytest.approx(closed, rel=1e-4)


class TestResolutionLimit:
    def test_reference_value(self):
        result = resolution_limit(AMPLITUDE, DELTA_S, T_SR, DECAY_RATE, N_EXP)
        assert result.resolved
        assert rad_to_hz(result.delta_star) == pytest.approx(23.3, rel=0.02)
        assert result.crb_at_star == pytest.approx(result.delta_star, rel=1e-6)

    def test_quarter_power_scaling(self):
        low = resolution_limit(AMPLITUDE, DELTA_S, T_SR, DECAY_RATE, 1_000_000)
        high = resolution_limit(AMPLITUDE, DELTA_S, T_SR, DECAY_RATE, 16_000_000)
        assert high.delta_star / low.delta_star == pytest.approx(0.5, rel=0.02)

    def test_unresolvable(self):
        result = resolution_limit(AMPLITUDE, DELTA_S, T_SR, 1e5, 1)
        assert not result.resolved
        assert math.isnan(result.delta_star)

    def test_invalid_arguments(self):
        with pytest.raises(DomainError):
            resolution_limit(AMPLITUDE, DELTA_S, T_SR, -1.0, N_EXP)
        with pytest.raises(DomainError):
            resolution_limit(AMPLITUDE, 0.0, T_SR, DECAY_RATE, N_EXP)
