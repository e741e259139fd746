import numpy as np
import pytest

from superres.core.errors import ConfigError, DomainError, FitError
from superres.core.rng import stream_generator
from superres.readout.histogram import (
    assignment_fidelity, crossing_threshold, fit_double_gaussian, histogram,
)
from superres.readout.snr import (
    SsrModel, StdReadoutModel, flip_probability, noise_budget, readout_variance, snr_ssr,
    snr_standard,
)
from superres.readout.trace import (
    DOWN, UP, SsrTraceModel, digitize, dwell_runs, dwell_times, fit_lifetime, sample_mixture,
    simulate_ssr_trace,
)

SHOT_TIME = 20.0 / 4400


class TestSnr:
    def test_standard_readout(self):
        assert snr_standard(StdReadoutModel()) == pytest.approx(37.57, abs=0.01)

    def test_ssr_readout(self):
        assert snr_ssr(SsrModel()) == pytest.approx(72.66, abs=0.01)

    def test_noise_budget_at_dark_state(self):
        model = SsrModel()
        budget = noise_budget(model, 0.0, flip_probability(model, 0.0))
        assert budget.sigma_psn == pytest.approx(0.011339, rel=1e-4)
        assert budget.sigma_qpn == pytest.approx(0.024, rel=1e-9)
        assert budget.sigma_total == pytest.approx(0.026544, rel=1e-4)
        assert budget.qpn_variance_fraction == pytest.approx(0.024 ** 2 / 0.026544 ** 2, rel=1e-3)

    def test_flip_probability(self):
        model = SsrModel()
        assert flip_probability(model, 0.0) == pytest.approx(0.10)
        assert flip_probability(model, 1.0) == pytest.approx(0.70)
        with pytest.raises(DomainError):
            flip_probability(model, 1.2)

    def test_readout_variance(self):
        # sigma_psn^2 / ((mu_b - mu_d)(f0 - f_pi))^2
        assert readout_variance(SsrModel(), 0.0) == pytest.approx(0.18 / 1400 / 0.048 ** 2)

    def test_invalid_models(self):
        with pytest.raises(ConfigError):
            SsrModel(mu_bright=0.1, mu_dark=0.2)
        with pytest.raises(ConfigError):
            SsrModel(f0=0.05)
        with pytest.raises(ConfigError):
            StdReadoutModel(n_bar=0.0)


class TestHistogram:
    def test_symmetric_threshold(self):
        means, widths, weights = (-0.3, 0.3), (0.1, 0.1), (0.5, 0.5)
        threshold = crossing_threshold(means, widths, weights)
        assert threshold == pytest.approx(0.0, abs=1e-9)
        assert assignment_fidelity(means, widths, threshold) == pytest.approx(0.998650, abs=1e-6)

    def test_fit_of_sampled_mixture(self):
        rng = stream_generator(5, 0)
        values = np.concatenate([rng.normal(-0.3, 0.1, 40000), rng.normal(0.3, 0.1, 60000)])
        fit = fit_double_gaussian(*histogram(values, 100, (-1.0, 1.0)))
        assert fit.converged
        assert fit.means[0] == pytest.approx(-0.3, abs=0.01)
        assert fit.means[1] == pytest.approx(0.3, abs=0.01)
        assert fit.weights[1] == pytest.approx(0.6, abs=0.02)
        assert fit.fidelity == pytest.approx(0.99865, abs=0.001)

    def test_empty_histogram(self):
        fit = fit_double_gaussian(np.linspace(-1, 1, 10), np.zeros(10))
        assert not fit.converged


class TestTrace:
    def test_predicted_fidelity(self):
        assert SsrTraceModel().predicted_fidelity() == pytest.approx(0.9969, abs=5e-4)

    def test_mixture_fit_reaches_predicted_fidelity(self):
        model = SsrTraceModel()
        values, states = sample_mixture(model, 100000, 11)
        assert set(np.unique(states)) == {DOWN, UP}
        fit = fit_double_gaussian(*histogram(values, 100))
        assert fit.fidelity == pytest.approx(model.predicted_fidelity(), abs=2e-3)

    def test_digitize(self):
        values = [0.5, 0.05, -0.05, -0.5, 0.05]
        np.testing.assert_array_equal(digitize(values), [1, 1, 0, 0, 1])
        np.testing.assert_array_equal(digitize(values, 0.0, 0.1), [1, 1, 1, 0, 0])

    def test_dwell_runs_drop_censored_ends(self):
        runs = dwell_runs([0, 0, 1, 1, 1, 0, 0, 0, 1, 0])
        np.testing.assert_array_equal(runs[UP], [3, 1])
        np.testing.assert_array_equal(runs[DOWN], [3])
        times = dwell_times([0, 0, 1, 1, 1, 0, 0, 0, 1, 0], 0.5)
        np.testing.assert_allclose(times[UP], [1.5, 0.5])

    def test_lifetime_from_geometric_dwells(self):
        lifetime = 60e-3
        rng = stream_generator(3, 0)
        runs = rng.geometric(-np.expm1(-SHOT_TIME / lifetime), 20000)
        fit = fit_lifetime(runs * SHOT_TIME, SHOT_TIME)
        assert fit.n_dwells == 20000
        assert fit.lifetime == pytest.approx(lifetime, rel=0.03)
        assert 0 < fit.std_error < 0.01 * lifetime
        assert fit.ks_pvalue > 0.01

    def test_lifetime_needs_dwells(self):
        with pytest.raises(FitError):
            fit_lifetime([SHOT_TIME], SHOT_TIME)
        with pytest.raises(FitError):
            fit_lifetime([SHOT_TIME] * 5, SHOT_TIME)

    def test_simulated_trace_is_reproducible(self):
        model = SsrTraceModel()
        first = simulate_ssr_trace(model, 2000, 42, stream_id=9)
        second = simulate_ssr_trace(model, 2000, 42, stream_id=9)
        np.testing.assert_array_equal(first.i_norm, second.i_norm)
        assert first.i_norm.shape == (2000,)
        assert np.all((first.up_fraction >= 0) & (first.up_fraction <= 1))

    def test_simulated_trace_recovers_lifetime(self):
        model = SsrTraceModel()
        trace = simulate_ssr_trace(model, 20000, 7)
        states = digitize(trace.i_norm, 0.0, 0.14)
        assert np.mean(states != trace.states) < 0.06
        dwells = dwell_times(states, model.shot_time)
        fit = fit_lifetime(np.concatenate([dwells[UP], dwells[DOWN]]), model.shot_time)
        assert fit.lifetime == pytest.approx(60e-3, rel=0.15)

    def test_invalid_trace_model(self):
        with pytest.raises(ConfigError):
            SsrTraceModel(photons_bright=0.1)
        with pytest.raises(ConfigError):
            simulate_ssr_trace(SsrTraceModel(), 0, 1)
