import math

import numpy as np
import pytest

from superres.core.errors import DomainError
from superres.core.units import hz_to_rad, rad_to_hz
from superres.estimation.estimator import (
    TABLE_COLUMNS, Method, contrast_curve, estimate_delta_r, propagate_uncertainty,
    records_frame,
)

from conftest import AMPLITUDE, DELTA_S, T_SR

D_DELTA_S = hz_to_rad(77.0)
D_AMPLITUDE = hz_to_rad(100.0)


def propagate(contrast, d_contrast, method=Method.AUTO, hint_hz=None):
    return propagate_uncertainty(contrast, d_contrast, AMPLITUDE, D_AMPLITUDE, DELTA_S,
                                 D_DELTA_S, T_SR, method,
                                 hint=None if hint_hz is None else hz_to_rad(hint_hz))


def test_contrast_curve():
    assert float(contrast_curve(AMPLITUDE, DELTA_S, T_SR, 0.0)) == pytest.approx(1.0, abs=1e-12)
    curve = contrast_curve(AMPLITUDE, DELTA_S, T_SR, hz_to_rad(np.array([250.0, 500.0])))
    assert curve[0] > curve[1]
    assert curve[1] == pytest.approx(0.789, abs=0.005)


@pytest.mark.parametrize('delta_r_hz', [1.0, 5.0, 40.0, 250.0, 700.0, 1200.0])
def test_exact_inverts_contrast(delta_r_hz):
    delta_r = hz_to_rad(delta_r_hz)
    value = float(contrast_curve(AMPLITUDE, DELTA_S, T_SR, delta_r))
    estimate = estimate_delta_r(value, AMPLITUDE, DELTA_S, T_SR, Method.EXACT)
    assert estimate.status == 'ok'
    assert estimate.value == pytest.approx(delta_r, rel=1e-9)


# past the first contrast minimum the same contrast is reached on the way down as well
@pytest.mark.parametrize('delta_r_hz', [2300.0, 2583.1, 2650.0])
def test_exact_inverts_contrast_on_second_branch(delta_r_hz):
    delta_r = hz_to_rad(delta_r_hz)
    value = float(contrast_curve(AMPLITUDE, DELTA_S, T_SR, delta_r))
    estimate = estimate_delta_r(value, AMPLITUDE, DELTA_S, T_SR, Method.EXACT, hint=delta_r)
    assert estimate.ambiguous
    assert estimate.roots[0] < 0.8 * delta_r
    assert estimate.value == pytest.approx(delta_r, rel=1e-9)


def test_approx_estimate():
    estimate = estimate_delta_r(0.9428, AMPLITUDE, DELTA_S, T_SR, Method.APPROX)
    # |delta_s| / (A t) sqrt((1 - C) / 2)
    expected = DELTA_S / (AMPLITUDE * T_SR) * math.sqrt(0.0286)
    assert estimate.value == pytest.approx(expected, rel=1e-12)
    assert estimate.valid


def test_approx_invalid_at_low_contrast():
    assert not estimate_delta_r(0.0555, AMPLITUDE, DELTA_S, T_SR, Method.APPROX).valid


def test_hint_selects_the_nearest_root():
    estimate = estimate_delta_r(0.0555, AMPLITUDE, DELTA_S, T_SR, Method.EXACT,
                                hint=hz_to_rad(2500.0))
    assert estimate.ambiguous
    assert len(estimate.roots) >= 2
    assert rad_to_hz(estimate.value) == pytest.approx(2583.1, rel=0.01)


def test_contrast_at_the_floor():
    estimate = estimate_delta_r(1.0, AMPLITUDE, DELTA_S, T_SR)
    assert estimate.value == 0.0
    assert estimate.status in ('ok', 'floor')


def test_unreachable_contrast():
    estimate = estimate_delta_r(-0.9, AMPLITUDE, DELTA_S, T_SR)
    assert estimate.status == 'no_root'
    assert math.isnan(estimate.value)
    assert not estimate.valid


def test_invalid_inputs():
    with pytest.raises(DomainError):
        estimate_delta_r(-1.0, AMPLITUDE, DELTA_S, T_SR)
    with pytest.raises(DomainError):
        estimate_delta_r(0.5, AMPLITUDE, 0.0, T_SR)
    with pytest.raises(DomainError):
        propagate(0.9, -0.01)


class TestReferenceTable:
    def test_row_250(self):
        record = propagate(0.9428, 0.0033)
        assert record.method is Method.APPROX
        assert rad_to_hz(record.delta_r_hat) == pytest.approx(252.4, rel=0.005)
        assert rad_to_hz(record.from_contrast) == pytest.approx(7.20, rel=0.01)
        assert rad_to_hz(record.from_delta_s) == pytest.approx(1.55, rel=0.01)
        assert rad_to_hz(record.from_amplitude) == pytest.approx(1.50, rel=0.01)
        assert rad_to_hz(record.total) == pytest.approx(7.5, rel=0.01)
        assert not record.diverged

    def test_row_500(self):
        record = propagate(0.8024, 0.0034)
        assert rad_to_hz(record.delta_r_hat) == pytest.approx(483.1, rel=0.005)
        assert rad_to_hz(record.from_contrast) == pytest.approx(3.99, rel=0.01)
        assert rad_to_hz(record.total) == pytest.approx(5.74, rel=0.01)

    def test_row_1000_uses_exact_partials(self):
        record = propagate(0.3741, 0.0037)
        assert record.method is Method.EXACT
        assert rad_to_hz(record.delta_r_hat) == pytest.approx(970.1, rel=0.01)
        assert rad_to_hz(record.total) == pytest.approx(23.6, rel=0.1)

    def test_row_0_diverges(self):
        record = propagate(0.9998, 0.0032)
        assert record.diverged
        assert rad_to_hz(record.from_contrast) == pytest.approx(118.07, rel=0.005)

    def test_forced_approx(self):
        record = propagate(0.8024, 0.0034, Method.APPROX)
        assert record.estimate.method is Method.APPROX
        assert rad_to_hz(record.delta_r_hat) == pytest.approx(463.9, rel=0.005)

    def test_records_frame(self):
        actual = [hz_to_rad(250.0), hz_to_rad(500.0)]
        records = [propagate(0.9428, 0.0033), propagate(0.8024, 0.0034)]
        frame = records_frame(actual, records)
        assert list(frame.columns[:len(TABLE_COLUMNS)]) == TABLE_COLUMNS
        assert frame['actual_dr_hz'].tolist() == pytest.approx([250.0, 500.0])
        assert frame['method'].tolist() == ['approx', 'approx']
