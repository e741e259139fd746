"""
Scenario kinds: each turns a configuration and its parameters into data frames and metrics
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Any, List, Optional

import numpy as np
import pandas as pd
from scipy.signal import find_peaks

from ..core.config import ScenarioConfig
from ..core.errors import ConfigError, FitError
from ..core.model import (
    DdSequence, EffectiveSignal, TwoToneSignal, effective_transform, ramsey_effective,
    superresolution_times,
)
from ..core.rng import stream_generator
from ..core.units import hz_to_rad, rad_to_hz
from ..estimation.estimator import (
    Method, contrast_curve, estimate_delta_r, propagate_uncertainty, records_frame,
)
from ..estimation.fisher import (
    NoiseKind, NoiseModel, crb_curve, decoherence_fi, fisher_curve, fisher_information,
    ramsey_fi,
)
from ..estimation.resolution import resolution_limit
from ..pulses.fidelity import (
    RfPulseModel, average_fidelity, mapping_epsilon, mc_average_fidelity, pulse_fidelity,
    sigma_delta_from_t2star,
)
from ..readout.histogram import fit_double_gaussian, histogram
from ..readout.snr import (
    SsrModel, StdReadoutModel, flip_probability, noise_budget, readout_variance, snr_ssr,
    snr_standard,
)
from ..readout.trace import (
    DOWN, UP, SsrTraceModel, digitize, dwell_times, fit_lifetime, sample_mixture,
    simulate_ssr_trace,
)
from ..sensing.oracle import (
    McConfig, accumulated_phase, mc_transition_probability, toggling_integration,
    toggling_phase_map,
)
from ..sensing.probability import (
    calibration_probability, expansion_for, fit_calibration, first_contrast_zero,
    small_delta_r_probability, transition_probability, transition_probability_decohered,
)
from .manifest import ScenarioKind

logger = logging.getLogger(__name__)

DEFAULT_MC_SAMPLES = 100000


@dataclass(frozen=True)
class RunContext:
    """Per-scenario seed, random stream and Monte Carlo overrides"""
    seed: int = 0
    stream_id: int = 0
    mc_samples: Optional[int] = None
    workers: int = 1

    def samples(self, params: Dict[str, Any], default: int = DEFAULT_MC_SAMPLES) -> int:
        if self.mc_samples is not None:
            return int(self.mc_samples)
        return int(params.get('mc_samples', default))


@dataclass
class ScenarioOutput:
    """Frames keyed by suffix ('' is the primary table) plus scalar or list metrics"""
    frames: Dict[str, pd.DataFrame] = field(default_factory=dict)
    metrics: Dict[str, Any] = field(default_factory=dict)


def grid(params: Dict[str, Any], key: str, default: Dict[str, Any]) -> np.ndarray:
    """
    Sample points from a list or a {start, stop, num|step[, log]} mapping.
    """
    layout = params.get(key, default)
    if isinstance(layout, (list, tuple)):
        return np.asarray(layout, dtype=float)
    if not isinstance(layout, dict) or 'start' not in layout or 'stop' not in layout:
        raise ConfigError(f"{key} must be a list or a start/stop mapping")
    start, stop = float(layout['start']), float(layout['stop'])
    if 'step' in layout:
        step = float(layout['step'])
        if step <= 0:
            raise ConfigError(f"{key}.step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return start + step * np.arange(count)
    num = int(layout.get('num', 101))
    if layout.get('log'):
        if start <= 0 or stop <= 0:
            raise ConfigError(f"{key} needs positive bounds on a log grid")
        return np.geomspace(start, stop, num)
    return np.linspace(start, stop, num)


def _number(values: Dict[str, Any], key: str, default: Any = None, where: str = '') -> float:
    """A float parameter; missing or non-numeric values are configuration errors"""
    value = values.get(key, default)
    if value is None:
        raise ConfigError(f"{where or 'parameters'} needs '{key}'")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where or 'parameters'}.{key} must be a number, got {value!r}")


def _method(params: Dict[str, Any]) -> Method:
    value = params.get('method', Method.AUTO.value)
    try:
        return Method(value)
    except ValueError:
        choices = ', '.join(m.value for m in Method)
        raise ConfigError(f"Unknown estimation method {value!r} (choose from {choices})")


def _tag(value: float) -> str:
    return f'{value:g}'


def _noise(params: Dict[str, Any]) -> NoiseModel:
    return NoiseModel.from_config(params.get('noise'))


def _decay_for(noise: NoiseModel, decay_rate: float) -> float:
    """The decoherence noise model carries its own rate"""
    return 0.0 if noise.kind is NoiseKind.DECOHERENCE else decay_rate


def _decay_or_t2(config: ScenarioConfig, params: Dict[str, Any]) -> float:
    if 'decay_rate_per_s' in params:
        return _number(params, 'decay_rate_per_s')
    return config.decay_rate or config.constants().decay_rate


def _signal_at(eff: EffectiveSignal, params: Dict[str, Any]) -> List[EffectiveSignal]:
    values = params.get('delta_r_hz')
    if values is None:
        return [eff]
    if not isinstance(values, (list, tuple)):
        values = [values]
    return [eff.with_delta_r(hz_to_rad(float(value))) for value in values]


def _first_superresolution_time(eff: EffectiveSignal) -> Optional[float]:
    return superresolution_times(eff.delta_s, 1)[0] if eff.delta_s else None


def _model_from(section: Dict[str, Any], cls, renames: Optional[Dict[str, str]] = None):
    renames = renames or {}
    kwargs = {renames.get(key, key): value for key, value in (section or {}).items()}
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"Invalid {cls.__name__} parameters: {exc}") from exc


def ssr_model(config: ScenarioConfig) -> SsrModel:
    return _model_from(config.get('readout.ssr'), SsrModel)


def std_readout(config: ScenarioConfig) -> StdReadoutModel:
    return _model_from(config.get('readout.standard'), StdReadoutModel)


def trace_model(config: ScenarioConfig) -> SsrTraceModel:
    return _model_from(config.get('readout.trace'), SsrTraceModel, {
        'shot_time_s': 'shot_time', 'lifetime_up_s': 'lifetime_up',
        'lifetime_down_s': 'lifetime_down',
    })


def pulse_model(config: ScenarioConfig) -> RfPulseModel:
    """RF pi pulse from the 'pulse' section, falling back to the experiment constants"""
    constants = config.constants()
    duration = config.get('pulse.duration_s', constants.rf_pi_duration)
    detuning_std = config.get('pulse.detuning_std_hz')
    detuning_std = sigma_delta_from_t2star(constants.t2_star_nuclear) if detuning_std is None \
        else hz_to_rad(float(detuning_std))
    amplitude_std = config.get('pulse.amplitude_std', constants.rf_amplitude_std)
    return RfPulseModel.from_duration(float(duration), detuning_std, float(amplitude_std))


def prob_vs_time(config: ScenarioConfig, params: Dict[str, Any],
                 ctx: RunContext) -> ScenarioOutput:
    times = grid(params, 'times_us', {'start': 0.0, 'stop': 100.0, 'num': 1001}) * 1e-6
    decay_rate = config.decay_rate
    frames = []
    metrics: Dict[str, Any] = {}
    for eff in _signal_at(config.effective(), params):
        probability = transition_probability_decohered(eff, times, decay_rate)
        tag = _tag(rad_to_hz(eff.delta_r))
        frames.append(pd.DataFrame({'t_us': times * 1e6, 'delta_r_hz': rad_to_hz(eff.delta_r),
                                    'probability': probability}))
        t_sr = _first_superresolution_time(eff)
        if t_sr is not None:
            metrics[f'p_at_superresolution[{tag}]'] = float(
                transition_probability_decohered(eff, t_sr, decay_rate))
        metrics[f'p_max[{tag}]'] = float(np.max(probability))
    return ScenarioOutput({'': pd.concat(frames, ignore_index=True)}, metrics)


def fi_vs_time(config: ScenarioConfig, params: Dict[str, Any],
               ctx: RunContext) -> ScenarioOutput:
    times = grid(params, 'times_us', {'start': 0.0, 'stop': 100.0, 'step': 0.01}) * 1e-6
    noise = _noise(params)
    decay_rate = _decay_for(noise, config.decay_rate)
    n_peaks = int(params.get('n_peaks', 4))
    eff = _signal_at(config.effective(), params)[0]

    fi = fisher_curve(eff, times, decay_rate, noise)
    peaks, _ = find_peaks(fi)
    tallest = np.sort(peaks[np.argsort(fi[peaks])[::-1][:n_peaks]])
    frame = pd.DataFrame({'t_us': times * 1e6, 'fi_per_shot': fi})
    metrics: Dict[str, Any] = {
        'peak_times_us': [float(times[index] * 1e6) for index in tallest],
        'peak_fi': [float(fi[index]) for index in tallest],
    }
    if eff.delta_s:
        expected = [t for t in superresolution_times(eff.delta_s, n_peaks) if t <= times[-1]]
        metrics['superresolution_times_us'] = [t * 1e6 for t in expected]
        if expected:
            result = fisher_information(eff, expected[0], decay_rate, noise)
            metrics['fi_at_superresolution'] = result.fi_per_shot
            if eff.equal_amplitudes:
                b_t = expansion_for(eff, expected[0]).b_t
                metrics['fi_limit'] = 4.0 * b_t
    return ScenarioOutput({'': frame}, metrics)


def contrast_vs_delta_r(config: ScenarioConfig, params: Dict[str, Any],
                        ctx: RunContext) -> ScenarioOutput:
    eff = config.effective()
    t = _number(params, 'time_us', config.total_time * 1e6) * 1e-6
    delta_rs_hz = grid(params, 'delta_r_hz', {'start': 0.0, 'stop': 3000.0, 'step': 10.0})
    delta_rs = hz_to_rad(1.0) * delta_rs_hz
    exact = contrast_curve(eff.amplitude, eff.delta_s, t, delta_rs)
    approx = 1.0 - 2.0 * small_delta_r_probability(eff.amplitude, eff.delta_s, t, delta_rs)
    frame = pd.DataFrame({'delta_r_hz': delta_rs_hz, 'contrast': exact,
                          'contrast_approx': approx})
    metrics: Dict[str, Any] = {'min_contrast': float(np.min(exact))}
    for point in params.get('points_hz', []):
        metrics[f'contrast[{_tag(point)}]'] = float(
            contrast_curve(eff.amplitude, eff.delta_s, t, hz_to_rad(point)))
    return ScenarioOutput({'': frame}, metrics)


def contrast_vs_time(config: ScenarioConfig, params: Dict[str, Any],
                     ctx: RunContext) -> ScenarioOutput:
    times = grid(params, 'times_us', {'start': 0.0, 'stop': 100.0, 'num': 1001}) * 1e-6
    decay_rate = config.decay_rate
    frames = []
    metrics: Dict[str, Any] = {}
    for eff in _signal_at(config.effective(), params):
        probability = transition_probability_decohered(eff, times, decay_rate)
        frames.append(pd.DataFrame({'t_us': times * 1e6, 'delta_r_hz': rad_to_hz(eff.delta_r),
                                    'contrast': 1.0 - 2.0 * probability}))
        t_sr = _first_superresolution_time(eff)
        if t_sr is not None:
            value = transition_probability_decohered(eff, t_sr, decay_rate)
            metrics[f'contrast_at_superresolution[{_tag(rad_to_hz(eff.delta_r))}]'] = \
                float(1.0 - 2.0 * value)
    return ScenarioOutput({'': pd.concat(frames, ignore_index=True)}, metrics)


def estimator_table(config: ScenarioConfig, params: Dict[str, Any],
                    ctx: RunContext) -> ScenarioOutput:
    eff = config.effective()
    t = config.total_time
    method = _method(params)
    d_delta_s = hz_to_rad(_number(params, 'd_delta_s_hz',
                                 config.get('estimation.d_delta_s_hz')))
    d_amplitude = hz_to_rad(_number(params, 'd_amplitude_hz',
                                   config.get('estimation.d_amplitude_hz')))
    rows = params.get('rows')
    if not rows:
        raise ConfigError("EstimatorTable needs a non-empty 'rows' list")

    actual, records = [], []
    metrics: Dict[str, Any] = {}
    for i, row in enumerate(rows):
        if not isinstance(row, dict):
            raise ConfigError(f"rows[{i}] must be a mapping")
        where = f'rows[{i}]'
        actual_hz = _number(row, 'actual_hz', where=where)
        hint = row.get('hint_hz')
        record = propagate_uncertainty(
            _number(row, 'contrast', where=where), _number(row, 'd_contrast', where=where),
            eff.amplitude, d_amplitude, eff.delta_s, d_delta_s, t, method,
            hint=None if hint is None else hz_to_rad(_number(row, 'hint_hz', where=where)))
        actual.append(hz_to_rad(actual_hz))
        records.append(record)
        tag = _tag(actual_hz)
        metrics[f'est_dr_hz[{tag}]'] = rad_to_hz(record.delta_r_hat)
        metrics[f'from_contrast_hz[{tag}]'] = rad_to_hz(record.from_contrast)
        metrics[f'from_delta_s_hz[{tag}]'] = rad_to_hz(record.from_delta_s)
        metrics[f'from_amplitude_hz[{tag}]'] = rad_to_hz(record.from_amplitude)
        metrics[f'total_hz[{tag}]'] = rad_to_hz(record.total)
        approx = estimate_delta_r(record.contrast, eff.amplitude, eff.delta_s, t, Method.APPROX)
        metrics[f'approx_dr_hz[{tag}]'] = rad_to_hz(approx.value)
        metrics[f'approx_valid[{tag}]'] = float(approx.valid)
    metrics['diverged_rows'] = int(sum(record.diverged for record in records))
    return ScenarioOutput({'': records_frame(actual, records)}, metrics)


def approx_vs_exact(config: ScenarioConfig, params: Dict[str, Any],
                    ctx: RunContext) -> ScenarioOutput:
    eff = config.effective()
    t = config.total_time
    delta_rs_hz = grid(params, 'delta_r_hz', {'start': 0.0, 'stop': 3000.0, 'step': 10.0})
    delta_rs = hz_to_rad(1.0) * delta_rs_hz
    exact = 0.5 * (1.0 - contrast_curve(eff.amplitude, eff.delta_s, t, delta_rs))
    approx = small_delta_r_probability(eff.amplitude, eff.delta_s, t, delta_rs)
    frame = pd.DataFrame({'delta_r_hz': delta_rs_hz, 'probability': exact,
                          'probability_approx': approx})

    metrics: Dict[str, Any] = {}
    for point in params.get('points_hz', [100.0, 250.0, 500.0, 2500.0]):
        value = float(contrast_curve(eff.amplitude, eff.delta_s, t, hz_to_rad(point)))
        exact_estimate = estimate_delta_r(value, eff.amplitude, eff.delta_s, t, Method.EXACT,
                                          hint=hz_to_rad(point))
        approx_estimate = estimate_delta_r(value, eff.amplitude, eff.delta_s, t, Method.APPROX)
        tag = _tag(point)
        metrics[f'relative_difference[{tag}]'] = \
            abs(approx_estimate.value - exact_estimate.value) / exact_estimate.value
        metrics[f'approx_valid[{tag}]'] = float(approx_estimate.valid)
    return ScenarioOutput({'': frame}, metrics)


def expansion_coefficients_kind(config: ScenarioConfig, params: Dict[str, Any],
                                ctx: RunContext) -> ScenarioOutput:
    eff = config.effective()
    times = grid(params, 'times_us', {'start': 1.0, 'stop': 100.0, 'num': 991}) * 1e-6
    expansion = expansion_for(eff, times)
    frame = pd.DataFrame({'t_us': times * 1e6, 'a_t': expansion.a_t, 'b_t': expansion.b_t})
    metrics: Dict[str, Any] = {}
    t_sr = _first_superresolution_time(eff)
    if t_sr is not None:
        at_sr = expansion_for(eff, t_sr)
        metrics['a_t_at_superresolution'] = at_sr.a_t
        metrics['b_t_at_superresolution'] = at_sr.b_t
        metrics['b_t_limit'] = (eff.amplitude * t_sr / eff.delta_s) ** 2
    return ScenarioOutput({'': frame}, metrics)


def ramsey_probability(config: ScenarioConfig, params: Dict[str, Any],
                       ctx: RunContext) -> ScenarioOutput:
    signal = config.signal()
    eff = ramsey_effective(signal)
    default_stop = 5.0 * 2.0 * math.pi / signal.omega_s * 1e6
    times = grid(params, 'times_us', {'start': 0.0, 'stop': default_stop, 'num': 2001}) * 1e-6
    probability = transition_probability(eff, times)
    frame = pd.DataFrame({'t_us': times * 1e6, 'probability': probability})
    t_sr = superresolution_times(signal.omega_s, 1)[0]
    result = fisher_information(eff, t_sr)
    metrics = {
        'superresolution_time_us': t_sr * 1e6,
        'p_at_superresolution': float(transition_probability(eff, t_sr)),
        'fi_at_superresolution': result.fi_per_shot,
        'fi_closed_form': float(ramsey_fi(signal.amplitude_1, signal.omega_s, t_sr)),
    }
    return ScenarioOutput({'': frame}, metrics)


def crb_vs_delta_r(config: ScenarioConfig, params: Dict[str, Any],
                   ctx: RunContext) -> ScenarioOutput:
    eff = config.effective()
    t = config.total_time
    n_exp = int(params.get('n_exp', config.n_exp))
    decay_rate = _decay_or_t2(config, params)
    delta_rs_hz = grid(params, 'delta_r_hz', {'start': 1.0, 'stop': 3000.0, 'num': 200,
                                              'log': True})
    delta_rs = hz_to_rad(1.0) * delta_rs_hz

    qpn = crb_curve(eff, delta_rs, t, n_exp)
    decohered = crb_curve(eff, delta_rs, t, n_exp, noise=NoiseModel.decoherence(decay_rate))
    b_t = expansion_for(eff, t).b_t
    closed = 1.0 / np.sqrt(n_exp * decoherence_fi(b_t, delta_rs, decay_rate, t))
    columns = {
        'delta_r_hz': delta_rs_hz,
        'crb_qpn_hz': rad_to_hz(qpn),
        'crb_decoherence_hz': rad_to_hz(decohered),
        'crb_decoherence_closed_form_hz': rad_to_hz(closed),
    }
    off_time = params.get('off_superresolution_time_us')
    if off_time is not None:
        columns['crb_off_superresolution_hz'] = rad_to_hz(
            crb_curve(eff, delta_rs, float(off_time) * 1e-6, n_exp))
    frame = pd.DataFrame(columns)

    floor = fisher_information(eff.with_delta_r(0.0), t, n_exp=n_exp)
    metrics: Dict[str, Any] = {
        'qpn_floor_hz': rad_to_hz(floor.crb_std),
        'decay_rate_per_s': decay_rate,
    }
    for point in params.get('points_hz', []):
        result = fisher_information(eff.with_delta_r(hz_to_rad(point)), t,
                                    noise=NoiseModel.decoherence(decay_rate), n_exp=n_exp)
        metrics[f'crb_decoherence_hz[{_tag(point)}]'] = rad_to_hz(result.crb_std)
    return ScenarioOutput({'': frame}, metrics)


def resolution_limit_kind(config: ScenarioConfig, params: Dict[str, Any],
                          ctx: RunContext) -> ScenarioOutput:
    eff = config.effective()
    t = config.total_time
    decay_rate = _decay_or_t2(config, params)
    n_values = [int(n) for n in params.get('n_exp', [config.n_exp])]
    noise = NoiseModel.from_config(params['noise']) if 'noise' in params else None

    rows = []
    for n_exp in n_values:
        result = resolution_limit(eff.amplitude, eff.delta_s, t, decay_rate, n_exp, noise)
        rows.append({'n_exp': n_exp, 'decay_rate_per_s': decay_rate,
                     'delta_star_hz': rad_to_hz(result.delta_star),
                     'resolved': result.resolved,
                     'crb_at_star_hz': rad_to_hz(result.crb_at_star)})
    frame = pd.DataFrame(rows)
    metrics: Dict[str, Any] = {
        'delta_star_hz': float(frame['delta_star_hz'].iloc[0]),
        'resolved': bool(frame['resolved'].all()),
    }
    if len(rows) > 1 and frame['resolved'].all():
        slope, _ = np.polyfit(np.log(frame['n_exp']), np.log(frame['delta_star_hz']), 1)
        metrics['n_exp_slope'] = float(slope)
    return ScenarioOutput({'': frame}, metrics)


def calibration(config: ScenarioConfig, params: Dict[str, Any],
                ctx: RunContext) -> ScenarioOutput:
    amplitude = config.effective().amp_eff_1
    times = grid(params, 'times_us', {'start': 0.5, 'stop': 60.0, 'num': 120}) * 1e-6
    noise_std = _number(params, 'noise_std', 0.01)
    rng = stream_generator(ctx.seed, ctx.stream_id)
    frames = []
    metrics: Dict[str, Any] = {
        'true_amplitude_hz': rad_to_hz(amplitude),
        'first_zero_us': first_contrast_zero(amplitude) * 1e6,
    }
    for tones in params.get('tones', [1, 2]):
        model = calibration_probability(amplitude, times, tones)
        data = np.clip(model + rng.normal(0.0, noise_std, times.size), 0.0, 1.0)
        try:
            fit = fit_calibration(times, data, tones,
                                  sigma=np.full(times.size, noise_std) if noise_std else None)
        except FitError as exc:
            logger.warning("Calibration fit for %d tone(s) failed: %s", tones, exc)
            metrics[f'amplitude_hz[{tones}]'] = math.nan
            continue
        frames.append(pd.DataFrame({'t_us': times * 1e6, 'tones': tones, 'probability': data,
                                    'model': model,
                                    'fit': calibration_probability(fit.amplitude, times, tones)}))
        metrics[f'amplitude_hz[{tones}]'] = rad_to_hz(fit.amplitude)
        metrics[f'amplitude_std_hz[{tones}]'] = rad_to_hz(fit.amplitude_std)
        metrics[f'residual_rms[{tones}]'] = fit.residual_rms
    frame = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()
    return ScenarioOutput({'': frame}, metrics)


def pulse_fidelity_kind(config: ScenarioConfig, params: Dict[str, Any],
                        ctx: RunContext) -> ScenarioOutput:
    model = pulse_model(config)
    report = average_fidelity(model, int(params.get('nodes', 64)))
    mc = mc_average_fidelity(model, ctx.samples(params), ctx.seed, ctx.stream_id, ctx.workers)
    span = 3.0 * model.detuning_std if model.detuning_std else model.rabi
    detunings = np.linspace(-span, span, int(params.get('sweep_points', 121)))
    frame = pd.DataFrame({
        'detuning_hz': rad_to_hz(detunings),
        'fidelity': [pulse_fidelity(model.rabi, delta, 0.0) for delta in detunings],
    })
    metrics = {
        'sigma_delta_hz': rad_to_hz(model.detuning_std),
        'point_fidelity': report.point_fidelity,
        'average_fidelity': report.average_fidelity,
        'worst_case_3sigma': report.worst_case_3sigma,
        'quadrature_error': report.quadrature_error_estimate,
        'mapping_epsilon': mapping_epsilon(report),
        'mc_mean': mc.mean,
        'mc_std_error': mc.std_error,
        'mc_deviation_se': mc.deviation(report.average_fidelity),
    }
    return ScenarioOutput({'': frame}, metrics)


def _uniform(rng, bounds, default):
    low, high = bounds or default
    return float(rng.uniform(low, high))


def _toggling_error(ratio: float, phases, pulse_spacing: float, amplitude: float,
                    steps: int) -> float:
    """Lab-frame integration against the effective phase over one beat period"""
    omega_dd = math.pi / pulse_spacing
    omega = omega_dd / (1.0 + ratio)
    pulses = int(round(2.0 * (1.0 + ratio) / abs(ratio)))
    dd = DdSequence(pulse_spacing, pulses)
    signal = TwoToneSignal(amplitude, amplitude, omega, omega)
    lab = toggling_integration(signal, dd, phases[0], phases[1], steps)
    eff = effective_transform(signal, dd)
    reference = accumulated_phase(eff, dd.total_time, *toggling_phase_map(phases))
    return abs(lab - reference) / (eff.amp_eff_1 * dd.total_time)


def oracle_check(config: ScenarioConfig, params: Dict[str, Any],
                 ctx: RunContext) -> ScenarioOutput:
    draws = int(params.get('draws', 20))
    n_samples = ctx.samples(params, 20000)
    rng = stream_generator(ctx.seed, ctx.stream_id)
    rows = []
    for index in range(draws):
        amplitude = hz_to_rad(_uniform(rng, params.get('amplitude_hz'), (0.0, 5e4)))
        delta_s = hz_to_rad(_uniform(rng, params.get('delta_s_hz'), (5e3, 1e5)))
        # delta_r is drawn relative to delta_s
        delta_r = delta_s * _uniform(rng, params.get('delta_r_fraction'), (0.0, 0.2))
        t = 1e-6 * _uniform(rng, params.get('t_us'), (5.0, 200.0))
        eff = EffectiveSignal.from_detunings(amplitude, delta_s, delta_r)
        mc = McConfig(n_samples, ctx.seed, (ctx.stream_id + index + 1) % 2 ** 64,
                      mode=params.get('mode', 'sin2'), workers=ctx.workers)
        estimate = mc_transition_probability(eff, t, mc)
        analytic = float(transition_probability(eff, t))
        rows.append({'amplitude_hz': rad_to_hz(amplitude), 'delta_s_hz': rad_to_hz(delta_s),
                     'delta_r_hz': rad_to_hz(delta_r), 't_us': t * 1e6,
                     'analytic': analytic, 'mc_mean': estimate.mean,
                     'mc_std_error': estimate.std_error,
                     'deviation_se': estimate.deviation(analytic)})
    frame = pd.DataFrame(rows)
    metrics: Dict[str, Any] = {
        'max_deviation_se': float(frame['deviation_se'].max()),
        'fraction_within_3se': float((frame['deviation_se'] <= 3.0).mean()),
    }
    pulse_spacing = float(config.get('dd.pulse_spacing_s', 200e-9))
    amplitude = hz_to_rad(float(config.get('signal.amplitude_1_hz')))
    phases = params.get('toggling_phases', [0.3, 1.1])
    for ratio in params.get('toggling_ratios', [0.05]):
        metrics[f'toggling_error[{_tag(ratio)}]'] = _toggling_error(
            float(ratio), phases, pulse_spacing, amplitude,
            int(params.get('steps_per_period', 100)))
    return ScenarioOutput({'': frame}, metrics)


def ssr_trace(config: ScenarioConfig, params: Dict[str, Any],
              ctx: RunContext) -> ScenarioOutput:
    model = trace_model(config)
    n_shots = int(params.get('n_shots', 4400))
    bins = int(params.get('bins', 100))
    trace = simulate_ssr_trace(model, n_shots, ctx.seed, stream_id=ctx.stream_id)
    centers, counts = histogram(trace.i_norm, bins, (-1.0, 1.0))
    fit = fit_double_gaussian(centers, counts)
    threshold = fit.threshold if math.isfinite(fit.threshold) else 0.0
    states = digitize(trace.i_norm, threshold, _number(params, 'hysteresis', 0.14))

    dwells = dwell_times(states, model.shot_time)
    metrics: Dict[str, Any] = {
        'predicted_fidelity': model.predicted_fidelity(),
        'fidelity_fit': fit.fidelity,
        'threshold': threshold,
        'fit_converged': float(fit.converged),
        'state_error_rate': float(np.mean(states != trace.states)),
        'redraws': trace.redraws,
    }
    for label, values in (('lifetime', np.concatenate([dwells[UP], dwells[DOWN]])),
                          ('lifetime_up', dwells[UP]), ('lifetime_down', dwells[DOWN])):
        try:
            lifetime = fit_lifetime(values, model.shot_time,
                                    int(params.get('min_dwell_shots', 1)))
        except FitError as exc:
            logger.warning("%s fit failed: %s", label, exc)
            metrics[f'{label}_ms'] = math.nan
            continue
        metrics[f'{label}_ms'] = lifetime.lifetime * 1e3
        metrics[f'{label}_std_ms'] = lifetime.std_error * 1e3
        metrics[f'{label}_ks_pvalue'] = lifetime.ks_pvalue
        metrics[f'{label}_dwells'] = lifetime.n_dwells

    mixture_samples = int(params.get('mixture_samples', 100000))
    if mixture_samples:
        values, _ = sample_mixture(model, mixture_samples, ctx.seed, (ctx.stream_id + 1) % 2 ** 64)
        metrics['mixture_fidelity'] = fit_double_gaussian(*histogram(values, bins)).fidelity

    frames = {
        '': pd.DataFrame({'shot': np.arange(n_shots), 'time_s': np.arange(n_shots) * model.shot_time,
                          'i_norm': trace.i_norm, 'state': states, 'true_state': trace.states}),
        'histogram': pd.DataFrame({'i_norm': centers, 'count': counts}),
    }
    return ScenarioOutput(frames, metrics)


def noise_budget_kind(config: ScenarioConfig, params: Dict[str, Any],
                      ctx: RunContext) -> ScenarioOutput:
    ssr = ssr_model(config)
    standard = std_readout(config)
    p0 = _number(params, 'p0', 0.0)
    budget = noise_budget(ssr, p0, flip_probability(ssr, p0))
    metrics = {
        'snr_standard': snr_standard(standard),
        'snr_ssr': snr_ssr(ssr),
        'sigma_psn': budget.sigma_psn,
        'sigma_qpn': budget.sigma_qpn,
        'sigma_total': budget.sigma_total,
        'qpn_std_fraction': budget.qpn_std_fraction,
        'qpn_variance_fraction': budget.qpn_variance_fraction,
        'readout_variance': readout_variance(ssr, p0),
    }
    return ScenarioOutput({'': pd.DataFrame([dict(p0=p0, **metrics)])}, metrics)


KINDS: Dict[ScenarioKind, Callable[[ScenarioConfig, Dict[str, Any], RunContext], ScenarioOutput]] = {
    ScenarioKind.PROB_VS_TIME: prob_vs_time,
    ScenarioKind.FI_VS_TIME: fi_vs_time,
    ScenarioKind.CONTRAST_VS_DELTA_R: contrast_vs_delta_r,
    ScenarioKind.ESTIMATOR_TABLE: estimator_table,
    ScenarioKind.SSR_TRACE: ssr_trace,
    ScenarioKind.RESOLUTION_LIMIT: resolution_limit_kind,
    ScenarioKind.CALIBRATION: calibration,
    ScenarioKind.PULSE_FIDELITY: pulse_fidelity_kind,
    ScenarioKind.ORACLE_CHECK: oracle_check,
    ScenarioKind.CONTRAST_VS_TIME: contrast_vs_time,
    ScenarioKind.RAMSEY_PROBABILITY: ramsey_probability,
    ScenarioKind.EXPANSION_COEFFICIENTS: expansion_coefficients_kind,
    ScenarioKind.APPROX_VS_EXACT: approx_vs_exact,
    ScenarioKind.CRB_VS_DELTA_R: crb_vs_delta_r,
    ScenarioKind.NOISE_BUDGET: noise_budget_kind,
}
