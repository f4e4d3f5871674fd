"""Pulse shape, chirp, sampling and quantization."""

import math

import numpy as np
import pytest

from conftest import reference_pulse
from rapsim import EnvelopeKind, Pulse
from rapsim.pulse import (
    EDGE_FRACTION,
    amplitude_fraction,
    detuning,
    envelope,
    quantize_amplitude,
    sample_waveform,
    write_waveform_csv,
)

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------- envelope

def test_envelope_peak_at_center():
    p = reference_pulse()
    assert envelope(p, p.duration_s / 2) == pytest.approx(TWO_PI * p.peak_rabi_hz, rel=1e-15)


def test_envelope_edges_at_exp_minus_9():
    p = reference_pulse()
    peak = TWO_PI * p.peak_rabi_hz
    # sigma = T/(6 sqrt 2) forces exactly exp(-9) ~ 1.2341e-4 at both edges
    assert envelope(p, 0.0) / peak == pytest.approx(math.exp(-9.0), rel=1e-12)
    assert envelope(p, p.duration_s) / peak == pytest.approx(math.exp(-9.0), rel=1e-12)
    assert EDGE_FRACTION == pytest.approx(1.2341e-4, rel=1e-4)


def test_envelope_one_sigma_points():
    p = reference_pulse()
    mid = p.duration_s / 2
    expected = TWO_PI * p.peak_rabi_hz * math.exp(-0.5)
    assert envelope(p, mid + p.sigma_s) == pytest.approx(expected, rel=1e-12)
    assert envelope(p, mid - p.sigma_s) == pytest.approx(expected, rel=1e-12)


def test_envelope_constant_kind():
    p = reference_pulse(envelope_kind=EnvelopeKind.CONSTANT)
    t = np.linspace(0.0, p.duration_s, 17)
    assert np.allclose(envelope(p, t), TWO_PI * p.peak_rabi_hz, rtol=0.0)


def test_envelope_symmetric_about_center():
    p = reference_pulse()
    rng = np.random.default_rng(5)
    t = rng.uniform(0.0, p.duration_s, 200)
    assert np.allclose(envelope(p, t), envelope(p, p.duration_s - t), rtol=1e-13, atol=0.0)


def test_envelope_rejects_times_outside_pulse():
    p = reference_pulse()
    with pytest.raises(ValueError):
        envelope(p, -1e-9)
    with pytest.raises(ValueError):
        envelope(p, p.duration_s * 1.0001)


# ---------------------------------------------------------------- detuning

def test_detuning_endpoints_and_zero_crossing():
    p = reference_pulse()
    span = p.chirp_span_hz
    assert detuning(p, 0.0) == pytest.approx(-TWO_PI * span / 2, rel=1e-15)
    assert detuning(p, p.duration_s / 2) == pytest.approx(0.0, abs=1e-9)
    assert detuning(p, p.duration_s) == pytest.approx(TWO_PI * span / 2, rel=1e-15)


def test_detuning_antisymmetric_about_center():
    p = reference_pulse()
    rng = np.random.default_rng(6)
    t = rng.uniform(0.0, p.duration_s, 200)
    assert np.allclose(detuning(p, t), -detuning(p, p.duration_s - t), rtol=1e-12, atol=1e-3)


def test_detuning_offset_shifts_uniformly():
    p = reference_pulse(detuning_offset_hz=25e3)
    base = reference_pulse()
    t = np.linspace(0.0, p.duration_s, 11)
    assert np.allclose(detuning(p, t) - detuning(base, t), TWO_PI * 25e3)


# ---------------------------------------------------------------- validation

@pytest.mark.parametrize(
    "kwargs, field",
    [
        (dict(duration_s=0.0, peak_rabi_hz=1.0), "duration_s"),
        (dict(duration_s=-1e-6, peak_rabi_hz=1.0), "duration_s"),
        (dict(duration_s=1e-6, peak_rabi_hz=-1.0), "peak_rabi_hz"),
        (dict(duration_s=1e-6, peak_rabi_hz=1.0, chirp_span_hz=math.nan), "chirp_span_hz"),
        (dict(duration_s=1e-6, peak_rabi_hz=1.0, phase_offset_rad=math.inf), "phase_offset_rad"),
    ],
)
def test_pulse_validation_names_offending_field(kwargs, field):
    with pytest.raises(ValueError, match=field):
        Pulse(**kwargs)


# ---------------------------------------------------------------- sampling

def test_sample_waveform_reference_grid():
    p = reference_pulse()
    samples = sample_waveform(p, 1e6)
    assert len(samples) == 151
    assert samples[0].t_s == 0.0
    assert samples[-1].t_s == pytest.approx(p.duration_s, rel=1e-15)
    # amplitudes match direct evaluation of the shape on the grid
    assert samples[0].amplitude == pytest.approx(math.exp(-9.0), rel=1e-12)
    assert samples[75].amplitude == pytest.approx(1.0, rel=1e-12)
    for s in samples[::10]:
        assert s.amplitude == pytest.approx(amplitude_fraction(p, s.t_s), rel=1e-12)
        assert s.detuning_hz == pytest.approx(detuning(p, s.t_s) / TWO_PI, rel=1e-12, abs=1e-12)


def test_sample_waveform_constant_envelope_all_ones():
    p = reference_pulse(envelope_kind=EnvelopeKind.CONSTANT)
    samples = sample_waveform(p, 2e6)
    assert all(s.amplitude == 1.0 for s in samples)


def test_sample_waveform_no_chirp_means_no_phase():
    p = reference_pulse(chirp_span_hz=0.0)
    samples = sample_waveform(p, 1e6)
    assert all(s.detuning_hz == 0.0 for s in samples)
    assert all(s.phase_rad == 0.0 for s in samples)


def test_sampled_phase_is_trapezoid_integral_and_returns_to_zero():
    p = reference_pulse()
    samples = sample_waveform(p, 1e6)
    t = np.array([s.t_s for s in samples])
    delta = TWO_PI * np.array([s.detuning_hz for s in samples])
    phase = np.array([s.phase_rad for s in samples])
    dt = t[1] - t[0]
    increments = 0.5 * (delta[1:] + delta[:-1]) * dt
    assert np.allclose(np.diff(phase), increments, rtol=1e-12, atol=1e-12)
    # antisymmetric integrand: the accumulated phase cancels at t = T
    assert abs(phase[-1]) < 1e-9


def test_sample_waveform_rejects_bad_rates():
    p = reference_pulse()
    with pytest.raises(ValueError):
        sample_waveform(p, 0.0)
    with pytest.raises(ValueError):
        sample_waveform(p, -1e6)
    with pytest.raises(ValueError):
        sample_waveform(p, 1e3)  # rate * T < 2


# ---------------------------------------------------------------- quantization

def test_quantize_preserves_endpoints():
    p = reference_pulse()
    q = quantize_amplitude(sample_waveform(p, 1e6), 16)
    assert q[75].amplitude == 1.0
    assert all(0.0 <= s.amplitude <= 1.0 for s in q)


def test_quantize_snaps_to_grid():
    samples = [type(s)(s.t_s, 0.5 + 1e-9, s.detuning_hz, s.phase_rad)
               for s in sample_waveform(reference_pulse(), 1e6)[:1]]
    q = quantize_amplitude(samples, 16)
    expected = round((0.5 + 1e-9) * 65535) / 65535  # independent rounding
    assert q[0].amplitude == pytest.approx(expected, abs=0.0)


def test_quantize_one_bit_snaps_to_zero_or_one():
    p = reference_pulse()
    q = quantize_amplitude(sample_waveform(p, 1e6), 1)
    assert set(s.amplitude for s in q) <= {0.0, 1.0}


def test_quantize_idempotent_and_bounded_error():
    p = reference_pulse()
    samples = sample_waveform(p, 1e6)
    q1 = quantize_amplitude(samples, 12)
    q2 = quantize_amplitude(q1, 12)
    assert all(a.amplitude == b.amplitude for a, b in zip(q1, q2))
    half_step = 0.5 / (2**12 - 1)
    assert all(abs(a.amplitude - s.amplitude) <= half_step * (1 + 1e-12)
               for a, s in zip(q1, samples))


def test_quantize_rejects_bad_bit_depths():
    samples = sample_waveform(reference_pulse(), 1e6)
    for bits in (0, 33, -1):
        with pytest.raises(ValueError):
            quantize_amplitude(samples, bits)


# ---------------------------------------------------------------- export

def test_waveform_csv_format(tmp_path):
    p = reference_pulse()
    path = tmp_path / "wf.csv"
    write_waveform_csv(sample_waveform(p, 1e6), path, comment="a=1 b=2")
    lines = path.read_text().splitlines()
    assert lines[0] == "# a=1 b=2"
    assert lines[1] == "t_s,amplitude,detuning_hz,phase_rad"
    assert len(lines) == 2 + 151
    # 12+ significant digits survive a round trip
    first = lines[2].split(",")
    assert float(first[1]) == pytest.approx(math.exp(-9.0), rel=1e-12)
