"""Chirped, Gaussian-enveloped drive pulse: definition, evaluation, sampling, export.

All user-facing frequencies are ordinary frequencies in Hz; the evaluation
functions return angular frequencies in rad/s (multiplied by 2*pi), which is
what the equations of motion consume.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# The Gaussian width is fixed at sigma = T/(6*sqrt(2)), so the truncation
# points t=0 and t=T sit at (T/2)^2/(2 sigma^2) = 9 exponent units below the
# peak.  The residual exp(-9) step (~1.2e-4 of peak) is kept, not shifted out.
EDGE_EXPONENT = 9.0
EDGE_FRACTION = math.exp(-EDGE_EXPONENT)


class EnvelopeKind(enum.Enum):
    """Amplitude envelope shapes.  CONSTANT exists for closed-form test drives."""

    GAUSSIAN_TRUNCATED = "gaussian_truncated"
    CONSTANT = "constant"


@dataclass(frozen=True)
class Pulse:
    """One shaped drive pulse.

    Attributes
    ----------
    duration_s : float
        Pulse length T in seconds.  Must be positive.
    peak_rabi_hz : float
        Maximum Rabi frequency (ordinary frequency, Hz), reached at t = T/2.
    chirp_span_hz : float
        Full detuning range swept linearly during the pulse (Hz).  The chirp
        starts at -chirp_span/2, crosses zero at t = T/2 and ends at
        +chirp_span/2.
    envelope_kind : EnvelopeKind
        Shape of the amplitude envelope.
    phase_offset_rad : float
        Constant drive phase (radians).
    detuning_offset_hz : float
        Constant detuning added on top of the chirp (Hz).  Zero for the
        standard symmetric sweep; nonzero only for closed-form test drives.
    """

    duration_s: float
    peak_rabi_hz: float
    chirp_span_hz: float = 0.0
    envelope_kind: EnvelopeKind = EnvelopeKind.GAUSSIAN_TRUNCATED
    phase_offset_rad: float = 0.0
    detuning_offset_hz: float = 0.0

    def __post_init__(self) -> None:
        if not (self.duration_s > 0.0 and math.isfinite(self.duration_s)):
            raise ValueError(f"duration_s must be positive and finite, got {self.duration_s}")
        if not (self.peak_rabi_hz >= 0.0 and math.isfinite(self.peak_rabi_hz)):
            raise ValueError(f"peak_rabi_hz must be >= 0 and finite, got {self.peak_rabi_hz}")
        for name in ("chirp_span_hz", "phase_offset_rad", "detuning_offset_hz"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)}")
        if not isinstance(self.envelope_kind, EnvelopeKind):
            raise ValueError(f"envelope_kind must be an EnvelopeKind, got {self.envelope_kind!r}")

    @property
    def sigma_s(self) -> float:
        """Gaussian envelope width sigma = T/(6*sqrt(2))."""
        return self.duration_s / (6.0 * math.sqrt(2.0))


def _check_time(pulse: Pulse, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t > pulse.duration_s):
        raise ValueError(f"t must lie in [0, {pulse.duration_s}], got values outside the pulse")
    return t


def amplitude_fraction(pulse: Pulse, t):
    """Envelope as a dimensionless fraction of peak, in [0, 1]."""
    t = _check_time(pulse, t)
    if pulse.envelope_kind is EnvelopeKind.CONSTANT:
        return np.ones_like(t) if t.ndim else 1.0
    x = 2.0 * t / pulse.duration_s - 1.0
    out = np.exp(-EDGE_EXPONENT * x * x)
    return out if t.ndim else float(out)


def envelope(pulse: Pulse, t):
    """Instantaneous Rabi coupling in angular units (rad/s).

    For the truncated Gaussian this is
    2*pi*peak_rabi*exp(-(t - T/2)^2 / (2 sigma^2)) with sigma = T/(6*sqrt(2)).
    Accepts a scalar or an array of times inside [0, T].
    """
    frac = amplitude_fraction(pulse, t)
    return TWO_PI * pulse.peak_rabi_hz * frac


def detuning(pulse: Pulse, t):
    """Instantaneous detuning delta(t) in angular units (rad/s).

    Linear chirp 2*pi*chirp_span*(t/T - 1/2): starts below resonance, crosses
    zero at t = T/2 (where the envelope peaks) and ends above resonance.
    """
    t = _check_time(pulse, t)
    out = TWO_PI * (pulse.chirp_span_hz * (t / pulse.duration_s - 0.5) + pulse.detuning_offset_hz)
    return out if t.ndim else float(out)


def envelope_rate(pulse: Pulse, t):
    """Analytic time derivative of envelope(pulse, t), in rad/s^2."""
    t = _check_time(pulse, t)
    if pulse.envelope_kind is EnvelopeKind.CONSTANT:
        return np.zeros_like(t) if t.ndim else 0.0
    x = 2.0 * t / pulse.duration_s - 1.0
    out = TWO_PI * pulse.peak_rabi_hz * np.exp(-EDGE_EXPONENT * x * x) * (
        -4.0 * EDGE_EXPONENT * x / pulse.duration_s
    )
    return out if t.ndim else float(out)


def detuning_rate(pulse: Pulse) -> float:
    """Chirp rate d(delta)/dt in rad/s^2 (constant for the linear chirp)."""
    return TWO_PI * pulse.chirp_span_hz / pulse.duration_s


@dataclass(frozen=True)
class WaveformSample:
    """One row of the discretized waveform."""

    t_s: float
    amplitude: float      # fraction of peak, 0..1
    detuning_hz: float    # instantaneous delta(t)/2pi
    phase_rad: float      # accumulated chirp phase, trapezoidal integral of delta


def sample_waveform(pulse: Pulse, sample_rate_hz: float) -> list[WaveformSample]:
    """Sample the pulse on a uniform grid covering [0, T] inclusive.

    The grid has round(sample_rate * T) intervals; the phase column is the
    cumulative trapezoidal integral of the angular detuning.
    """
    if not (sample_rate_hz > 0.0 and math.isfinite(sample_rate_hz)):
        raise ValueError(f"sample_rate_hz must be positive and finite, got {sample_rate_hz}")
    n_intervals = int(round(sample_rate_hz * pulse.duration_s))
    if n_intervals < 2:
        raise ValueError(
            f"sample_rate_hz * duration_s must be >= 2, got {sample_rate_hz * pulse.duration_s:g}"
        )
    t = np.linspace(0.0, pulse.duration_s, n_intervals + 1)
    amp = np.asarray(amplitude_fraction(pulse, t))
    delta = np.asarray(detuning(pulse, t))
    dt = pulse.duration_s / n_intervals
    phase = np.concatenate(([0.0], np.cumsum(0.5 * (delta[1:] + delta[:-1]) * dt)))
    return [
        WaveformSample(float(ti), float(ai), float(di / TWO_PI), float(pi))
        for ti, ai, di, pi in zip(t, amp, delta, phase)
    ]


def quantize_amplitude(samples: list[WaveformSample], bits: int) -> list[WaveformSample]:
    """Round each amplitude to the nearest multiple of 1/(2^bits - 1).

    Idempotent; endpoint values 0.0 and 1.0 are preserved exactly.
    """
    if not isinstance(bits, int) or not 1 <= bits <= 32:
        raise ValueError(f"bits must be an integer in [1, 32], got {bits}")
    levels = float(2**bits - 1)
    return [
        WaveformSample(s.t_s, float(np.round(s.amplitude * levels) / levels), s.detuning_hz, s.phase_rad)
        for s in samples
    ]


def write_waveform_csv(samples: list[WaveformSample], path, comment: str | None = None) -> None:
    """Write samples as CSV with header ``t_s,amplitude,detuning_hz,phase_rad``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write("t_s,amplitude,detuning_hz,phase_rad\n")
        for s in samples:
            fh.write(f"{s.t_s:.15g},{s.amplitude:.15g},{s.detuning_hz:.15g},{s.phase_rad:.15g}\n")
