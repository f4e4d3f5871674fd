"""Adiabaticity diagnostics, transfer-efficiency sweeps and Rabi-frequency fitting."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import DEFAULT_STEPS_PER_RAD, IntegrationError, transfer_efficiency
from .pulse import EnvelopeKind, Pulse, detuning, detuning_rate, envelope, envelope_rate

# A sweep point whose peak adiabaticity metric stays below this bound is
# expected to transfer with > 0.99 efficiency.  Empirical threshold, tuned on
# the chirp-span and peak-coupling sweeps at the default pulse; not a
# physical law.
ADIABATIC_ETA_BOUND = 0.2

DEFAULT_ETA_SAMPLES = 1001


@dataclass(frozen=True)
class AdiabaticityProfile:
    """Dimensionless adiabaticity metric eta(t) = |dOmega/dt| / |Omega|^2.

    The drive follows its own torque adiabatically while eta << 1.  Grid
    points where |Omega| = 0 are reported as +inf.
    """

    times: np.ndarray
    metric: np.ndarray

    @property
    def peak(self) -> float:
        return float(np.max(self.metric))


def adiabaticity_profile(pulse: Pulse, n_samples: int = DEFAULT_ETA_SAMPLES) -> AdiabaticityProfile:
    """Evaluate eta(t) on a uniform grid, using analytic derivatives.

    Omega(t) = (E(t) cos phi, E(t) sin phi, delta(t)), so |dOmega/dt| =
    hypot(dE/dt, d delta/dt) and |Omega|^2 = E^2 + delta^2; both factors are
    closed-form for the Gaussian envelope and linear chirp.
    """
    if n_samples < 3:
        raise ValueError(f"n_samples must be >= 3, got {n_samples}")
    t = np.linspace(0.0, pulse.duration_s, n_samples)
    coupling = np.asarray(envelope(pulse, t), dtype=float)
    delta = np.asarray(detuning(pulse, t), dtype=float)
    rate = np.hypot(np.asarray(envelope_rate(pulse, t), dtype=float), detuning_rate(pulse))
    squared = coupling**2 + delta**2
    with np.errstate(divide="ignore", invalid="ignore"):
        metric = np.where(squared > 0.0, rate / squared, np.inf)
    return AdiabaticityProfile(t, metric)


@dataclass(frozen=True)
class SweepResult:
    """Transfer efficiency and peak adiabaticity metric along one pulse axis."""

    axis_name: str
    axis_values: np.ndarray
    efficiencies: np.ndarray   # nan where a point failed
    peak_metric: np.ndarray
    statuses: tuple[str, ...]  # "ok" or "error: ..."

    @property
    def all_ok(self) -> bool:
        return all(s == "ok" for s in self.statuses)

    def write_csv(self, path, comment: str | None = None) -> None:
        """CSV with header ``axis_value,efficiency,peak_adiabaticity_metric,status``."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            if comment:
                fh.write(f"# {comment}\n")
            fh.write("axis_value,efficiency,peak_adiabaticity_metric,status\n")
            for v, e, m, s in zip(self.axis_values, self.efficiencies, self.peak_metric, self.statuses):
                fh.write(f"{v:.15g},{e:.15g},{m:.15g},{s}\n")


def _sweep(base: Pulse, field: str, values, steps_per_rad: float, eta_samples: int,
           workers: int | None) -> SweepResult:
    values = np.asarray(values, dtype=float)

    def one_point(value: float) -> tuple[float, float, str]:
        p = replace(base, **{field: float(value)})
        peak_eta = adiabaticity_profile(p, eta_samples).peak
        try:
            eff = transfer_efficiency(p, steps_per_rad)
        except IntegrationError as exc:
            return math.nan, peak_eta, f"error: {exc}"
        return eff, peak_eta, "ok"

    if workers is None:
        workers = os.cpu_count() or 1
    if workers > 1 and len(values) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one_point, values))
    else:
        rows = [one_point(v) for v in values]
    eff = np.array([r[0] for r in rows])
    eta = np.array([r[1] for r in rows])
    statuses = tuple(r[2] for r in rows)
    return SweepResult(field, values, eff, eta, statuses)


def sweep_chirp_span(
    base: Pulse,
    spans_hz,
    steps_per_rad: float = DEFAULT_STEPS_PER_RAD,
    eta_samples: int = DEFAULT_ETA_SAMPLES,
    workers: int | None = None,
) -> SweepResult:
    """Transfer efficiency of ``base`` with its chirp span replaced by each value.

    Points are independent and may be evaluated concurrently; the result is
    ordered as the input regardless of scheduling.  A failed point is
    recorded in its status and does not abort the sweep.
    """
    spans_hz = np.asarray(spans_hz, dtype=float)
    if spans_hz.size == 0:
        raise ValueError("spans_hz must be nonempty")
    if np.any(spans_hz < 0.0):
        raise ValueError("spans_hz values must be >= 0")
    return _sweep(base, "chirp_span_hz", spans_hz, steps_per_rad, eta_samples, workers)


def sweep_peak_rabi(
    base: Pulse,
    peaks_hz,
    steps_per_rad: float = DEFAULT_STEPS_PER_RAD,
    eta_samples: int = DEFAULT_ETA_SAMPLES,
    workers: int | None = None,
) -> SweepResult:
    """Transfer efficiency of ``base`` with its peak Rabi frequency swept."""
    peaks_hz = np.asarray(peaks_hz, dtype=float)
    if peaks_hz.size == 0:
        raise ValueError("peaks_hz must be nonempty")
    if np.any(peaks_hz < 0.0):
        raise ValueError("peaks_hz values must be >= 0")
    return _sweep(base, "peak_rabi_hz", peaks_hz, steps_per_rad, eta_samples, workers)


def simulate_rabi_scan(
    rabi_hz: float,
    durations_s,
    steps_per_rad: float = DEFAULT_STEPS_PER_RAD,
) -> list[tuple[float, float]]:
    """Resonant Rabi flopping: P_|1>(t) for constant drive, one point per duration.

    Equals sin^2(pi * rabi * t) up to integrator tolerance.
    """
    if not (rabi_hz > 0.0 and math.isfinite(rabi_hz)):
        raise ValueError(f"rabi_hz must be positive, got {rabi_hz}")
    points = []
    for t in np.asarray(durations_s, dtype=float):
        if t < 0.0:
            raise ValueError(f"durations_s must be >= 0, got {t}")
        if t == 0.0:
            points.append((0.0, 0.0))
            continue
        p = Pulse(duration_s=float(t), peak_rabi_hz=rabi_hz, chirp_span_hz=0.0,
                  envelope_kind=EnvelopeKind.CONSTANT)
        points.append((float(t), transfer_efficiency(p, steps_per_rad)))
    return points


def add_projection_noise(
    data: list[tuple[float, float]],
    shots: int = 100,
    seed: int = 7,
) -> list[tuple[float, float]]:
    """Replace each probability with a binomial finite-shot estimate.

    Emulates quantum projection noise: each point becomes k/shots with
    k ~ Binomial(shots, p), drawn from a seeded generator.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    return [(t, float(rng.binomial(shots, p) / shots)) for t, p in data]


class FitFailureError(RuntimeError):
    """Raised when the sinusoid fit does not converge; carries the last iterate."""

    def __init__(self, message: str, last_fit: "RabiFit"):
        super().__init__(message)
        self.last_fit = last_fit


@dataclass(frozen=True)
class RabiFit:
    """Converged parameters of p(t) = amplitude*sin^2(pi*f*t + phase) + offset."""

    fitted_rabi_hz: float
    amplitude: float
    offset: float
    phase_rad: float
    residual_rms: float
    iterations: int
    degenerate: bool = False

    def to_json_dict(self) -> dict:
        return {
            "fitted_rabi_hz": self.fitted_rabi_hz,
            "amplitude": self.amplitude,
            "offset": self.offset,
            "phase_rad": self.phase_rad,
            "residual_rms": self.residual_rms,
            "iterations": self.iterations,
        }


DEGENERATE_AMPLITUDE = 1e-6
MAX_FIT_ITERATIONS = 200


def _sin2_residuals(params, t, p):
    amp, off, freq, phase = params
    theta = math.pi * freq * t + phase
    return amp * np.sin(theta) ** 2 + off - p


def _sin2_jacobian(params, t):
    amp, off, freq, phase = params
    theta = math.pi * freq * t + phase
    s2 = np.sin(2.0 * theta)
    jac = np.empty((t.size, 4))
    jac[:, 0] = np.sin(theta) ** 2
    jac[:, 1] = 1.0
    jac[:, 2] = amp * s2 * math.pi * t
    jac[:, 3] = amp * s2
    return jac


def fit_rabi(
    data: list[tuple[float, float]],
    initial_guess_hz: float,
    max_iterations: int = MAX_FIT_ITERATIONS,
) -> RabiFit:
    """Least-squares fit of amplitude*sin^2(pi*f*t + phase) + offset.

    Damped Gauss-Newton from the frequency guess; amplitude and offset start
    from the data range and the phase from zero.  Needs at least 8 points
    spanning one oscillation period near the guess.  A flat data set
    converges to amplitude ~ 0 and is flagged ``degenerate`` (the frequency
    is unconstrained there).  Raises FitFailureError, carrying the last
    iterate, if the iteration cap is reached without convergence.
    """
    t = np.array([d[0] for d in data], dtype=float)
    p = np.array([d[1] for d in data], dtype=float)
    if t.size < 8:
        raise ValueError(f"need at least 8 data points, got {t.size}")
    if not (initial_guess_hz > 0.0 and math.isfinite(initial_guess_hz)):
        raise ValueError(f"initial_guess_hz must be positive, got {initial_guess_hz}")
    t_span = float(t.max() - t.min())
    if t_span * initial_guess_hz < 1.0:
        raise ValueError(
            f"data spans {t_span:g} s, less than one period at the guess {initial_guess_hz:g} Hz"
        )

    # Work with tau = t/t_span and f_scaled = f*t_span so all four parameters
    # are O(1) and plain identity damping is well conditioned.
    tau = t / t_span
    spread = float(p.max() - p.min())
    params = np.array([spread, float(p.min()), initial_guess_hz * t_span, 0.0])

    lam = 1e-3
    cost = float(np.sum(_sin2_residuals(params, tau, p) ** 2))
    iterations = 0
    converged = False
    while iterations < max_iterations:
        iterations += 1
        resid = _sin2_residuals(params, tau, p)
        jac = _sin2_jacobian(params, tau)
        grad = jac.T @ resid
        hess = jac.T @ jac
        try:
            delta = np.linalg.solve(hess + lam * np.eye(4), -grad)
        except np.linalg.LinAlgError:
            lam *= 10.0
            continue
        trial = params + delta
        trial_cost = float(np.sum(_sin2_residuals(trial, tau, p) ** 2))
        if trial_cost <= cost:
            step = float(np.max(np.abs(delta) / np.maximum(np.abs(params), 1e-12)))
            params, cost = trial, trial_cost
            lam = max(lam / 3.0, 1e-14)
            if step < 1e-12:
                converged = True
                break
        else:
            lam *= 10.0
            if lam > 1e12:
                # Damping saturated: no direction improves the cost.
                converged = True
                break

    amp, off, f_scaled, phase = params
    freq = f_scaled / t_span
    if freq < 0.0:
        # sin^2(pi f t + phi) is invariant under (f, phi) -> (-f, -phi)
        freq, phase = -freq, -phase
    rms = math.sqrt(cost / t.size)
    degenerate = abs(amp) < DEGENERATE_AMPLITUDE or freq == 0.0
    fit = RabiFit(freq if freq > 0.0 else initial_guess_hz, float(amp), float(off),
                  float(phase), rms, iterations, degenerate)
    if not converged:
        raise FitFailureError(f"no convergence after {iterations} iterations", fit)
    return fit
