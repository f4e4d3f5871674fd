"""Simulation of robust adiabatic passage in a driven two-level system.

Builds chirped Gaussian drive pulses, integrates the resulting Bloch-vector
and amplitude dynamics, sweeps transfer efficiency against pulse parameters,
fits resonant Rabi oscillations, and compares sideband-cooling strategies on
a thermal vibrational ladder.
"""

from .analysis import (
    ADIABATIC_ETA_BOUND,
    AdiabaticityProfile,
    FitFailureError,
    RabiFit,
    SweepResult,
    adiabaticity_profile,
    add_projection_noise,
    fit_rabi,
    simulate_rabi_scan,
    sweep_chirp_span,
    sweep_peak_rabi,
)
from .cooling import (
    CoolingReport,
    LadderState,
    PiFixedStrategy,
    RapStrategy,
    SidebandCoupling,
    run_cooling,
    sideband_transfer_pi,
    sideband_transfer_rap,
    sqrt_n,
    sqrt_n_minus_1,
    thermal_ladder,
)
from .dynamics import (
    AMPLITUDE_GROUND,
    DEFAULT_STEPS_PER_RAD,
    EXCITED,
    GROUND,
    AmplitudeState,
    AmplitudeTrajectory,
    BlochState,
    DriveVector,
    IntegrationError,
    Trajectory,
    drive_at,
    evolve_amplitudes,
    evolve_bloch,
    transfer_efficiency,
)
from .pulse import (
    EDGE_FRACTION,
    EnvelopeKind,
    Pulse,
    WaveformSample,
    detuning,
    envelope,
    quantize_amplitude,
    sample_waveform,
    write_waveform_csv,
)

__version__ = "0.1.0"
