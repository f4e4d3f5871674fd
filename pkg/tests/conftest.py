"""Shared reference parameters for the test suite."""

import math

from rapsim import Pulse

# Reference drive used throughout: 150 us Gaussian pulse with a peak coupling
# of 512 krad/s, chirped over 400 kHz.  Sits well inside the transfer plateau.
REFERENCE_PEAK_RABI_HZ = 512e3 / (2.0 * math.pi)
REFERENCE_DURATION_S = 150e-6
REFERENCE_CHIRP_SPAN_HZ = 400e3


def reference_pulse(**overrides) -> Pulse:
    params = dict(
        duration_s=REFERENCE_DURATION_S,
        peak_rabi_hz=REFERENCE_PEAK_RABI_HZ,
        chirp_span_hz=REFERENCE_CHIRP_SPAN_HZ,
    )
    params.update(overrides)
    return Pulse(**params)
