"""Red-sideband cooling of a vibrational ladder: fixed pi-pulses vs adiabatic sweeps.

Idealized model: the internal transition |0,n> -> |1,n-1> is driven with a
coupling base_rabi * scaling(n), the subsequent radiative decay recycles the
population instantly and without branching, and there is no heating.  Each
cooling cycle therefore moves the transferred fraction of every level one
step down the ladder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .dynamics import DEFAULT_STEPS_PER_RAD, transfer_efficiency
from .pulse import Pulse

# A level whose per-cycle transfer probability falls below this is reported
# as trapped: population parks there and stalls the cooling cycle.
TRAPPED_TRANSFER_THRESHOLD = 1e-3


def sqrt_n(n: int) -> float:
    """Standard sideband coupling scaling: the n -> n-1 matrix element grows as sqrt(n)."""
    return math.sqrt(n)


def sqrt_n_minus_1(n: int) -> float:
    """Alternative scaling sqrt(n-1).  Makes n=1 dark, so cooling stalls one level up."""
    return math.sqrt(max(n - 1, 0))


@dataclass(frozen=True)
class SidebandCoupling:
    """Coupling strength of the red-sideband transition per vibrational level."""

    base_rabi_hz: float
    scaling: Callable[[int], float] = sqrt_n

    def __post_init__(self) -> None:
        if not (self.base_rabi_hz >= 0.0 and math.isfinite(self.base_rabi_hz)):
            raise ValueError(f"base_rabi_hz must be >= 0, got {self.base_rabi_hz}")
        if self.scaling(0) != 0.0:
            raise ValueError("scaling(0) must be 0: the ground state is dark on the red sideband")

    def rabi_hz(self, n: int) -> float:
        return self.base_rabi_hz * self.scaling(n)


@dataclass(frozen=True)
class LadderState:
    """Populations of the vibrational levels 0..n_max plus a cycle counter."""

    populations: np.ndarray
    cycle: int = 0

    @property
    def n_max(self) -> int:
        return len(self.populations) - 1

    @property
    def mean_n(self) -> float:
        return float(np.arange(len(self.populations)) @ self.populations)

    @property
    def ground_population(self) -> float:
        return float(self.populations[0])

    @property
    def total(self) -> float:
        return float(np.sum(self.populations))


def thermal_ladder(nbar: float, n_max: int | None = None) -> LadderState:
    """Thermal (geometric) distribution p(n) = nbar^n / (nbar+1)^(n+1), truncated.

    The truncated tail is renormalized away.  The default cutoff 10*nbar
    (minimum 50) keeps the truncation error of the geometric series below
    1e-4 for nbar up to ~15.
    """
    if not (nbar >= 0.0 and math.isfinite(nbar)):
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    if n_max is None:
        n_max = max(50, math.ceil(10 * nbar))
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    n = np.arange(n_max + 1)
    if nbar == 0.0:
        p = np.zeros(n_max + 1)
        p[0] = 1.0
    else:
        # log-space to stay finite for large n
        logp = n * math.log(nbar) - (n + 1) * math.log(nbar + 1.0)
        p = np.exp(logp)
        p /= p.sum()
    return LadderState(p)


def sideband_transfer_pi(coupling: SidebandCoupling, pulse_duration_s: float, n: int) -> float:
    """Transfer probability of a fixed-duration resonant sideband pulse on level n.

    sin^2(pi * rabi(n) * duration); zero for n = 0.  A level whose pulse area
    is an integer 2pi cycle (rabi(n) * duration integer) transfers nothing.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if pulse_duration_s < 0.0:
        raise ValueError(f"pulse_duration_s must be >= 0, got {pulse_duration_s}")
    if n == 0:
        return 0.0
    return math.sin(math.pi * coupling.rabi_hz(n) * pulse_duration_s) ** 2


def sideband_transfer_rap(
    coupling: SidebandCoupling,
    rap_pulse: Pulse,
    n: int,
    steps_per_rad: float = DEFAULT_STEPS_PER_RAD,
) -> float:
    """Transfer probability of a chirped adiabatic sideband pulse on level n.

    Runs the two-level evolution with the pulse's envelope and chirp but peak
    coupling base_rabi * scaling(n); zero for n = 0.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return 0.0
    peak = coupling.rabi_hz(n)
    if peak == 0.0:
        return 0.0
    return transfer_efficiency(replace(rap_pulse, peak_rabi_hz=peak), steps_per_rad)


@dataclass(frozen=True)
class PiFixedStrategy:
    """Every cycle applies the same fixed-duration resonant sideband pulse."""

    duration_s: float

    def transfer(self, coupling: SidebandCoupling, n: int,
                 steps_per_rad: float = DEFAULT_STEPS_PER_RAD) -> float:
        return sideband_transfer_pi(coupling, self.duration_s, n)


@dataclass(frozen=True)
class RapStrategy:
    """Every cycle applies the same chirped adiabatic sideband pulse."""

    pulse: Pulse

    def transfer(self, coupling: SidebandCoupling, n: int,
                 steps_per_rad: float = DEFAULT_STEPS_PER_RAD) -> float:
        return sideband_transfer_rap(coupling, self.pulse, n, steps_per_rad)


@dataclass(frozen=True)
class CoolingReport:
    cycles: int
    mean_n_history: np.ndarray                 # length cycles + 1
    ground_state_population_history: np.ndarray
    trapped_levels: frozenset[int]             # n >= 1 with per-cycle transfer < threshold
    transfers: np.ndarray                      # per-level transfer probability used each cycle
    final: LadderState

    def write_csv(self, path, comment: str | None = None) -> None:
        """CSV with header ``cycle,mean_n,p_ground``."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            if comment:
                fh.write(f"# {comment}\n")
            fh.write("cycle,mean_n,p_ground\n")
            for c, (m, g) in enumerate(zip(self.mean_n_history, self.ground_state_population_history)):
                fh.write(f"{c},{m:.15g},{g:.15g}\n")


def run_cooling(
    initial: LadderState,
    coupling: SidebandCoupling,
    strategy: PiFixedStrategy | RapStrategy,
    cycles: int,
    steps_per_rad: float = DEFAULT_STEPS_PER_RAD,
) -> CoolingReport:
    """Iterate cooling cycles: level n loses p(n)*transfer(n) to level n-1.

    The per-level transfer probabilities depend only on the strategy and
    coupling, so they are computed once and reused every cycle.  With no
    heating term the mean occupation is non-increasing and the total
    population is conserved exactly.
    """
    if cycles < 1:
        raise ValueError(f"cycles must be >= 1, got {cycles}")
    n_max = initial.n_max
    transfers = np.array(
        [strategy.transfer(coupling, n, steps_per_rad) for n in range(n_max + 1)]
    )
    transfers[0] = 0.0

    p = initial.populations.copy()
    levels = np.arange(n_max + 1)
    mean_hist = [float(levels @ p)]
    ground_hist = [float(p[0])]
    for _ in range(cycles):
        moved = p * transfers
        p = p - moved
        p[:-1] += moved[1:]
        mean_hist.append(float(levels @ p))
        ground_hist.append(float(p[0]))

    trapped = frozenset(
        int(n) for n in range(1, n_max + 1) if transfers[n] < TRAPPED_TRANSFER_THRESHOLD
    )
    return CoolingReport(
        cycles=cycles,
        mean_n_history=np.array(mean_hist),
        ground_state_population_history=np.array(ground_hist),
        trapped_levels=trapped,
        transfers=transfers,
        final=LadderState(p, cycle=initial.cycle + cycles),
    )
