"""Command-line interface: simulate, sweep, rabi, cool, waveform.

Parameters resolve in three layers: built-in defaults, then the section named
after the subcommand in the ``--config`` file (INI ``key = value`` format),
then command-line flags.  Flags win.  Output files carry a leading comment
line with the fully resolved parameter set, so two invocations with the same
configuration and seed produce byte-identical files.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys

import numpy as np

from .analysis import (
    ADIABATIC_ETA_BOUND,
    FitFailureError,
    adiabaticity_profile,
    add_projection_noise,
    fit_rabi,
    simulate_rabi_scan,
    sweep_chirp_span,
    sweep_peak_rabi,
)
from .cooling import (
    PiFixedStrategy,
    RapStrategy,
    SidebandCoupling,
    run_cooling,
    thermal_ladder,
)
from .dynamics import DEFAULT_STEPS_PER_RAD, IntegrationError, evolve_bloch
from .pulse import (
    EnvelopeKind,
    Pulse,
    quantize_amplitude,
    sample_waveform,
    write_waveform_csv,
)

# Default drive: 150 us pulse with a 512 krad/s peak coupling swept over
# 400 kHz, the regime where the transfer plateau sits.
DEFAULT_DURATION_S = 150e-6
DEFAULT_PEAK_RABI_HZ = 512e3 / (2.0 * math.pi)
DEFAULT_CHIRP_SPAN_HZ = 400e3

DEFAULT_RABI_SCAN_HZ = 512e3
DEFAULT_SCAN_PERIODS = 6.0
DEFAULT_SCAN_POINTS = 96
DEFAULT_SHOTS = 100
DEFAULT_SEED = 7

DEFAULT_NBAR = 5.0
DEFAULT_CYCLES = 40
DEFAULT_SAMPLE_RATE_HZ = 1e6

_PULSE_KEYS = {
    "duration_s": (float, DEFAULT_DURATION_S),
    "peak_rabi_hz": (float, DEFAULT_PEAK_RABI_HZ),
    "chirp_span_hz": (float, DEFAULT_CHIRP_SPAN_HZ),
    "phase_offset_rad": (float, 0.0),
    "envelope": (str, "gaussian_truncated"),
}

_SCHEMAS = {
    "simulate": {
        **_PULSE_KEYS,
        "steps_per_rad": (float, DEFAULT_STEPS_PER_RAD),
        "eta_threshold": (float, ADIABATIC_ETA_BOUND),
        "out": (str, "trajectory.csv"),
    },
    "sweep": {
        **_PULSE_KEYS,
        "steps_per_rad": (float, DEFAULT_STEPS_PER_RAD),
        "axis": (str, "chirp_span"),
        "start": (float, 50e3),
        "stop": (float, 1500e3),
        "step": (float, 25e3),
        "values": (str, None),  # None = derive the axis from start/stop/step
        "workers": (int, 0),  # 0 = number of available processors
        "out": (str, "sweep.csv"),
    },
    "rabi": {
        "rabi_hz": (float, DEFAULT_RABI_SCAN_HZ),
        "guess_hz": (float, 0.0),  # 0 = use rabi_hz
        "points": (int, DEFAULT_SCAN_POINTS),
        "t_max_s": (float, 0.0),  # 0 = DEFAULT_SCAN_PERIODS periods at rabi_hz
        "shots": (int, DEFAULT_SHOTS),
        "noiseless": (bool, False),
        "seed": (int, DEFAULT_SEED),
        "steps_per_rad": (float, DEFAULT_STEPS_PER_RAD),
        "out": (str, "rabi_fit.json"),
    },
    "cool": {
        **_PULSE_KEYS,
        "steps_per_rad": (float, DEFAULT_STEPS_PER_RAD),
        "nbar": (float, DEFAULT_NBAR),
        "n_max": (int, 0),  # 0 = max(50, 10*nbar)
        "cycles": (int, DEFAULT_CYCLES),
        "strategy": (str, "rap"),
        "base_rabi_hz": (float, DEFAULT_PEAK_RABI_HZ),
        "pi_duration_s": (float, 0.0),  # 0 = pi pulse for n=1
        "out": (str, "cooling.csv"),
        "trapped_out": (str, "cooling_trapped.json"),
    },
    "waveform": {
        **_PULSE_KEYS,
        "sample_rate_hz": (float, DEFAULT_SAMPLE_RATE_HZ),
        "bits": (int, 0),  # 0 = no quantization
        "out": (str, "waveform.csv"),
    },
}


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"cannot parse boolean value {text!r}")


def _resolve(args: argparse.Namespace, command: str) -> dict:
    """Merge defaults, config-file section and flags into one parameter dict."""
    schema = _SCHEMAS[command]
    from_config: dict[str, str] = {}
    if args.config:
        parser = configparser.ConfigParser()
        read = parser.read(args.config)
        if not read:
            raise ValueError(f"config file not found: {args.config}")
        if parser.has_section(command):
            for key, raw in parser.items(command):
                if key not in schema:
                    raise ValueError(f"unknown key {key!r} in config section [{command}]")
                from_config[key] = raw
    resolved = {}
    for key, (typ, default) in schema.items():
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            resolved[key] = flag_value
        elif key in from_config:
            raw = from_config[key]
            resolved[key] = _parse_bool(raw) if typ is bool else typ(raw)
        else:
            resolved[key] = default
    return resolved


def _pulse_from(params: dict) -> Pulse:
    try:
        kind = EnvelopeKind(params["envelope"])
    except ValueError:
        raise ValueError(
            f"envelope must be one of {[k.value for k in EnvelopeKind]}, got {params['envelope']!r}"
        ) from None
    return Pulse(
        duration_s=params["duration_s"],
        peak_rabi_hz=params["peak_rabi_hz"],
        chirp_span_hz=params["chirp_span_hz"],
        envelope_kind=kind,
        phase_offset_rad=params["phase_offset_rad"],
    )


def _comment(params: dict) -> str:
    return " ".join(f"{key}={params[key]}" for key in sorted(params))


def cmd_simulate(args: argparse.Namespace) -> int:
    params = _resolve(args, "simulate")
    pulse = _pulse_from(params)
    trajectory = evolve_bloch(pulse, steps_per_rad=params["steps_per_rad"])
    peak_eta = adiabaticity_profile(pulse).peak
    trajectory.write_csv(params["out"], comment=_comment(params))
    flag = "no" if peak_eta > params["eta_threshold"] else "yes"
    print(
        f"final_p1={trajectory.final_population:.9f} max_eta={peak_eta:.6g} "
        f"adiabatic={flag} steps={len(trajectory.times) - 1}"
    )
    print(f"wrote {params['out']}")
    return 0


def _sweep_values(params: dict) -> np.ndarray:
    if params["values"] is not None:
        try:
            values = np.array([float(v) for v in params["values"].split(",") if v.strip() != ""])
        except ValueError:
            raise ValueError(f"values must be comma-separated numbers, got {params['values']!r}") from None
    else:
        if params["step"] <= 0.0:
            raise ValueError(f"step must be positive, got {params['step']}")
        values = np.arange(params["start"], params["stop"] + 0.5 * params["step"], params["step"])
    if values.size == 0:
        raise ValueError("sweep axis is empty")
    return values


def cmd_sweep(args: argparse.Namespace) -> int:
    params = _resolve(args, "sweep")
    base = _pulse_from(params)
    values = _sweep_values(params)
    workers = params["workers"] if params["workers"] > 0 else None
    if params["axis"] == "chirp_span":
        result = sweep_chirp_span(base, values, steps_per_rad=params["steps_per_rad"], workers=workers)
    elif params["axis"] == "peak_rabi":
        result = sweep_peak_rabi(base, values, steps_per_rad=params["steps_per_rad"], workers=workers)
    else:
        raise ValueError(f"axis must be 'chirp_span' or 'peak_rabi', got {params['axis']!r}")
    result.write_csv(params["out"], comment=_comment(params))
    ok = sum(1 for s in result.statuses if s == "ok")
    finite = result.efficiencies[np.isfinite(result.efficiencies)]
    print(
        f"points={values.size} ok={ok} min_eff={finite.min():.6f} "
        f"mean_eff={finite.mean():.6f} max_eff={finite.max():.6f}"
    )
    print(f"wrote {params['out']}")
    return 0 if result.all_ok else 1


def cmd_rabi(args: argparse.Namespace) -> int:
    params = _resolve(args, "rabi")
    rabi = params["rabi_hz"]
    if rabi <= 0.0:
        raise ValueError(f"rabi_hz must be positive, got {rabi}")
    if params["points"] < 8:
        raise ValueError(f"points must be >= 8, got {params['points']}")
    t_max = params["t_max_s"] if params["t_max_s"] > 0.0 else DEFAULT_SCAN_PERIODS / rabi
    guess = params["guess_hz"] if params["guess_hz"] > 0.0 else rabi
    durations = np.linspace(0.0, t_max, params["points"])
    data = simulate_rabi_scan(rabi, durations, steps_per_rad=params["steps_per_rad"])
    if not params["noiseless"]:
        data = add_projection_noise(data, shots=params["shots"], seed=params["seed"])
    fit = fit_rabi(data, guess)
    with open(params["out"], "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(fit.to_json_dict(), indent=2, sort_keys=True))
        fh.write("\n")
    fractional = abs(fit.fitted_rabi_hz - rabi) / rabi
    print(
        f"true_rabi_hz={rabi:.6g} fitted_rabi_hz={fit.fitted_rabi_hz:.6f} "
        f"fractional_error={fractional:.3e} iterations={fit.iterations}"
    )
    print(f"wrote {params['out']}")
    return 0


def cmd_cool(args: argparse.Namespace) -> int:
    params = _resolve(args, "cool")
    if params["cycles"] < 1:
        raise ValueError(f"cycles must be >= 1, got {params['cycles']}")
    coupling = SidebandCoupling(base_rabi_hz=params["base_rabi_hz"])
    if params["strategy"] == "rap":
        pulse = _pulse_from({**params, "peak_rabi_hz": params["base_rabi_hz"]})
        strategy = RapStrategy(pulse)
    elif params["strategy"] == "pi_fixed":
        duration = params["pi_duration_s"]
        if duration <= 0.0:
            if coupling.base_rabi_hz <= 0.0:
                raise ValueError("base_rabi_hz must be positive for the default pi duration")
            duration = 1.0 / (2.0 * coupling.base_rabi_hz)
        strategy = PiFixedStrategy(duration)
    else:
        raise ValueError(f"strategy must be 'rap' or 'pi_fixed', got {params['strategy']!r}")
    n_max = params["n_max"] if params["n_max"] > 0 else None
    ladder = thermal_ladder(params["nbar"], n_max)
    report = run_cooling(ladder, coupling, strategy, params["cycles"],
                         steps_per_rad=params["steps_per_rad"])
    report.write_csv(params["out"], comment=_comment(params))
    with open(params["trapped_out"], "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(sorted(report.trapped_levels)))
        fh.write("\n")
    print(
        f"cycles={report.cycles} final_mean_n={report.final.mean_n:.6g} "
        f"final_p_ground={report.final.ground_population:.9f} "
        f"trapped_levels={sorted(report.trapped_levels)}"
    )
    print(f"wrote {params['out']} and {params['trapped_out']}")
    return 0


def cmd_waveform(args: argparse.Namespace) -> int:
    params = _resolve(args, "waveform")
    pulse = _pulse_from(params)
    if params["sample_rate_hz"] <= 0.0:
        raise ValueError(f"sample_rate_hz must be positive, got {params['sample_rate_hz']}")
    samples = sample_waveform(pulse, params["sample_rate_hz"])
    if params["bits"]:
        samples = quantize_amplitude(samples, params["bits"])
    write_waveform_csv(samples, params["out"], comment=_comment(params))
    print(f"samples={len(samples)}")
    print(f"wrote {params['out']}")
    return 0


def _add_pulse_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--duration-s", type=float, default=None, help="pulse length T in seconds")
    sub.add_argument("--peak-rabi-hz", type=float, default=None, help="peak Rabi frequency (Hz)")
    sub.add_argument("--chirp-span-hz", type=float, default=None, help="full detuning sweep range (Hz)")
    sub.add_argument("--phase-offset-rad", type=float, default=None, help="constant drive phase")
    sub.add_argument("--envelope", choices=[k.value for k in EnvelopeKind], default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rapsim",
        description="Simulate chirped-pulse adiabatic passage in a two-level system.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="INI file with one section per subcommand")
    common.add_argument("--out", default=None, help="output file path")
    common.add_argument("--steps-per-rad", type=float, default=None,
                        help="integration steps per radian of drive rotation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="integrate one pulse, write the trajectory")
    _add_pulse_flags(p)
    p.add_argument("--eta-threshold", type=float, default=None,
                   help="flag the run non-adiabatic when max eta exceeds this")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="transfer efficiency along a pulse axis")
    _add_pulse_flags(p)
    p.add_argument("--axis", choices=["chirp_span", "peak_rabi"], default=None)
    p.add_argument("--start", type=float, default=None, help="first axis value (Hz)")
    p.add_argument("--stop", type=float, default=None, help="last axis value (Hz), inclusive")
    p.add_argument("--step", type=float, default=None, help="axis increment (Hz)")
    p.add_argument("--values", default=None, help="explicit comma-separated axis values (overrides start/stop/step)")
    p.add_argument("--workers", type=int, default=None, help="parallel sweep workers (0 = all processors)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rabi", parents=[common], help="synthesize resonant Rabi data and fit the frequency")
    p.add_argument("--rabi-hz", type=float, default=None, help="true Rabi frequency of the synthetic scan")
    p.add_argument("--guess-hz", type=float, default=None, help="fit starting frequency (default: rabi-hz)")
    p.add_argument("--points", type=int, default=None, help="number of scan durations (>= 8)")
    p.add_argument("--t-max-s", type=float, default=None, help="longest scan duration")
    p.add_argument("--shots", type=int, default=None, help="measurement shots per point")
    p.add_argument("--noiseless", action="store_true", default=None, help="skip projection noise")
    p.add_argument("--seed", type=int, default=None, help="noise generator seed")
    p.set_defaults(func=cmd_rabi)

    p = sub.add_parser("cool", parents=[common], help="sideband cooling of a thermal ladder")
    _add_pulse_flags(p)
    p.add_argument("--nbar", type=float, default=None, help="initial thermal mean occupation")
    p.add_argument("--n-max", type=int, default=None, help="ladder truncation (0 = auto)")
    p.add_argument("--cycles", type=int, default=None, help="number of cooling cycles (>= 1)")
    p.add_argument("--strategy", choices=["rap", "pi_fixed"], default=None)
    p.add_argument("--base-rabi-hz", type=float, default=None, help="sideband coupling at scaling 1")
    p.add_argument("--pi-duration-s", type=float, default=None,
                   help="fixed pulse duration for pi_fixed (default: pi pulse for n=1)")
    p.add_argument("--trapped-out", default=None, help="path for the trapped-level JSON list")
    p.set_defaults(func=cmd_cool)

    p = sub.add_parser("waveform", parents=[common], help="sample and export the drive waveform")
    _add_pulse_flags(p)
    p.add_argument("--sample-rate-hz", type=float, default=None)
    p.add_argument("--bits", type=int, default=None, help="quantize amplitudes to this bit depth")
    p.set_defaults(func=cmd_waveform)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FitFailureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
