"""Command line interface: ``pulsedemod {synth,demod,estimate,hrv,bench}``.

Exit codes: 0 success, 1 usage error, 2 data/parse error, 3 numerical error.
Errors are reported as a single ``error: ...`` line on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import io as fileio
from .bench import REPORTED_SPEEDUP_VS_AD, REPORTED_SPEEDUP_VS_DACM, compare_methods
from .compensate import estimate_rotation, remove_dc, rotate
from .demod import METHODS, demodulate
from .errors import NumericalError, ParseError, PulseDemodError, ValidationError
from .estimate import (
    BREATHING_BAND,
    HEART_BAND,
    bandpass,
    detect_heartbeats,
    estimate_rate_spectral,
    hrv_indices,
    relative_error_radial,
)
from .signal_model import RadarConfig, VSParams
from .synth import Impairments, displacement_to_iq, displacement_to_phase, synth_displacement

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

SEED_ENV = "PULSEDEMOD_SEED"
DEFAULT_SEED = 0

# scenario used by ``bench --synth-default``
DEFAULT_SCENARIO = dict(ab=4e-3, fb=0.25, ah=3e-4, fh=1.2, fs=500.0, fc=24e9)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _methods(raw):
    names = [m.strip() for m in raw.split(",") if m.strip()]
    unknown = [m for m in names if m not in METHODS]
    if unknown:
        raise UsageError(f"unknown method(s) {', '.join(unknown)}; choose from {', '.join(METHODS)}")
    return names


def _emit_json(obj, out):
    text = json.dumps(obj, indent=2)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_synth(args):
    params = VSParams(args.ab, args.fb, args.ah, args.fh, args.pb, args.ph)
    cfg = RadarConfig(args.fc, args.theta)
    x = synth_displacement(params, args.fs, args.dur)
    imp = Impairments(args.noise, args.amplitude, args.dc_i, args.dc_q)
    iq = displacement_to_iq(x, cfg, imp, seed=_seed(args))
    fileio.write_iq(args.output, iq, cfg.carrier_frequency)
    if args.truth:
        fileio.write_truth_csv(args.truth, x, displacement_to_phase(x, cfg))
    return EXIT_OK


def _compensate(iq, args):
    if args.remove_dc:
        iq, _ = remove_dc(iq)
    if args.theta == "auto":
        iq = rotate(iq, estimate_rotation(iq))
    elif args.theta is not None:
        try:
            theta = float(args.theta)
        except ValueError:
            raise UsageError(f"--theta must be a number or 'auto', got {args.theta!r}") from None
        iq = rotate(iq, theta)
    return iq


def cmd_demod(args):
    iq, _ = fileio.read_iq(args.input, args.fs, args.fc)
    iq = _compensate(iq, args)
    fileio.write_phase_csv(args.output, demodulate(iq, args.method))
    return EXIT_OK


def cmd_estimate(args):
    phase = fileio.read_phase_csv(args.input)
    br = estimate_rate_spectral(phase, tuple(args.br_band))
    hr = estimate_rate_spectral(phase, tuple(args.hr_band))
    if args.json:
        _emit_json({"br_hz": br, "hr_hz": hr}, None)
    else:
        print(f"BR {br:.4f} Hz ({60 * br:.2f} /min)")
        print(f"HR {hr:.4f} Hz ({60 * hr:.2f} /min)")
    return EXIT_OK


def cmd_hrv(args):
    if (args.input is None) == (args.rr is None):
        raise UsageError("give exactly one of a phase file or --rr")
    if args.rr is not None:
        rr = fileio.read_reference_rr(args.rr, args.rr_mode)
    else:
        phase = fileio.read_phase_csv(args.input)
        rr = detect_heartbeats(bandpass(phase, *args.hr_band))
    hrv = hrv_indices(rr)
    rel = None
    if args.reference:
        ref = hrv_indices(fileio.read_reference_rr(args.reference, args.reference_mode))
        rel = relative_error_radial(ref, hrv)
    _emit_json(fileio.hrv_to_json(hrv, rel), args.output)
    return EXIT_OK


def cmd_bench(args):
    methods = _methods(args.methods)
    truth = None
    if args.synth_default:
        if args.input:
            raise UsageError("give either an input file or --synth-default, not both")
        s = DEFAULT_SCENARIO
        params = VSParams(s["ab"], s["fb"], s["ah"], s["fh"])
        cfg = RadarConfig(s["fc"])
        x = synth_displacement(params, s["fs"], args.n / s["fs"])
        iq = displacement_to_iq(x, cfg, Impairments(noise_sigma=args.noise), seed=_seed(args))
        truth = displacement_to_phase(x, cfg)
    elif args.input:
        iq, _ = fileio.read_iq(args.input, args.fs, args.fc)
        if args.truth:
            truth = fileio.read_phase_csv(args.truth)
    else:
        raise UsageError("bench needs an input file or --synth-default")
    report = compare_methods(iq, truth, methods, args.reps, args.warmup)
    _emit_json(fileio.bench_to_json(report), args.output)
    names = [r.method_name for r in report]
    if "bert" in names:
        for base, claim in (("ad", REPORTED_SPEEDUP_VS_AD), ("dacm", REPORTED_SPEEDUP_VS_DACM)):
            if base in names:
                print(f"speedup bert vs {base}: {report.speedup(base):.2f}x "
                      f"(reported on clinical data: {claim:.0f}x)", file=sys.stderr)
    return EXIT_OK


def build_parser():
    p = _Parser(prog="pulsedemod", description="Bioradar vital-signs demodulation toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="write synthetic IQ and ground truth")
    s.add_argument("--ab", type=float, required=True, help="breathing amplitude [m]")
    s.add_argument("--fb", type=float, required=True, help="breathing frequency [Hz]")
    s.add_argument("--ah", type=float, required=True, help="heartbeat amplitude [m]")
    s.add_argument("--fh", type=float, required=True, help="heartbeat frequency [Hz]")
    s.add_argument("--pb", type=float, default=0.0, help="breathing phase [rad]")
    s.add_argument("--ph", type=float, default=0.0, help="heartbeat phase [rad]")
    s.add_argument("--fs", type=float, required=True, help="sampling rate [Hz]")
    s.add_argument("--dur", type=float, required=True, help="duration [s]")
    s.add_argument("--fc", type=float, default=24e9, help="carrier frequency [Hz]")
    s.add_argument("--theta", type=float, default=0.0, help="path phase [rad]")
    s.add_argument("--noise", type=float, default=0.0, help="IQ noise standard deviation")
    s.add_argument("--amplitude", type=float, default=1.0)
    s.add_argument("--dc-i", type=float, default=0.0)
    s.add_argument("--dc-q", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("-o", "--output", required=True, help="IQ file (.csv or .bin)")
    s.add_argument("--truth", help="ground-truth CSV (t,x_m,phase_rad)")
    s.set_defaults(func=cmd_synth)

    d = sub.add_parser("demod", help="demodulate IQ into phase")
    d.add_argument("input")
    d.add_argument("--method", choices=list(METHODS), default="bert-c")
    d.add_argument("--remove-dc", action="store_true", help="subtract a fitted circle center")
    d.add_argument("--theta", default=None, help="rotate by this path phase, or 'auto'")
    d.add_argument("--fs", type=float, help="sampling rate when the file has no t column")
    d.add_argument("--fc", type=float, help="carrier frequency override")
    d.add_argument("-o", "--output", required=True, help="phase CSV (t,phase_rad)")
    d.set_defaults(func=cmd_demod)

    e = sub.add_parser("estimate", help="breathing and heart rate from phase")
    e.add_argument("input")
    e.add_argument("--br-band", type=float, nargs=2, default=list(BREATHING_BAND), metavar=("LOW", "HIGH"))
    e.add_argument("--hr-band", type=float, nargs=2, default=list(HEART_BAND), metavar=("LOW", "HIGH"))
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_estimate)

    h = sub.add_parser("hrv", help="HRV indices from phase or RR intervals")
    h.add_argument("input", nargs="?", help="phase CSV")
    h.add_argument("--rr", help="RR file instead of a phase file")
    h.add_argument("--rr-mode", choices=["interval", "timestamp"], default="interval")
    h.add_argument("--reference", help="reference RR file (adds relative errors)")
    h.add_argument("--reference-mode", choices=["interval", "timestamp"], default="timestamp")
    h.add_argument("--hr-band", type=float, nargs=2, default=list(HEART_BAND), metavar=("LOW", "HIGH"))
    h.add_argument("-o", "--output")
    h.set_defaults(func=cmd_hrv)

    b = sub.add_parser("bench", help="time and score demodulators")
    b.add_argument("input", nargs="?")
    b.add_argument("--truth", help="truth CSV for RMSE")
    b.add_argument("--synth-default", action="store_true",
                   help="use the built-in 4 mm/0.25 Hz + 0.3 mm/1.2 Hz scenario at 500 Hz")
    b.add_argument("--n", type=int, default=1_000_000, help="samples for --synth-default")
    b.add_argument("--noise", type=float, default=0.0, help="IQ noise for --synth-default")
    b.add_argument("--methods", default="ad,dacm,bert")
    b.add_argument("--reps", type=int, default=7)
    b.add_argument("--warmup", type=int, default=1)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--fs", type=float)
    b.add_argument("--fc", type=float)
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except PulseDemodError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
