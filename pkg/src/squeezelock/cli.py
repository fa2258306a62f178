"""Command line front end.

    squeezelock [--config PATH] [--out DIR] [--seed N] COMMAND [options]

Commands: resonance, phase, fig4, longrun, calibrate.
Exit codes: 0 success, 1 usage, 2 config validation, 3 runtime/model error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import control
from .cavity import transmission_phase, unwrap_phase
from .config import ConfigError, RunConfig, load_config
from .control import ReadoutMode
from .longrun import run
from .opo import CalibrationError, ThresholdError, _variances, calibrate, to_decibel
from .tables import CurveTable, spectrogram_csv, spectrogram_record, write_json

log = logging.getLogger("squeezelock")

EXIT_USAGE, EXIT_CONFIG, EXIT_RUNTIME = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _span(center, frac, points, p_min=None, p_max=None):
    if points < 1:
        raise UsageError("--points must be at least 1")
    lo = center * (1 - frac) if p_min is None else p_min
    hi = center * (1 + frac) if p_max is None else p_max
    if not hi >= lo or frac < 0:
        raise UsageError("empty span")
    return np.linspace(lo, hi, points)


def cmd_resonance(cfg, args):
    p = _span(cfg.thermal.set_point_power, args.span, args.points, args.p_min, args.p_max)
    curve = control.resonance_curve(p, cfg.thermal, cfg.cavity)
    return CurveTable(["pump_power_W", "transmission"], curve,
                      "resonance: alignment-beam transmission vs pump power")


def cmd_phase(cfg, args):
    if args.points < 1 or not args.f_max > 0:
        raise UsageError("empty span")
    f = np.linspace(-args.f_max, args.f_max, args.points)
    plus, minus = control.sideband_phase_pair(f, cfg.control, cfg.cavity)
    d0 = np.subtract(*control.sideband_phase_pair(0.0, cfg.control, cfg.cavity))
    return CurveTable.from_columns({
        "detuning_Hz": f,
        "phi_rad": unwrap_phase(transmission_phase(f, cfg.cavity)),
        "delta_change_rad": (plus - minus) - d0,
        "theta_a_rad": control.ellipse_rotation(f, cfg.control, cfg.cavity),
        "theta_lo_rad": control.readout_corotation(f, cfg.control, cfg.cavity),
    }, f"phase: sideband geometry, f_ccf={cfg.control.f_ccf:g} Hz")


def cmd_fig4(cfg, args):
    traces = [t for t in args.traces.replace(",", "") if t.strip()]
    valid = {m.value for m in ReadoutMode}
    bad = [t for t in traces if t not in valid]
    if bad or not traces:
        raise UsageError(f"unknown trace(s) {bad or args.traces!r}; choose from a, b, c, d")
    p = _span(cfg.thermal.set_point_power, args.span, args.points)
    cols = {"pump_power_W": p,
            "detuning_Hz": control.detuning_from_pump(p - cfg.thermal.set_point_power,
                                                      cfg.thermal)}
    for t in dict.fromkeys(traces):
        cols[f"sqz_{t}_dB"] = control.squeezing_curve(p, t, cfg.opo_params, cfg.cavity,
                                                      cfg.thermal, cfg.control)
    return CurveTable.from_columns(cols, "fig4: detected squeezing at fixed homodyne angle")


def cmd_calibrate(cfg, args):
    cal = calibrate(args.sqz_db, args.antisqz_db)
    x, eta = cal.opo.pump_ratio, cal.opo.detection_efficiency
    p_set = cfg.thermal.set_point_power
    r_a, r_s = _variances(x, eta, 0.0)
    if cal.eta_constrained:
        resid = max(abs(to_decibel(r_s) - args.sqz_db), abs(to_decibel(r_a) - args.antisqz_db))
    else:
        resid = 0.0
    lines = [
        f"detection_efficiency = {eta:.12g}" + ("" if cal.eta_constrained else " (unconstrained)"),
        f"pump_ratio = {x:.12g}",
        f"threshold_power_W = {(p_set / x) if x > 0 else float('inf'):.12g}"
        f"  (set point {p_set:g} W)",
        f"forward_residual_dB = {resid:.3e}",
    ]
    return "\n".join(lines) + "\n"


def cmd_longrun(cfg, args, out_dir):
    if args.duration is not None:
        cfg = cfg.replace(duration=args.duration)
    result = run(cfg)
    out_dir.mkdir(parents=True, exist_ok=True)
    spectrogram_csv(result.spectrogram, out_dir / "spectrogram.csv")
    write_json(spectrogram_record(result.spectrogram), out_dir / "spectrogram.json")
    write_json(result.stats.as_dict(), out_dir / "stats.json")
    events = CurveTable(["time_s", "code"],
                        np.array([[t, _EVENT_CODES[e]] for t, e in result.events]).reshape(-1, 2),
                        "events: 0=lockloss 1=relock 2=saturation")
    events.to_csv(out_dir / "events.csv")
    return result.stats


_EVENT_CODES = {"lockloss": 0, "relock": 1, "saturation": 2}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="YAML run configuration")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="noise seed")

    parser = _Parser(prog="squeezelock", parents=[common], description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("resonance", parents=[common], help="transmission vs pump power")
    p.add_argument("--span", type=float, default=0.2, help="fractional half-span")
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--p-min", type=float)
    p.add_argument("--p-max", type=float)

    p = sub.add_parser("phase", parents=[common], help="sideband phases vs detuning")
    p.add_argument("--f-max", type=float, default=50e6, help="Hz")
    p.add_argument("--points", type=int, default=401)

    p = sub.add_parser("fig4", parents=[common], help="detected squeezing vs pump power")
    p.add_argument("--traces", default="abcd")
    p.add_argument("--span", type=float, default=0.1, help="fractional half-span")
    p.add_argument("--points", type=int, default=201)

    p = sub.add_parser("longrun", parents=[common], help="long-run stabilized operation")
    p.add_argument("--duration", type=float, help="override run length, s")

    p = sub.add_parser("calibrate", parents=[common], help="fit (eta, x) to a dB pair")
    p.add_argument("sqz_db", type=float)
    p.add_argument("antisqz_db", type=float)
    return parser


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    config_path = getattr(args, "config", None)
    out = getattr(args, "out", None)
    seed = getattr(args, "seed", None)

    try:
        cfg = load_config(config_path) if config_path else RunConfig()
        if seed is not None:
            cfg = cfg.with_seed(seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "longrun":
            out_dir = Path(out or cfg.out_dir or "longrun")
            stats = cmd_longrun(cfg, args, out_dir)
            print(write_json(stats.as_dict()), end="")
            return 0
        handler = {"resonance": cmd_resonance, "phase": cmd_phase,
                   "fig4": cmd_fig4, "calibrate": cmd_calibrate}[args.command]
        result = handler(cfg, args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CalibrationError, ThresholdError, control.LockPointLost, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    text = result if isinstance(result, str) else result.to_csv()
    if out:
        Path(out).mkdir(parents=True, exist_ok=True)
        suffix = "txt" if isinstance(result, str) else "csv"
        (Path(out) / f"{args.command}.{suffix}").write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
