"""Command-line surface: CSV in, CSV out, deterministic formatting.

Subcommands mirror the library: ``bode``, ``chars``, ``impulse``,
``filter``, ``bank``, ``equiv`` and ``cascade-check``.  All floats are
written with 17 significant digits and newline line endings, so identical
invocations produce byte-identical files.  Exit codes: 0 success, 1
validation/usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import wave
from fractions import Fraction

import numpy as np

from . import characteristics as chars_mod
from . import equivalence, filterbank
from .core import (
    Domain,
    FilterParams,
    GefError,
    NumericalError,
    ParameterError,
    SampledSignal,
    as_exponent,
)
from .impulse_response import h_exact, h_gtf, impulse_response_seconds
from .transfer_function import bode, cascade_check, eval_tf


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as validation errors (exit 1)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ParameterError(message)


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write_text(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _parse_exponent(text: str) -> Fraction:
    frac = as_exponent(text)
    try:
        as_float = float(text)
    except ValueError:
        return frac
    if abs(float(frac) - as_float) > 1e-15 * max(abs(as_float), 1.0):
        print(f"note: exponent {text} snapped to {frac.numerator}/{frac.denominator}",
              file=sys.stderr)
    return frac


def _params_from_args(args) -> FilterParams:
    return FilterParams(A_p=args.ap, b_p=args.bp, B_u=_parse_exponent(args.bu),
                        CF=getattr(args, "cf", None))


def _add_param_flags(p: argparse.ArgumentParser, with_cf: bool = True):
    p.add_argument("--Ap", dest="ap", type=float, required=True, help="damping constant")
    p.add_argument("--bp", dest="bp", type=float, default=1.0,
                   help="normalized tonal frequency (default 1)")
    p.add_argument("--Bu", dest="bu", default="2",
                   help="exponent, as m/n or decimal (snapped to denominator <= 64)")
    if with_cf:
        p.add_argument("--cf", dest="cf", type=float, default=None,
                       help="peak frequency in Hz (needed for seconds-domain work)")


def _read_signal(path: str, step: float | None) -> SampledSignal:
    if path.lower().endswith(".wav"):
        with wave.open(path, "rb") as wf:
            if wf.getnchannels() != 1 or wf.getsampwidth() != 2:
                raise ParameterError("WAV input must be 16-bit PCM mono")
            frames = wf.readframes(wf.getnframes())
            values = np.frombuffer(frames, dtype="<i2").astype(float) / 32768.0
            return SampledSignal(values, 1.0 / wf.getframerate(), Domain.SECONDS)
    data = np.genfromtxt(path, delimiter=",", names=True)
    names = data.dtype.names
    if names and "t" in names and "value" in names:
        t = np.atleast_1d(data["t"])
        v = np.atleast_1d(data["value"])
        if t.size < 2:
            raise ParameterError("need at least two samples")
        steps = np.diff(t)
        if np.max(np.abs(steps - steps[0])) > 1e-9 * steps[0]:
            raise ParameterError("input grid must be uniform")
        return SampledSignal(v, float(steps[0]), Domain.SECONDS, start=float(t[0]))
    if step is None:
        raise ParameterError("single-column CSV input needs --step (seconds)")
    values = np.atleast_1d(np.genfromtxt(path, delimiter=","))
    return SampledSignal(values, step, Domain.SECONDS)


def _maybe_plot_script(args, csv_path: str, columns: list[str]):
    if not getattr(args, "plot_script", False) or csv_path == "-":
        return
    lines = ["set datafile separator ','", "set key autotitle columnhead"]
    plots = ", ".join(f"'{csv_path}' using 1:{i + 2} with lines" for i in range(len(columns) - 1))
    lines.append(f"plot {plots}")
    _write_text(csv_path + ".gnuplot", "\n".join(lines) + "\n")


def _cmd_bode(args) -> int:
    params = _params_from_args(args)
    if args.n < 3 or args.beta_max <= args.beta_min or args.beta_min <= 0:
        raise ParameterError("need beta_min > 0, beta_max > beta_min and n >= 3")
    betas = np.geomspace(args.beta_min, args.beta_max, args.n)
    data = bode(params, betas)
    _write_text(args.out, data.to_csv())
    _maybe_plot_script(args, args.out, ["beta", "mag_db", "phase_cycles"])
    return 0


def _cmd_chars(args) -> int:
    grid = np.arange(args.bu_start, args.bu_stop + args.bu_step / 2, args.bu_step)
    rows = chars_mod.characteristics_sweep(args.ap, args.bp, grid)
    _write_text(args.out, chars_mod.sweep_to_csv(rows))
    return 0


def _cmd_impulse(args) -> int:
    params = _params_from_args(args)
    n = int(round(args.t_max / args.step)) + 1
    if args.tf_of_h:
        # DFT-based transfer functions of the sampled responses
        t = args.step * np.arange(n)
        cols = {"h": h_exact(params, t)}
        if args.gtf:
            cols["h_gtf"] = h_gtf(params, t)
        padded = 1 << int(np.ceil(np.log2(2 * n)))
        betas = 2.0 * np.pi * np.fft.rfftfreq(padded, d=args.step)
        lines = ["beta," + ",".join(f"mag_db_{k}" for k in cols) + ",mag_db_tf"]
        mags = {k: 20.0 * np.log10(np.abs(np.fft.rfft(v, padded)) * args.step + 1e-300)
                for k, v in cols.items()}
        mag_tf = 20.0 * np.log10(np.abs(eval_tf(params, betas)))
        keep = (betas > 0) & (betas <= args.beta_max)
        for i in np.nonzero(keep)[0]:
            row = [_fmt(betas[i])] + [_fmt(mags[k][i]) for k in cols] + [_fmt(mag_tf[i])]
            lines.append(",".join(row))
        _write_text(args.out, "\n".join(lines) + "\n")
        return 0
    t = args.step * np.arange(n)
    if args.cf is not None:
        header = "t_seconds,g"
        t_sec = t / (2.0 * np.pi * args.cf)
        cols = [t_sec, impulse_response_seconds(params, t_sec)]
    else:
        header = "t_tilde,h"
        cols = [t, h_exact(params, t)]
    if args.gtf:
        header += ",h_gtf"
        cols.append(h_gtf(params, t))
    lines = [header]
    for i in range(n):
        lines.append(",".join(_fmt(c[i]) for c in cols))
    _write_text(args.out, "\n".join(lines) + "\n")
    _maybe_plot_script(args, args.out, header.split(","))
    return 0


def _cmd_filter(args) -> int:
    params = _params_from_args(args)
    signal = _read_signal(args.input, args.step)
    method = filterbank.Method(args.method)
    if params.CF is None:
        raise ParameterError("filter needs --cf to map seconds onto scaled time")
    bank = filterbank.Filterbank((params,))
    out = filterbank.process(bank, signal, method)
    lines = ["t_seconds,q"]
    for t, q in zip(out.time, out.channels[0]):
        lines.append(f"{_fmt(t)},{_fmt(q)}")
    _write_text(args.out, "\n".join(lines) + "\n")
    _maybe_plot_script(args, args.out, ["t_seconds", "q"])
    return 0


def _parse_cf_map(spec: str) -> filterbank.CfMap:
    kind, _, rest = spec.partition(":")
    if kind == "log":
        n, f_lo, f_hi = rest.split(",")
        return filterbank.CfMap.log_spaced(int(n), float(f_lo), float(f_hi))
    if kind == "list":
        return filterbank.CfMap.explicit([float(v) for v in rest.split(",")])
    raise ParameterError(f"cf-map must be log:n,f_lo,f_hi or list:f1,f2,... got {spec!r}")


def _cmd_bank(args) -> int:
    shape = FilterParams(A_p=args.ap, b_p=args.bp, B_u=_parse_exponent(args.bu))
    bank = filterbank.build(_parse_cf_map(args.cf_map), shape)
    signal = _read_signal(args.input, args.step)
    out = filterbank.process(bank, signal, filterbank.Method(args.method))
    _write_text(args.out, out.to_csv())
    spec = filterbank.spectrogramify(out, args.frame)
    _write_text(args.spectrogram_out, filterbank.spectrogram_to_csv(out, spec, args.frame))
    return 0


def _cmd_equiv(args) -> int:
    params = FilterParams(A_p=args.ap, b_p=args.bp, B_u=_parse_exponent(args.bu))
    if args.case == "integer":
        report = equivalence.run_integer_case(params, args.grid_step, args.t_max)
    else:
        report = equivalence.run_half_integer_case(params, args.grid_step, args.t_max)
    _write_text(args.out, report.to_csv())
    return 0


def _cmd_cascade_check(args) -> int:
    params = FilterParams(A_p=args.ap, b_p=args.bp, B_u=_parse_exponent(args.bu))
    report = cascade_check(params, tolerance=args.tolerance)
    status = "pass" if report.passed else "FAIL"
    print(f"B_u = {report.numerator}/{report.denominator}: max deviation "
          f"{_fmt(report.max_deviation)} (tolerance {_fmt(report.tolerance)}) -> {status}")
    if report.overflowed:
        print("warning: overflow encountered on part of the grid", file=sys.stderr)
    return 0 if report.passed else 2


def _load_config(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            if not _:
                raise ParameterError(f"config line is not key=value: {raw!r}")
            values[key.strip()] = val.strip()
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gef", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--config", default=None,
                        help="key=value file supplying defaults for the flags")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bode", help="frequency response table (mag dB re peak, phase cycles)")
    _add_param_flags(p, with_cf=False)
    p.add_argument("--beta-min", type=float, default=0.05)
    p.add_argument("--beta-max", type=float, default=4.0)
    p.add_argument("-n", type=int, default=1024, dest="n")
    p.add_argument("--out", default="-")
    p.add_argument("--plot-script", action="store_true")
    p.set_defaults(func=_cmd_bode)

    p = sub.add_parser("chars", help="characteristics sweep over the exponent")
    p.add_argument("--Ap", dest="ap", type=float, required=True)
    p.add_argument("--bp", dest="bp", type=float, default=1.0)
    p.add_argument("--Bu-start", dest="bu_start", type=float, default=1.25)
    p.add_argument("--Bu-stop", dest="bu_stop", type=float, default=10.0)
    p.add_argument("--Bu-step", dest="bu_step", type=float, default=0.25)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_chars)

    p = sub.add_parser("impulse", help="impulse response table (scaled time or seconds)")
    _add_param_flags(p)
    p.add_argument("--t-max", dest="t_max", type=float, default=100.0,
                   help="grid end in scaled time")
    p.add_argument("--step", type=float, default=0.01, help="grid step in scaled time")
    p.add_argument("--gtf", action="store_true", help="add the gammatone approximant column")
    p.add_argument("--tf-of-h", dest="tf_of_h", action="store_true",
                   help="emit DFT-based transfer functions of the sampled responses instead")
    p.add_argument("--beta-max", dest="beta_max", type=float, default=4.0)
    p.add_argument("--out", default="-")
    p.add_argument("--plot-script", action="store_true")
    p.set_defaults(func=_cmd_impulse)

    p = sub.add_parser("filter", help="filter one seconds-domain signal (CSV or WAV)")
    _add_param_flags(p)
    p.add_argument("--input", required=True)
    p.add_argument("--step", type=float, default=None,
                   help="sample step for single-column CSV input")
    p.add_argument("--method", choices=[m.value for m in filterbank.Method],
                   default="integral")
    p.add_argument("--out", default="-")
    p.add_argument("--plot-script", action="store_true")
    p.set_defaults(func=_cmd_filter)

    p = sub.add_parser("bank", help="run a filterbank over a signal")
    p.add_argument("--Ap", dest="ap", type=float, required=True)
    p.add_argument("--bp", dest="bp", type=float, default=1.0)
    p.add_argument("--Bu", dest="bu", default="2")
    p.add_argument("--cf-map", dest="cf_map", required=True,
                   help="log:n,f_lo,f_hi or list:f1,f2,...")
    p.add_argument("--input", required=True)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--method", choices=[m.value for m in filterbank.Method],
                   default="integral")
    p.add_argument("--frame", type=float, default=5e-3,
                   help="spectrogram frame length in seconds")
    p.add_argument("--out", default="-")
    p.add_argument("--spectrogram-out", dest="spectrogram_out", default="spectrogram.csv")
    p.set_defaults(func=_cmd_bank)

    p = sub.add_parser("equiv", help="cross-representation error table vs the oracle")
    p.add_argument("case", choices=["integer", "half-integer"])
    p.add_argument("--Ap", dest="ap", type=float, default=0.1)
    p.add_argument("--bp", dest="bp", type=float, default=1.0)
    p.add_argument("--Bu", dest="bu", default=None)
    p.add_argument("--grid-step", dest="grid_step", type=float, default=0.01)
    p.add_argument("--t-max", dest="t_max", type=float, default=60.0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_equiv)

    p = sub.add_parser("cascade-check", help="verify the rational-exponent cascade identity")
    p.add_argument("--Ap", dest="ap", type=float, default=0.1)
    p.add_argument("--bp", dest="bp", type=float, default=1.0)
    p.add_argument("--Bu", dest="bu", required=True)
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.set_defaults(func=_cmd_cascade_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    # --config is applied as defaults before the real parse
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        pre, _ = parser.parse_known_args(argv)
        if pre.config:
            config = _load_config(pre.config)
            for action in parser._subparsers._group_actions[0].choices.values():  # noqa: SLF001
                known = {a.dest for a in action._actions}  # noqa: SLF001
                action.set_defaults(**{k: v for k, v in config.items() if k in known})
        args = parser.parse_args(argv)
        if args.command == "equiv" and args.bu is None:
            args.bu = "3" if args.case == "integer" else "5/2"
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (GefError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
