"""Parallel filterbanks over a peak-frequency map.

Every channel shares the same dimensionless constants and differs only in
its peak frequency, so each channel's normalized response is identical
(scaling symmetry): processing converts the common seconds-domain input
onto the channel's own scaled-time grid, applies the selected
representation there, and converts back.
"""

from __future__ import annotations

import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .core import Domain, FilterParams, GridError, MethodUnsupportedError, ParameterError, SampledSignal, validate
from .fractional_integral import default_imag_tol, gef_response_integral
from .impulse_response import filter_via_convolution
from .ode_solver import simulate_params
from .signals import AnalyticInput
from .transfer_function import filter_via_dft

# Scaled-time sampling keeps at least this many samples per unit of b_p*t,
# bounding input-interpolation error well below comparison tolerances.
_SAMPLES_PER_UNIT_TB = 40.0


class Method(Enum):
    INTEGRAL = "integral"
    ODE = "ode"
    CONVOLUTION = "convolution"
    DFT = "dft"


@dataclass(frozen=True)
class CfMap:
    """Ascending positive peak frequencies, explicit or log-spaced."""

    cf_values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.cf_values, dtype=float)
        object.__setattr__(self, "cf_values", vals)
        if vals.ndim != 1 or vals.size == 0:
            raise ParameterError("need at least one peak frequency")
        if np.any(vals <= 0) or not np.all(np.diff(vals) > 0):
            raise ParameterError("peak frequencies must be positive and strictly ascending")

    @classmethod
    def log_spaced(cls, n: int, f_lo: float, f_hi: float) -> "CfMap":
        if n < 1:
            raise ParameterError(f"need n >= 1 channels, got {n}")
        if n == 1:
            if f_lo != f_hi:
                raise ParameterError("single-channel map needs f_lo == f_hi")
            return cls(np.array([f_lo]))
        return cls(np.geomspace(f_lo, f_hi, n))

    @classmethod
    def explicit(cls, values) -> "CfMap":
        return cls(np.asarray(values, dtype=float))


@dataclass(frozen=True)
class Filterbank:
    """Ordered channels sharing shape constants, distinct peak frequencies."""

    channels: tuple[FilterParams, ...]

    @property
    def cf_values(self) -> np.ndarray:
        return np.array([ch.CF for ch in self.channels])


def build(cf_map: CfMap, shape: FilterParams,
          overrides: dict[int, FilterParams] | None = None) -> Filterbank:
    """One filter per map entry; per-channel overrides are possible but the
    default (and the configuration of interest) shares all constants."""
    validate(shape)
    channels = []
    for i, cf in enumerate(cf_map.cf_values):
        base = overrides.get(i, shape) if overrides else shape
        channels.append(replace(base, CF=float(cf)))
    return Filterbank(tuple(channels))


@dataclass(frozen=True)
class FilterbankOutput:
    """Per-channel responses on the common seconds-domain grid."""

    time: np.ndarray
    channels: np.ndarray  # (n_channels, n_samples)
    cf_values: np.ndarray

    def __post_init__(self):
        if self.channels.shape != (self.cf_values.size, self.time.size):
            raise GridError("channel matrix shape inconsistent with axes")

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("cf_hz,t_seconds,q\n")
        for i, cf in enumerate(self.cf_values):
            for t, q in zip(self.time, self.channels[i]):
                buf.write(f"{cf:.17g},{t:.17g},{q:.17g}\n")
        return buf.getvalue()


def _channel_step(params: FilterParams, input_step_seconds: float) -> float:
    native = 2.0 * np.pi * params.CF * input_step_seconds
    return min(native, 1.0 / (_SAMPLES_PER_UNIT_TB * params.b_p))


def _apply_method(params: FilterParams, u: SampledSignal, method: Method) -> SampledSignal:
    if method is Method.INTEGRAL:
        if params.exponent <= 1.0:
            raise MethodUnsupportedError(f"integral method needs B_u > 1, got {params.B_u}")
        return gef_response_integral(params, u, imag_tol=default_imag_tol(u.step))
    if method is Method.ODE:
        if params.B_u.denominator != 1:
            raise MethodUnsupportedError(f"ODE method needs integer B_u, got {params.B_u}")
        return simulate_params(params, u)
    if method is Method.CONVOLUTION:
        return filter_via_convolution(u, params)
    if method is Method.DFT:
        return filter_via_dft(u, params)
    raise MethodUnsupportedError(f"unknown method {method!r}")


def _process_channel(params: FilterParams, signal, method: Method,
                     time_seconds: np.ndarray) -> np.ndarray:
    w = 2.0 * np.pi * params.CF
    duration = time_seconds[-1]
    step = _channel_step(params, time_seconds[1] - time_seconds[0])
    n = int(np.floor(duration * w / step)) + 1
    t_tilde = step * np.arange(n)
    if isinstance(signal, AnalyticInput):
        values = signal.evaluator(t_tilde / w)
    else:
        values = np.interp(t_tilde / w, time_seconds, signal.values)
    u = SampledSignal(values, step, Domain.SCALED_TIME)
    q = _apply_method(params, u, method)
    return np.interp(time_seconds * w, t_tilde, q.values)


def process(bank: Filterbank, signal, method: Method = Method.INTEGRAL) -> FilterbankOutput:
    """Run the input through every channel with the chosen representation.

    ``signal`` is a seconds-domain :class:`SampledSignal`, or an
    :class:`AnalyticInput` (evaluated exactly on each channel's grid instead
    of interpolated).  Channels are independent; ``GEF_THREADS`` caps the
    worker threads (default serial).
    """
    if isinstance(signal, AnalyticInput):
        raise GridError("analytic inputs need an explicit grid; use process_analytic")
    if signal.domain is not Domain.SECONDS:
        raise GridError("filterbank inputs live in the seconds domain")
    time_seconds = signal.times
    return _process_common(bank, signal, method, time_seconds)


def process_analytic(bank: Filterbank, analytic: AnalyticInput, step_seconds: float,
                     n_samples: int, method: Method = Method.INTEGRAL) -> FilterbankOutput:
    """Like :func:`process` but the input is evaluated exactly on each
    channel's grid instead of interpolated from samples."""
    if analytic.domain is not Domain.SECONDS:
        raise GridError("filterbank inputs live in the seconds domain")
    time_seconds = step_seconds * np.arange(n_samples)
    return _process_common(bank, analytic, method, time_seconds)


def _process_common(bank, signal, method, time_seconds) -> FilterbankOutput:
    if time_seconds.size < 2:
        raise GridError("need at least two samples")
    n_workers = int(os.environ.get("GEF_THREADS", "1") or "1")
    rows = [None] * len(bank.channels)
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            futures = {pool.submit(_process_channel, ch, signal, method, time_seconds): i
                       for i, ch in enumerate(bank.channels)}
            for fut, i in futures.items():
                rows[i] = fut.result()
    else:
        for i, ch in enumerate(bank.channels):
            rows[i] = _process_channel(ch, signal, method, time_seconds)
    return FilterbankOutput(time_seconds, np.vstack(rows), bank.cf_values)


def spectrogramify(output: FilterbankOutput, frame: float) -> np.ndarray:
    """Per-channel RMS energy in non-overlapping frames, rows ordered by CF."""
    step = output.time[1] - output.time[0]
    if frame <= step:
        raise GridError(f"frame {frame} must exceed the sample step {step}")
    per_frame = int(round(frame / step))
    n_frames = output.channels.shape[1] // per_frame
    if n_frames < 1:
        raise GridError("frame longer than the whole signal")
    trimmed = output.channels[:, : n_frames * per_frame]
    blocks = trimmed.reshape(output.channels.shape[0], n_frames, per_frame)
    return np.sqrt(np.mean(blocks**2, axis=2))


def spectrogram_to_csv(output: FilterbankOutput, spec: np.ndarray, frame: float) -> str:
    buf = io.StringIO()
    n_frames = spec.shape[1]
    header = ",".join(f"{(k + 0.5) * frame:.17g}" for k in range(n_frames))
    buf.write("cf_hz," + header + "\n")
    for cf, row in zip(output.cf_values, spec):
        buf.write(f"{cf:.17g}," + ",".join(f"{v:.17g}" for v in row) + "\n")
    return buf.getvalue()
