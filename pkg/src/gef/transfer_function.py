"""Frequency-domain representation: the base quadratic raised to -B_u.

The transfer function is evaluated on the imaginary axis ``s = i*beta`` with
``beta = f / CF`` the normalized frequency.  For ``beta >= 0`` the base
quadratic has nonnegative imaginary part, so its principal argument stays in
``[0, pi]`` and the principal-branch complex power is continuous along any
ascending grid; negative frequencies are covered by conjugate symmetry and
never evaluated directly.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .core import Domain, FilterParams, GridError, ParameterError, SampledSignal, validate


def base_at(params: FilterParams, beta):
    """Base quadratic at ``s = i*beta``: ``(A_p^2+b_p^2-beta^2) + 2i*A_p*beta``."""
    beta = np.asarray(beta, dtype=float)
    out = (params.pole_magnitude_sq - beta**2) + 1j * (2.0 * params.A_p * beta)
    return out if out.ndim else complex(out)


def eval_tf(params: FilterParams, beta):
    """Normalized transfer function ``base(i*beta) ** (-B_u)`` (principal branch)."""
    validate(params)
    base = np.asarray(base_at(params, beta))
    out = base ** (-params.exponent)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class FrequencyResponse:
    """Complex response sampled on an ascending grid of normalized frequencies."""

    betas: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        betas = np.asarray(self.betas, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "values", values)
        if betas.ndim != 1 or betas.shape != values.shape:
            raise GridError("betas and values must be 1-d arrays of equal length")
        if betas.size >= 2 and not np.all(np.diff(betas) > 0):
            raise GridError("betas must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise GridError("response values must be finite")

    @property
    def magnitude_db(self) -> np.ndarray:
        return 20.0 * np.log10(np.abs(self.values))

    @property
    def phase_cycles(self) -> np.ndarray:
        """Unwrapped phase in cycles."""
        return np.unwrap(np.angle(self.values)) / (2.0 * np.pi)


def frequency_response(params: FilterParams, betas) -> FrequencyResponse:
    return FrequencyResponse(np.asarray(betas, dtype=float), eval_tf(params, betas))


@dataclass(frozen=True)
class BodeData:
    """Magnitude re peak (dB) and unwrapped phase re a reference point (cycles)."""

    betas: np.ndarray
    mag_db_rel_peak: np.ndarray
    phase_cycles_rel_first: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("beta,mag_db,phase_cycles\n")
        for b, m, p in zip(self.betas, self.mag_db_rel_peak, self.phase_cycles_rel_first):
            buf.write(f"{b:.17g},{m:.17g},{p:.17g}\n")
        return buf.getvalue()


def bode(params: FilterParams, betas, phase_reference_index: int = 0) -> BodeData:
    """Bode data with 0 dB at the grid peak and 0 cycles at the reference index.

    The phase reference is exposed because published plots reference it to an
    unspecified first plotted point; it defaults to the first grid point.
    """
    betas = np.asarray(betas, dtype=float)
    if betas.size < 3:
        raise GridError("need at least 3 grid points to unwrap the phase")
    resp = frequency_response(params, betas)
    mag = resp.magnitude_db
    phase = resp.phase_cycles
    return BodeData(betas, mag - np.max(mag), phase - phase[phase_reference_index])


def default_beta_grid(beta_lo: float = 0.05, beta_hi: float = 4.0, n: int = 4096,
                      params: FilterParams | None = None) -> np.ndarray:
    """Log-spaced grid with local uniform refinement around the magnitude peak.

    Resolves narrow peaks (large exponents) without inflating the grid size.
    """
    if beta_lo <= 0 or beta_hi <= beta_lo or n < 8:
        raise GridError("need 0 < beta_lo < beta_hi and n >= 8")
    grid = np.geomspace(beta_lo, beta_hi, n)
    if params is not None and params.is_bandpass:
        peak = np.sqrt(params.b_p**2 - params.A_p**2)
        half_width = 3.0 * params.A_p * params.b_p / max(params.exponent, 1.0)
        lo = max(beta_lo, peak - half_width)
        hi = min(beta_hi, peak + half_width)
        if hi > lo:
            grid = np.union1d(grid, np.linspace(lo, hi, n // 4))
    return grid


@dataclass(frozen=True)
class CascadeReport:
    """Worst deviation of TF**n from base**(-m) for the exponent m/n."""

    numerator: int
    denominator: int
    max_deviation: float
    tolerance: float
    passed: bool
    overflowed: bool


def cascade_check(params: FilterParams, betas=None, tolerance: float = 1e-10) -> CascadeReport:
    """Verify the cascade identity: n copies of the filter equal m base stages.

    Both sides are integer powers of the same branch, so the identity holds
    exactly; a real failure (branch-cut or validation bug) shows up at the
    magnitude of the response itself.  Near sharp peaks the two sides reach
    ~1e5, where double-precision rounding alone exceeds tight absolute
    tolerances, so the comparison is carried in extended precision; overflow
    for extreme numerators is reported, not raised.
    """
    validate(params)
    m, n = params.B_u.numerator, params.B_u.denominator
    if betas is None:
        betas = np.geomspace(0.05, 4.0, 2048)
    betas = np.asarray(betas, dtype=np.longdouble)
    a_p = np.longdouble(params.A_p)
    b_p = np.longdouble(params.b_p)
    base = (a_p**2 + b_p**2 - betas**2) + 1j * (2.0 * a_p * betas)
    base = base.astype(np.clongdouble)
    with np.errstate(over="ignore", invalid="ignore"):
        lhs = (base ** -(np.longdouble(m) / np.longdouble(n))) ** n
        rhs = base ** (-np.longdouble(m))
        dev = np.abs(lhs - rhs).astype(float)
    overflowed = bool(np.any(~np.isfinite(dev)))
    max_dev = float(np.max(dev[np.isfinite(dev)])) if np.any(np.isfinite(dev)) else np.inf
    return CascadeReport(m, n, max_dev, tolerance, bool(max_dev <= tolerance and not overflowed),
                         overflowed)


def filter_via_dft(signal: SampledSignal, params: FilterParams) -> SampledSignal:
    """Filter by multiplying the discrete spectrum by the transfer function.

    Zero-pads to the next power of two at least twice the signal length to
    reduce circular-convolution contamination.  A residual early-time
    deviation from the exact response is inherent to this path and noted on
    the output.
    """
    validate(params)
    if signal.domain is Domain.SECONDS:
        if params.CF is None:
            raise ParameterError("seconds-domain input needs CF to form scaled time")
        signal = signal.to_scaled_time(params.CF)
    if len(signal) < 2:
        raise GridError("need at least 2 samples")
    n = len(signal)
    padded = 1 << int(np.ceil(np.log2(2 * n)))
    betas = 2.0 * np.pi * np.fft.rfftfreq(padded, d=signal.step)
    h = eval_tf(params, betas)
    out = np.fft.irfft(np.fft.rfft(signal.values, padded) * h, padded)[:n]
    return signal.with_values(out, note="dft path: expect early-time deviation from exact response")
