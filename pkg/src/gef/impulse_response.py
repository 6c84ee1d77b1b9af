"""Closed-form impulse responses and convolution-based filtering.

In scaled time the impulse response of the filter is, for any exponent
``B_u > 1/2``,

    h(t) = sqrt(pi)/Gamma(B_u) * exp(-A_p t) * (t/(2 b_p))**(B_u - 1/2)
           * J_{B_u - 1/2}(b_p t)

with ``J`` the Bessel function of the first kind.  For integer exponents the
half-odd-order Bessel function collapses to explicit sin/cos polynomial
forms (implemented separately as an independent cross-check), and the
highest-order polynomial term gives the classical gammatone approximation
extrapolated to non-integer exponents.

The response in seconds for a filter with peak frequency CF is
``g(t) = 2*pi*CF * h(2*pi*CF*t)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np
from scipy.special import gamma, jv

from .core import (
    Domain,
    FilterParams,
    KernelTruncationError,
    ParameterError,
    SampledSignal,
    UnsupportedExponentError,
    validate,
)

# Kernel samples are dropped once their envelope bound falls below this
# fraction of the envelope maximum; keeps output error around 1e-4 or less.
KERNEL_TRUNCATION_RATIO = 1e-6

_MAX_KERNEL_SAMPLES = 10**6


class Kind(Enum):
    EXACT_BESSEL = "exact_bessel"
    INTEGER_POLYNOMIAL = "integer_polynomial"
    HALF_INTEGER_BESSEL = "half_integer_bessel"
    GTF_APPROX = "gtf_approx"


def normalization(params: FilterParams) -> float:
    """Scale constant ``sqrt(pi) / Gamma(B_u)`` of the closed form."""
    return float(np.sqrt(np.pi) / gamma(params.exponent))


def h_exact(params: FilterParams, t_tilde):
    """Impulse response in scaled time for any exponent ``B_u > 1/2``."""
    validate(params)
    bu = params.exponent
    if bu <= 0.5:
        raise UnsupportedExponentError(f"closed form needs B_u > 1/2, got {bu}")
    t = np.asarray(t_tilde, dtype=float)
    if np.any(t < 0):
        raise ParameterError("impulse response is causal; t_tilde must be >= 0")
    nu = bu - 0.5
    out = normalization(params) * np.exp(-params.A_p * t) \
        * (t / (2.0 * params.b_p)) ** nu * jv(nu, params.b_p * t)
    return out if out.ndim else float(out)


# (scale denominator, [coefficients of sin, -t*cos, -t^2*sin, t^3*cos, t^4*sin, ...])
# for integer exponents; the alternating sin/cos pattern follows the
# half-odd-order Bessel reductions.
_INTEGER_TERMS = {
    1: (1, [1]),
    2: (2, [1, 1]),
    3: (8, [3, 3, 1]),
    4: (48, [15, 15, 6, 1]),
    5: (384, [105, 105, 45, 10, 1]),
}


def h_integer_polynomial(params: FilterParams, t_tilde):
    """Explicit sin/cos polynomial forms for integer exponents.

    Exponents 1..5 use the tabulated closed forms with their exact scale
    constants (e.g. ``1/(2 b_p^3)`` at B_u=2, ``1/(384 b_p^9)`` at B_u=5);
    larger integers fold into the Bessel form, which they equal identically.
    """
    validate(params)
    if params.B_u.denominator != 1:
        raise UnsupportedExponentError(f"integer form needs integer B_u, got {params.B_u}")
    bu = params.B_u.numerator
    if bu > 5:
        return h_exact(params, t_tilde)
    t = np.asarray(t_tilde, dtype=float)
    tb = params.b_p * t
    denom, coeffs = _INTEGER_TERMS[bu]
    s, c = np.sin(tb), np.cos(tb)
    # terms alternate sin, -t*cos, -t^2*sin, +t^3*cos, +t^4*sin with period-4 signs
    signs = [1.0, -1.0, -1.0, 1.0]
    acc = np.zeros_like(t)
    for k, coef in enumerate(coeffs):
        osc = s if k % 2 == 0 else c
        acc += signs[k % 4] * coef * tb**k * osc
    out = np.exp(-params.A_p * t) * acc / (denom * params.b_p ** (2 * bu - 1))
    return out if out.ndim else float(out)


def h_half_integer(params: FilterParams, t_tilde):
    """Tabulated half-integer forms with integer-order Bessel factors.

    Covers B_u in {3/2, 5/2, 7/2, 9/2}; e.g. ``exp(-A_p t) t J_1(b_p t)/b_p``
    at B_u=3/2.  Kept distinct from :func:`h_exact` as a cross-check.
    """
    validate(params)
    bu2 = 2 * params.B_u
    if bu2.denominator != 1 or bu2.numerator % 2 == 0 or params.B_u < Fraction(3, 2):
        raise UnsupportedExponentError(
            f"half-integer form needs B_u in {{3/2, 5/2, 7/2, 9/2,...}}, got {params.B_u}")
    n = (bu2.numerator - 1) // 2  # Bessel order
    # scale 1/((2n-1)!! * b_p^n)
    dfact = float(np.prod(np.arange(1, 2 * n, 2))) if n > 0 else 1.0
    t = np.asarray(t_tilde, dtype=float)
    out = np.exp(-params.A_p * t) * t**n * jv(n, params.b_p * t) / (dfact * params.b_p**n)
    return out if out.ndim else float(out)


def envelope_bound(params: FilterParams, t_tilde):
    """Upper bound ``K exp(-A_p t) (t/(2 b_p))**(B_u-1/2)`` using |J| <= 1."""
    t = np.asarray(t_tilde, dtype=float)
    nu = params.exponent - 0.5
    return normalization(params) * np.exp(-params.A_p * t) * (t / (2.0 * params.b_p)) ** nu


def _envelope_max(params: FilterParams) -> tuple[float, float]:
    """Numeric max of |h_exact| and its location, from a fine grid scan."""
    bu = params.exponent
    t_hi = (bu + 8.0) / params.A_p
    step = 2.0 * np.pi / (params.b_p * 50.0)
    t = np.arange(step, t_hi, step)
    vals = np.abs(h_exact(params, t))
    i = int(np.argmax(vals))
    # parabolic refinement around the sampled max
    if 0 < i < len(t) - 1:
        y0, y1, y2 = vals[i - 1], vals[i], vals[i + 1]
        denom = y0 - 2 * y1 + y2
        if denom < 0:
            dt = 0.5 * (y0 - y2) / denom * step
            t_ref = t[i] + dt
            return float(np.abs(h_exact(params, t_ref))), float(t_ref)
    return float(vals[i]), float(t[i])


@dataclass(frozen=True)
class EnvelopePeak:
    """Envelope-peak time: the closed-form rule and the located maximum.

    Two rules circulate because the approximant has been written with both
    ``t**(B_u-1)`` and ``t**(B_u-1/2)`` envelopes; both predictions are
    reported alongside the numerically located argmax of ``|h|``.
    """

    rule: float           # (B_u - 1) / A_p
    rule_half: float      # (B_u - 1/2) / A_p
    numeric: float        # located argmax of |h_exact|


def envelope_peak_time(params: FilterParams) -> EnvelopePeak:
    validate(params)
    bu = params.exponent
    if bu <= 1.0:
        raise UnsupportedExponentError(f"envelope peak rule needs B_u > 1, got {bu}")
    _, t_num = _envelope_max(params)
    return EnvelopePeak(rule=(bu - 1.0) / params.A_p,
                        rule_half=(bu - 0.5) / params.A_p,
                        numeric=t_num)


def h_gtf(params: FilterParams, t_tilde, envelope_exponent: str = "half",
          scale: float | None = None):
    """Extrapolated gammatone approximant of the impulse response.

    ``exp(-A_p t) * t**e * cos(b_p t - B_u pi/2)`` where the envelope power
    ``e`` is ``B_u - 1/2`` (``envelope_exponent="half"``, the general form)
    or ``B_u - 1`` (``"integer"``, matching the highest-order polynomial
    term).  Unless an explicit ``scale`` is given the approximant is scaled
    so its envelope maximum matches that of the exact response, which makes
    overlays and error metrics meaningful.
    """
    validate(params)
    bu = params.exponent
    if envelope_exponent == "half":
        e = bu - 0.5
    elif envelope_exponent == "integer":
        e = bu - 1.0
    else:
        raise ParameterError(f"envelope_exponent must be 'half' or 'integer', got {envelope_exponent!r}")
    t = np.asarray(t_tilde, dtype=float)
    raw = np.exp(-params.A_p * t) * t**e * np.cos(params.b_p * t - bu * np.pi / 2.0)
    if scale is None:
        scale = gtf_scale(params, envelope_exponent)
    out = scale * raw
    return out if out.ndim else float(out)


def gtf_scale(params: FilterParams, envelope_exponent: str = "half") -> float:
    """Scale matching the approximant's envelope maximum to the exact one."""
    e = params.exponent - (0.5 if envelope_exponent == "half" else 1.0)
    if e <= 0:
        raise UnsupportedExponentError("gammatone envelope needs a positive power of t")
    env_exact, _ = _envelope_max(params)
    # max of t**e * exp(-A t) is (e/A)**e * exp(-e)
    env_gtf = (e / params.A_p) ** e * np.exp(-e)
    return float(env_exact / env_gtf)


@dataclass(frozen=True)
class ImpulseResponseForm:
    """A selected impulse-response formula bound to one parameter set."""

    kind: Kind
    params: FilterParams
    normalization: float

    def __post_init__(self):
        bu = self.params.B_u
        if self.kind is Kind.EXACT_BESSEL and bu <= Fraction(1, 2):
            raise UnsupportedExponentError("exact Bessel form needs B_u > 1/2")
        if self.kind is Kind.INTEGER_POLYNOMIAL and (bu.denominator != 1 or bu < 1):
            raise UnsupportedExponentError("integer form needs integer B_u >= 1")
        if self.kind is Kind.HALF_INTEGER_BESSEL and (
                (2 * bu).denominator != 1 or (2 * bu).numerator % 2 == 0 or bu < Fraction(3, 2)):
            raise UnsupportedExponentError("half-integer form needs odd 2*B_u >= 3")

    def evaluate(self, t_tilde):
        if self.kind is Kind.EXACT_BESSEL:
            return h_exact(self.params, t_tilde)
        if self.kind is Kind.INTEGER_POLYNOMIAL:
            return h_integer_polynomial(self.params, t_tilde)
        if self.kind is Kind.HALF_INTEGER_BESSEL:
            return h_half_integer(self.params, t_tilde)
        return h_gtf(self.params, t_tilde)


def impulse_response_form(params: FilterParams, kind: Kind) -> ImpulseResponseForm:
    return ImpulseResponseForm(kind, params, normalization(params))


def impulse_response_seconds(params: FilterParams, t):
    """Impulse response in seconds: ``g(t) = 2*pi*CF * h(2*pi*CF*t)``."""
    validate(params)
    if params.CF is None:
        raise ParameterError("seconds-domain impulse response needs CF")
    w = 2.0 * np.pi * params.CF
    return w * h_exact(params, w * np.asarray(t, dtype=float))


def kernel_length(params: FilterParams, step: float) -> int:
    """Number of kernel samples kept before the envelope bound drops below
    ``KERNEL_TRUNCATION_RATIO`` of the envelope maximum."""
    env_max, _ = _envelope_max(params)
    target = KERNEL_TRUNCATION_RATIO * env_max
    nu = params.exponent - 0.5
    # solve K (t/2b)^nu exp(-A t) = target beyond the bound's own peak at nu/A
    t = max(nu, 1.0) / params.A_p
    for _ in range(200):
        t_new = (np.log(normalization(params)) + nu * np.log(t / (2.0 * params.b_p))
                 - np.log(target)) / params.A_p
        if not np.isfinite(t_new) or t_new <= 0:
            break
        if abs(t_new - t) < 1e-9 * t:
            t = t_new
            break
        t = t_new
    n = int(np.ceil(t / step)) + 1
    if n > _MAX_KERNEL_SAMPLES:
        raise KernelTruncationError(
            f"kernel needs {n} samples at step {step}; exceeds {_MAX_KERNEL_SAMPLES}")
    return n


def filter_via_convolution(signal: SampledSignal, params: FilterParams,
                           kernel=None) -> SampledSignal:
    """Discrete linear convolution with the sampled impulse response.

    The kernel is sampled on the signal's grid and truncated where its
    envelope bound falls below ``KERNEL_TRUNCATION_RATIO`` of the envelope
    maximum; the sum is scaled by the grid step.  An alternative kernel
    evaluator (e.g. the gammatone approximant) may be supplied.
    """
    validate(params)
    if signal.domain is Domain.SECONDS:
        if params.CF is None:
            raise ParameterError("seconds-domain input needs CF to form scaled time")
        signal = signal.to_scaled_time(params.CF)
    n_kernel = min(kernel_length(params, signal.step), len(signal))
    t_kernel = signal.step * np.arange(n_kernel)
    h = h_exact(params, t_kernel) if kernel is None else kernel(params, t_kernel)
    out = np.convolve(signal.values, h)[:len(signal)] * signal.step
    return signal.with_values(out)
