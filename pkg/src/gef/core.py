"""Shared parameter types, conventions and validation.

A generalized exponent filter (GEF) is a second-order all-pole base filter
raised to a positive rational exponent.  One filter is fully described by the
triple ``(A_p, b_p, B_u)`` plus an optional peak frequency ``CF`` in Hz:

* ``A_p``  -- damping; negative real part of the base poles,
* ``b_p``  -- normalized tonal frequency; imaginary part of the base poles,
* ``B_u``  -- filter exponent, a positive rational stored exactly,
* ``CF``   -- characteristic (peak) frequency used to map real seconds onto
  the dimensionless scaled time ``t_tilde = 2*pi*CF*t``.

All types in this module are immutable values and all operations are pure
functions, so they may be shared freely across threads.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction

import numpy as np

# Largest denominator accepted for the exponent.  Cascade identities replicate
# the filter `denominator` times, so huge denominators are of no practical use
# and make the checks intractable.
MAX_EXPONENT_DENOMINATOR = 64


class GefError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(GefError, ValueError):
    """Invalid filter constants or signal parameters."""


class NonPositiveConstantError(ParameterError):
    """A filter constant that must be strictly positive is not."""


class NonRationalExponentError(ParameterError):
    """The exponent could not be represented as a positive rational."""


class DegenerateBandpassError(ParameterError):
    """Raised where an interior magnitude peak is required but b_p <= A_p."""


class DegenerateBandpassWarning(UserWarning):
    """Constants are valid but give no interior magnitude peak (b_p <= A_p)."""


class UnsupportedExponentError(GefError, ValueError):
    """The exponent is outside the domain of the requested representation."""


class NoCrossingError(GefError, ValueError):
    """The magnitude response never falls the requested number of dB."""


class GridError(GefError, ValueError):
    """A sample or frequency grid does not satisfy an operation's contract."""


class MethodUnsupportedError(GefError, ValueError):
    """The selected processing method cannot handle the given exponent."""


class OracleError(GefError, ValueError):
    """No closed-form output is available for this input/exponent pair."""


class NumericalError(GefError, RuntimeError):
    """A computation produced numerically untrustworthy results."""


class ImaginaryResidueError(NumericalError):
    """The imaginary residue of a nominally real result is too large."""


class InstabilityError(NumericalError):
    """Simulated state grew beyond the divergence guard."""


class KernelTruncationError(NumericalError):
    """An impulse-response kernel did not decay within the sample budget."""


def as_exponent(value) -> Fraction:
    """Coerce ``value`` to a positive rational exponent in lowest terms.

    Accepts :class:`~fractions.Fraction`, int, ``"m/n"`` strings and floats;
    floats are snapped to the nearest rational with denominator at most
    ``MAX_EXPONENT_DENOMINATOR``.
    """
    try:
        if isinstance(value, Fraction):
            frac = value
        elif isinstance(value, str):
            text = value.strip()
            if "/" in text:
                frac = Fraction(text)
            else:  # decimal string: snap like a float
                frac = Fraction(float(text)).limit_denominator(MAX_EXPONENT_DENOMINATOR)
        elif isinstance(value, (int, np.integer)):
            frac = Fraction(int(value))
        else:
            frac = Fraction(float(value)).limit_denominator(MAX_EXPONENT_DENOMINATOR)
    except ZeroDivisionError as exc:
        raise NonRationalExponentError(f"exponent {value!r} has zero denominator") from exc
    except (ValueError, TypeError, OverflowError) as exc:
        raise NonRationalExponentError(f"cannot interpret {value!r} as a rational exponent") from exc
    if frac.denominator > MAX_EXPONENT_DENOMINATOR:
        raise NonRationalExponentError(
            f"exponent denominator {frac.denominator} exceeds {MAX_EXPONENT_DENOMINATOR}"
        )
    return frac


@dataclass(frozen=True)
class FilterParams:
    """Constants of one generalized exponent filter.

    ``B_u`` is stored as an exact rational; use :attr:`exponent` for the
    float view used in numerics.  ``CF`` stays ``None`` for purely
    normalized-domain work.
    """

    A_p: float
    b_p: float = 1.0
    B_u: Fraction = Fraction(2)
    CF: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "A_p", float(self.A_p))
        object.__setattr__(self, "b_p", float(self.b_p))
        object.__setattr__(self, "B_u", as_exponent(self.B_u))
        if self.CF is not None:
            object.__setattr__(self, "CF", float(self.CF))

    @property
    def exponent(self) -> float:
        """Real-valued view of the rational exponent."""
        return self.B_u.numerator / self.B_u.denominator

    @property
    def pole_magnitude_sq(self) -> float:
        """|p|^2 = A_p^2 + b_p^2 of the base poles."""
        return self.A_p * self.A_p + self.b_p * self.b_p

    @property
    def is_bandpass(self) -> bool:
        """True when the magnitude response has an interior peak."""
        return self.b_p > self.A_p

    def with_cf(self, cf: float) -> "FilterParams":
        return replace(self, CF=float(cf))


@dataclass(frozen=True)
class Pole:
    """One of the repeated complex-conjugate base poles."""

    value: complex

    @property
    def conjugate(self) -> complex:
        return np.conj(self.value)

    @property
    def magnitude_sq(self) -> float:
        return float(abs(self.value)) ** 2


def pole(params: FilterParams) -> Pole:
    """Base pole ``p = -A_p + i*b_p`` (strictly in the left half plane)."""
    params = validate(params)
    return Pole(complex(-params.A_p, params.b_p))


def validate(params: FilterParams) -> FilterParams:
    """Check the positivity invariants, returning the params unchanged.

    Raises on non-positive constants; a valid-but-degenerate lowpass
    configuration (``b_p <= A_p``) is flagged with
    :class:`DegenerateBandpassWarning` rather than rejected.
    """
    for name in ("A_p", "b_p"):
        v = getattr(params, name)
        if not np.isfinite(v) or v <= 0.0:
            raise NonPositiveConstantError(f"{name} must be a positive real, got {v}")
    if params.B_u <= 0:
        raise NonPositiveConstantError(f"B_u must be positive, got {params.B_u}")
    if params.CF is not None and (not np.isfinite(params.CF) or params.CF <= 0.0):
        raise NonPositiveConstantError(f"CF must be a positive frequency in Hz, got {params.CF}")
    if not params.is_bandpass:
        warnings.warn(
            f"b_p={params.b_p} <= A_p={params.A_p}: no interior magnitude peak",
            DegenerateBandpassWarning,
            stacklevel=2,
        )
    return params


def scaled_time(t, cf: float):
    """Map seconds to scaled time: ``t_tilde = 2*pi*CF*t``."""
    if cf is None or not np.isfinite(cf) or cf <= 0.0:
        raise NonPositiveConstantError(f"CF must be positive, got {cf}")
    return 2.0 * np.pi * cf * np.asarray(t) if np.ndim(t) else 2.0 * np.pi * cf * t


def unscale_time(t_tilde, cf: float):
    """Inverse of :func:`scaled_time`."""
    if cf is None or not np.isfinite(cf) or cf <= 0.0:
        raise NonPositiveConstantError(f"CF must be positive, got {cf}")
    return np.asarray(t_tilde) / (2.0 * np.pi * cf) if np.ndim(t_tilde) else t_tilde / (2.0 * np.pi * cf)


class Domain(Enum):
    """Coordinate of a sampled signal's time axis."""

    SECONDS = "seconds"
    SCALED_TIME = "scaled_time"


@dataclass(frozen=True)
class SampledSignal:
    """Uniformly sampled real series with its step size and domain tag."""

    values: np.ndarray
    step: float
    domain: Domain = Domain.SECONDS
    start: float = 0.0
    note: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1:
            raise GridError("signal values must be one-dimensional")
        if not np.isfinite(self.step) or self.step <= 0.0:
            raise GridError(f"sample step must be positive, got {self.step}")
        if values.size and not np.all(np.isfinite(values)):
            raise GridError("signal values must be finite")

    def __len__(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        """Sample coordinates in the signal's own domain."""
        return self.start + self.step * np.arange(self.values.size)

    def to_scaled_time(self, cf: float) -> "SampledSignal":
        """Reinterpret a seconds-domain signal on the scaled-time axis."""
        if self.domain is Domain.SCALED_TIME:
            return self
        factor = 2.0 * np.pi * cf
        if cf is None or cf <= 0.0:
            raise NonPositiveConstantError(f"CF must be positive, got {cf}")
        return SampledSignal(self.values, self.step * factor, Domain.SCALED_TIME,
                             self.start * factor, self.note)

    def to_seconds(self, cf: float) -> "SampledSignal":
        """Reinterpret a scaled-time signal on the seconds axis."""
        if self.domain is Domain.SECONDS:
            return self
        factor = 2.0 * np.pi * cf
        if cf is None or cf <= 0.0:
            raise NonPositiveConstantError(f"CF must be positive, got {cf}")
        return SampledSignal(self.values, self.step / factor, Domain.SECONDS,
                             self.start / factor, self.note)

    def with_values(self, values: np.ndarray, note: str | None = None) -> "SampledSignal":
        return SampledSignal(values, self.step, self.domain, self.start,
                             self.note if note is None else note)

    def to_csv(self) -> str:
        """Two-column table; the time column name reflects the domain."""
        name = "t_seconds" if self.domain is Domain.SECONDS else "t_tilde"
        lines = [f"{name},value"]
        for t, v in zip(self.times, self.values):
            lines.append(f"{t:.17g},{v:.17g}")
        return "\n".join(lines) + "\n"
