"""Rational-exponent generalized exponent filters.

Four equivalent representations of one filter family -- transfer function,
closed-form impulse response, state-space ODE (integer exponents), and a
fractional-integral pipeline (any rational exponent > 1) -- plus a
characteristics engine, filterbanks, and the cross-representation
equivalence harness.
"""

from .core import (
    DegenerateBandpassError,
    DegenerateBandpassWarning,
    Domain,
    FilterParams,
    GefError,
    ImaginaryResidueError,
    InstabilityError,
    KernelTruncationError,
    MethodUnsupportedError,
    NoCrossingError,
    NonPositiveConstantError,
    NonRationalExponentError,
    NumericalError,
    OracleError,
    ParameterError,
    Pole,
    SampledSignal,
    UnsupportedExponentError,
    as_exponent,
    pole,
    scaled_time,
    unscale_time,
    validate,
)
from .numerics import BACKEND

__version__ = "0.1.0"
