"""Integer-exponent representation as a linear ODE of order 2*B_u.

In scaled time the filter satisfies

    (d^2/dt^2 + 2 A_p d/dt + |p|^2)^B_u q(t) = u(t),   z(0) = 0,

so expanding the operator power gives the characteristic polynomial whose
roots are the base poles, each repeated B_u times.  The companion-form state
space is integrated with fixed-step classical RK4 (sub-stepping via
``step_divisor``; the input is interpolated linearly between samples, which
the half-steps require).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import numerics
from .core import (
    Domain,
    FilterParams,
    GridError,
    InstabilityError,
    SampledSignal,
    UnsupportedExponentError,
    validate,
)

# Beyond this order the repeated-pole companion matrix is catastrophically
# ill-conditioned in float64; the integral representation has no such cap.
MAX_INTEGER_EXPONENT = 32

# State magnitudes beyond this are treated as divergence of the fixed-step
# integrator (step too large for the stiffness).
_DIVERGENCE_GUARD = 1e12


@dataclass(frozen=True)
class OperatorCoefficients:
    """Coefficients of the expanded operator, descending order, monic."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def ascending(self) -> np.ndarray:
        """Constant term first; the layout used by the companion last row."""
        return self.coeffs[::-1]


def expand_quadratic_power(a_p, b_p, n: int) -> list[Fraction]:
    """Exact rational expansion of ``(x^2 + 2 a x + a^2 + b^2)**n``.

    Operates on the exact binary values of the float constants, so the
    repeated-root structure of the result is preserved perfectly.
    """
    a = Fraction(a_p)
    c = a * a + Fraction(b_p) ** 2
    quad = [Fraction(1), 2 * a, c]
    poly = [Fraction(1)]
    for _ in range(n):
        out = [Fraction(0)] * (len(poly) + 2)
        for i, co in enumerate(poly):
            out[i] += co * quad[0]
            out[i + 1] += co * quad[1]
            out[i + 2] += co * quad[2]
        poly = out
    return poly


def expand_operator_exact(params: FilterParams, b_u: int | None = None) -> list[Fraction]:
    """Exact coefficients of the operator power for validated parameters."""
    validate(params)
    if b_u is None:
        if params.B_u.denominator != 1:
            raise UnsupportedExponentError(f"ODE form needs integer B_u, got {params.B_u}")
        b_u = params.B_u.numerator
    if not 1 <= b_u <= MAX_INTEGER_EXPONENT:
        raise UnsupportedExponentError(
            f"integer exponent must be in [1, {MAX_INTEGER_EXPONENT}], got {b_u}")
    return expand_quadratic_power(params.A_p, params.b_p, b_u)


def expand_operator(params: FilterParams, b_u: int | None = None) -> OperatorCoefficients:
    """Float coefficients of the operator power (descending, leading 1).

    Computed in exact rational arithmetic and rounded once, so each
    coefficient is correct to half an ulp.
    """
    exact = expand_operator_exact(params, b_u)
    return OperatorCoefficients(np.array([float(c) for c in exact]))


@dataclass(frozen=True)
class StateSpace:
    """Controllable companion realization; the first state is the output."""

    A: np.ndarray
    b: np.ndarray
    output_index: int = 0

    @property
    def order(self) -> int:
        return self.b.size


def to_state_space(coeffs: OperatorCoefficients) -> StateSpace:
    """Companion form: superdiagonal ones, last row the negated ascending
    coefficients, input entering at the last state."""
    n = coeffs.order
    a_mat = np.zeros((n, n))
    a_mat[np.arange(n - 1), np.arange(1, n)] = 1.0
    a_mat[-1, :] = -coeffs.ascending[:-1]
    b_vec = np.zeros(n)
    b_vec[-1] = 1.0
    return StateSpace(a_mat, b_vec)


def simulate(ss: StateSpace, u: SampledSignal, step_divisor: int = 1) -> SampledSignal:
    """Fixed-step classical RK4 from zero initial state, output on u's grid."""
    if u.domain is not Domain.SCALED_TIME:
        raise GridError("simulate expects the input on the scaled-time grid")
    if step_divisor < 1:
        raise GridError(f"step_divisor must be >= 1, got {step_divisor}")
    if len(u) < 2:
        raise GridError("need at least 2 input samples")
    coeffs_ascending = -ss.A[-1, :]
    q, max_norm = numerics.rk4_companion(coeffs_ascending, u.values, u.step, int(step_divisor))
    if max_norm > _DIVERGENCE_GUARD:
        raise InstabilityError(
            f"state norm reached {max_norm:.3e}; step {u.step}/{step_divisor} is too "
            "large for this stiffness")
    return u.with_values(q)


def simulate_params(params: FilterParams, u: SampledSignal, step_divisor: int = 1) -> SampledSignal:
    """Convenience: expand, realize and simulate one filter."""
    return simulate(to_state_space(expand_operator(params)), u, step_divisor)
