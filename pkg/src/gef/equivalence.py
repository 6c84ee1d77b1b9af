"""Cross-representation equivalence experiments as reusable fixtures.

Each case samples an analytic input on a scaled-time grid, runs every
applicable representation on identical samples, and scores each against the
closed-form oracle.  Errors are split at the impulse-response envelope peak
because the approximate methods' deviations concentrate before it.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import FilterParams, UnsupportedExponentError, validate
from .fractional_integral import default_imag_tol, gef_response_integral
from .impulse_response import filter_via_convolution, h_gtf
from .ode_solver import simulate_params
from .signals import analytic_oracle, half_integer_equiv_input, integer_equiv_input
from .transfer_function import filter_via_dft

DEFAULT_STEP = 0.01
DEFAULT_T_MAX = 60.0


@dataclass(frozen=True)
class MethodResult:
    method: str
    max_abs_error: float
    relative_max_error: float
    early_time_error: float
    late_time_error: float


@dataclass(frozen=True)
class EquivalenceReport:
    case_id: str
    oracle_id: str
    step: float
    t_max: float
    methods: tuple[MethodResult, ...]

    def result(self, method: str) -> MethodResult:
        for m in self.methods:
            if m.method == method:
                return m
        raise KeyError(method)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("case,method,max_abs,rel_max,early,late\n")
        for m in self.methods:
            buf.write(f"{self.case_id},{m.method},{m.max_abs_error:.17g},"
                      f"{m.relative_max_error:.17g},{m.early_time_error:.17g},"
                      f"{m.late_time_error:.17g}\n")
        return buf.getvalue()


def _score(method: str, q: np.ndarray, q_oracle: np.ndarray, t: np.ndarray,
           t_split: float) -> MethodResult:
    err = np.abs(q - q_oracle)
    scale = np.max(np.abs(q_oracle))
    early = t < t_split
    return MethodResult(
        method=method,
        max_abs_error=float(np.max(err)),
        relative_max_error=float(np.max(err) / scale),
        early_time_error=float(np.max(err[early]) / scale) if np.any(early) else 0.0,
        late_time_error=float(np.max(err[~early]) / scale) if np.any(~early) else 0.0,
    )


def run_integer_case(params: FilterParams, step: float = DEFAULT_STEP,
                     t_max: float = DEFAULT_T_MAX) -> EquivalenceReport:
    """Integer-exponent case: all representations against the
    partial-fraction oracle on the damped polynomial-sinusoid input."""
    validate(params)
    if params.B_u.denominator != 1 or not 2 <= params.B_u.numerator <= 5:
        raise UnsupportedExponentError(
            f"integer case fixture expects B_u in [2, 5], got {params.B_u}")
    inp = integer_equiv_input()
    n = int(round(t_max / step)) + 1
    u = inp.sample(step, n)
    t = u.times
    q_oracle = analytic_oracle(inp, params)(t)
    t_split = (params.exponent - 1.0) / params.A_p

    results = [
        _score("convolution", filter_via_convolution(u, params).values, q_oracle, t, t_split),
        _score("ode_rk4", simulate_params(params, u).values, q_oracle, t, t_split),
        _score("integral",
               gef_response_integral(params, u, imag_tol=default_imag_tol(step)).values,
               q_oracle, t, t_split),
        _score("gtf_approx",
               filter_via_convolution(u, params, kernel=h_gtf).values, q_oracle, t, t_split),
    ]
    return EquivalenceReport(
        case_id=f"integer_Bu{params.B_u.numerator}", oracle_id="partial_fraction",
        step=step, t_max=t_max, methods=tuple(results))


def run_half_integer_case(params: FilterParams, step: float = DEFAULT_STEP,
                          t_max: float = DEFAULT_T_MAX,
                          a=Fraction(1, 2)) -> EquivalenceReport:
    """Half-integer case: integral and DFT paths against the
    exponent-addition oracle (the closed-form response doubles as truth)."""
    validate(params)
    if (2 * params.B_u).denominator != 1 or params.B_u.denominator != 2 \
            or params.B_u < Fraction(3, 2):
        raise UnsupportedExponentError(
            f"half-integer case fixture expects B_u in {{3/2, 5/2, 7/2}}, got {params.B_u}")
    inp = half_integer_equiv_input(params, a)
    n = int(round(t_max / step)) + 1
    u = inp.sample(step, n)
    t = u.times
    q_oracle = analytic_oracle(inp, params)(t)
    t_split = (params.exponent + float(Fraction(a)) - 1.0) / params.A_p

    results = [
        _score("closed_form", q_oracle, q_oracle, t, t_split),
        _score("integral",
               gef_response_integral(params, u, imag_tol=default_imag_tol(step)).values,
               q_oracle, t, t_split),
        _score("dft", filter_via_dft(u, params).values, q_oracle, t, t_split),
    ]
    return EquivalenceReport(
        case_id=f"half_integer_Bu{params.B_u}", oracle_id="exponent_addition",
        step=step, t_max=t_max, methods=tuple(results))
