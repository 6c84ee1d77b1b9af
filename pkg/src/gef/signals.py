"""Analytic test inputs and closed-form output oracles.

The equivalence experiments need inputs whose filtered outputs are known
exactly.  Two families make that possible:

* inputs whose Laplace transforms are rational with known poles -- the
  output's transform is then rational too and inverts by partial fractions
  (residues computed in high-precision arithmetic, self-checked against the
  original transform);
* an input whose transform is the filter's own base quadratic raised to a
  power ``-a`` -- filtering just adds exponents, so the output is the
  closed-form impulse response at exponent ``B_u + a``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable

import mpmath as mp
import numpy as np
from scipy.special import gamma, jv

from .core import Domain, FilterParams, OracleError, ParameterError, SampledSignal, validate
from .impulse_response import h_exact

_ORACLE_DPS = 40
_ORACLE_SELFCHECK_TOL = 1e-12


class InputKind(Enum):
    TONE_PIPS = "tone_pips"
    QUADRATIC_CHIRP = "quadratic_chirp"
    INTEGER_EQUIVALENCE = "integer_equivalence"
    HALF_INTEGER_EQUIVALENCE = "half_integer_equivalence"
    STEP = "step"
    SMOOTH_PULSE = "smooth_pulse"


@dataclass(frozen=True)
class AnalyticInput:
    """An exactly evaluable input, optionally with its transform structure.

    ``transform_terms`` lists ``(coef, pole, order)`` meaning
    ``coef / (s - pole)**order`` when the Laplace transform is rational.
    """

    kind: InputKind
    parameters: dict
    evaluator: Callable[[np.ndarray], np.ndarray]
    domain: Domain
    transform_terms: tuple = ()

    def sample(self, step: float, n: int) -> SampledSignal:
        """Evaluate exactly on a uniform grid starting at zero."""
        t = step * np.arange(n)
        return SampledSignal(self.evaluator(t), step, self.domain)


def tone_pips(cf: float) -> AnalyticInput:
    """Four Gaussian-windowed tone pips around a filter's peak frequency.

    Window width 5 ms; pips at (CF, 20 ms), (5 CF, 50 ms), (7/8 CF, 70 ms)
    and (CF/5, 40 ms), unit amplitude each.
    """
    if cf <= 0:
        raise ParameterError(f"CF must be positive, got {cf}")
    width = 5e-3
    pips = ((cf, 20e-3), (5.0 * cf, 50e-3), (0.875 * cf, 70e-3), (0.2 * cf, 40e-3))

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for f_i, t_i in pips:
            out += np.exp(-((t - t_i) / width) ** 2) * np.sin(2.0 * np.pi * f_i * t)
        return out

    return AnalyticInput(InputKind.TONE_PIPS,
                         {"cf": cf, "width": width, "pips": pips}, evaluate, Domain.SECONDS)


def quadratic_chirp(cf: float, f_start: float | None = None, f_end: float | None = None,
                    duration: float = 50e-3) -> AnalyticInput:
    """Chirp whose instantaneous frequency grows quadratically in time.

    Defaults sweep 0.2*CF up to 2*CF over the duration.  All three
    constants are artifact conventions, exposed for adjustment.
    """
    if cf <= 0 or duration <= 0:
        raise ParameterError("CF and duration must be positive")
    f0 = 0.2 * cf if f_start is None else f_start
    f1 = 2.0 * cf if f_end is None else f_end

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        phase = f0 * t + (f1 - f0) * t**3 / (3.0 * duration**2)
        return np.sin(2.0 * np.pi * phase)

    return AnalyticInput(InputKind.QUADRATIC_CHIRP,
                         {"cf": cf, "f_start": f0, "f_end": f1, "duration": duration},
                         evaluate, Domain.SECONDS)


def integer_equiv_input() -> AnalyticInput:
    """Damped polynomial-sinusoid pair with a rational transform.

    ``u(t) = t cos(10 t) exp(-t/2) + t^3 exp(-t) cos(t)`` in scaled time;
    poles at -1/2 +- 10i (order 2) and -1 +- i (order 4).
    """

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        return t * np.cos(10.0 * t) * np.exp(-0.5 * t) + t**3 * np.exp(-t) * np.cos(t)

    s1 = complex(-0.5, 10.0)
    s2 = complex(-1.0, 1.0)
    terms = ((0.5, s1, 2), (0.5, np.conj(s1), 2), (3.0, s2, 4), (3.0, np.conj(s2), 4))
    return AnalyticInput(InputKind.INTEGER_EQUIVALENCE, {}, evaluate,
                         Domain.SCALED_TIME, terms)


def half_integer_equiv_input(params: FilterParams, a=Fraction(1, 2)) -> AnalyticInput:
    """Input sharing the filter's base quadratic, raised to ``-a``.

    ``u(t) = exp(-A_p t) t**(a-1/2) J_{a-1/2}(b_p t)``; for the default
    a = 1/2 this is ``exp(-A_p t) J_0(b_p t)`` with transform exactly
    ``base(s)**(-1/2)``.  Filtering adds exponents, so the exact output is
    ``C_a * h`` at exponent ``B_u + a`` with
    ``C_a = (2 b_p)**(a-1/2) Gamma(a) / sqrt(pi)``.
    """
    validate(params)
    a = Fraction(a) if not isinstance(a, Fraction) else a
    if a <= 0:
        raise ParameterError(f"input exponent a must be positive, got {a}")
    a_f = float(a)
    a_p, b_p = params.A_p, params.b_p

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        return np.exp(-a_p * t) * t ** (a_f - 0.5) * jv(a_f - 0.5, b_p * t)

    constant = (2.0 * b_p) ** (a_f - 0.5) * gamma(a_f) / np.sqrt(np.pi)
    return AnalyticInput(InputKind.HALF_INTEGER_EQUIVALENCE,
                         {"a": a, "A_p": a_p, "b_p": b_p, "constant": constant},
                         evaluate, Domain.SCALED_TIME)


def step_input() -> AnalyticInput:
    """Unit step in scaled time; transform 1/s."""

    def evaluate(t):
        return np.ones_like(np.asarray(t, dtype=float))

    return AnalyticInput(InputKind.STEP, {}, evaluate, Domain.SCALED_TIME,
                         ((1.0, 0.0 + 0.0j, 1),))


def smooth_pulse(center: float, width: float) -> AnalyticInput:
    """Gaussian bump in scaled time; the impulse surrogate for integral-path
    tests (true impulses are outside that representation's contract)."""
    if width <= 0:
        raise ParameterError(f"width must be positive, got {width}")

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        return np.exp(-(((t - center) / width) ** 2))

    return AnalyticInput(InputKind.SMOOTH_PULSE, {"center": center, "width": width},
                         evaluate, Domain.SCALED_TIME)


def _residue_terms(transform_terms, filter_pole: complex, bu: int):
    """Partial-fraction terms of U(s) * base(s)**(-B_u) by high-precision
    Taylor expansion at every pole, with analytic cancellation of the
    expansion pole.  Returns (coef, pole, power) with q = sum coef t^p e^{pole t}.
    """
    mp.mp.dps = _ORACLE_DPS
    uterms = [(mp.mpc(c), mp.mpc(sig), int(r)) for (c, sig, r) in transform_terms]
    pfactors = [(mp.mpc(filter_pole), bu), (mp.conj(mp.mpc(filter_pole)), bu)]

    # merge coincident poles into one expansion point each
    pole_mult: dict = {}
    for (_, sig, r) in uterms:
        pole_mult[sig] = max(pole_mult.get(sig, 0), r)
    for (pol, e) in pfactors:
        pole_mult[pol] = pole_mult.get(pol, 0) + e

    def make_regularized(a, m):
        def f(s):
            rem = m
            prod = mp.mpc(1)
            for (pol, e) in pfactors:
                if pol == a:
                    rem -= e
                else:
                    prod *= (s - pol) ** (-e)
            tot = mp.mpc(0)
            for (c, sig, r) in uterms:
                if sig == a:
                    tot += c * (s - a) ** (rem - r)
                else:
                    tot += c * (s - a) ** rem / (s - sig) ** r
            return tot * prod
        return f

    terms = []
    for a, m in pole_mult.items():
        coeffs = mp.taylor(make_regularized(a, m), a, m - 1)
        for r in range(1, m + 1):
            coef = coeffs[m - r] / mp.factorial(r - 1)
            terms.append((complex(coef), complex(a), r - 1))

    _selfcheck_residues(terms, uterms, pfactors)
    return terms


def _selfcheck_residues(terms, uterms, pfactors):
    """Certify the expansion by comparing with U*P at off-pole points."""
    for s_probe in (mp.mpc(0.3, 0.7), mp.mpc(1.1, -0.4), mp.mpc(-0.2, 2.3)):
        direct = mp.mpc(0)
        for (c, sig, r) in uterms:
            direct += c / (s_probe - sig) ** r
        for (pol, e) in pfactors:
            direct *= (s_probe - pol) ** (-e)
        recon = mp.mpc(0)
        for (coef, a, power) in terms:
            recon += coef * mp.factorial(power) / (s_probe - a) ** (power + 1)
        scale = max(abs(direct), mp.mpf(1))
        if abs(direct - complex(recon)) / scale > _ORACLE_SELFCHECK_TOL:
            raise OracleError("partial-fraction self-check failed; expansion untrustworthy")


def analytic_oracle(analytic_input: AnalyticInput, params: FilterParams):
    """Exact output of the filter for a supported input, as a callable of
    scaled time.

    Rational-transform inputs need an integer exponent (partial fractions);
    the base-quadratic input works for any exponent via exponent addition.
    """
    validate(params)
    kind = analytic_input.kind
    if kind in (InputKind.INTEGER_EQUIVALENCE, InputKind.STEP):
        if params.B_u.denominator != 1:
            raise OracleError(f"partial-fraction oracle needs integer B_u, got {params.B_u}")
        pole_p = complex(-params.A_p, params.b_p)
        terms = _residue_terms(analytic_input.transform_terms, pole_p, params.B_u.numerator)

        def oracle(t):
            t = np.asarray(t, dtype=float)
            out = np.zeros(t.shape, dtype=complex)
            for coef, a, power in terms:
                out += coef * t**power * np.exp(a * t)
            return out.real

        return oracle

    if kind is InputKind.HALF_INTEGER_EQUIVALENCE:
        in_params = analytic_input.parameters
        if abs(in_params["A_p"] - params.A_p) > 0 or abs(in_params["b_p"] - params.b_p) > 0:
            raise OracleError("input and filter must share the same base constants")
        a = in_params["a"]
        out_params = FilterParams(params.A_p, params.b_p, params.B_u + a)
        constant = in_params["constant"]

        def oracle(t):
            return constant * h_exact(out_params, t)

        return oracle

    raise OracleError(f"no closed-form oracle for input kind {kind}")
