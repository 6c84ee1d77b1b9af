"""Frequency-domain filter characteristics and the rational-exponent continuum.

Everything here is computed from closed-form expressions for the magnitude
and phase of the base quadratic raised to the exponent, not from sampled
Bode grids (grid methods remain as cross-check oracles in the tests).  The
useful identities, with ``x = beta^2``, ``c = A_p^2 + b_p^2``:

* squared base magnitude  ``m(x) = (c - x)^2 + 4 A_p^2 x``, minimized at
  ``x = b_p^2 - A_p^2``, where it equals ``4 A_p^2 b_p^2``;
* phase  ``phi(beta) = -B_u * atan2(2 A_p beta, c - beta^2)``, so group delay
  is ``B_u * 2 A_p (c + x) / m(x)`` -- linear in the exponent.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .core import (
    DegenerateBandpassError,
    FilterParams,
    NoCrossingError,
    ParameterError,
    validate,
)


def _magnitude_sq_of_base(params: FilterParams, beta):
    beta = np.asarray(beta, dtype=float)
    return (params.pole_magnitude_sq - beta**2) ** 2 + (2.0 * params.A_p * beta) ** 2


def peak_beta(params: FilterParams) -> float:
    """Exact argmax of the magnitude response: ``sqrt(b_p^2 - A_p^2)``.

    Independent of the exponent, since the magnitude is a monotone function
    of the base magnitude.
    """
    validate(params)
    if not params.is_bandpass:
        raise DegenerateBandpassError(
            f"no interior peak for b_p={params.b_p} <= A_p={params.A_p}")
    return float(np.sqrt(params.b_p**2 - params.A_p**2))


def magnitude_db_rel_peak(params: FilterParams, beta):
    """Magnitude in dB referenced to the peak, from the closed form."""
    m_peak = (2.0 * params.A_p * params.b_p) ** 2
    return -10.0 * params.exponent * np.log10(_magnitude_sq_of_base(params, beta) / m_peak)


def phase(params: FilterParams, beta):
    """Continuously unwrapped phase in radians, exact for ``beta >= 0``."""
    beta = np.asarray(beta, dtype=float)
    out = -params.exponent * np.arctan2(2.0 * params.A_p * beta,
                                        params.pole_magnitude_sq - beta**2)
    return out if out.ndim else float(out)


def group_delay(params: FilterParams, beta):
    """Negative phase slope ``-d(phi)/d(beta)``, in radians per unit beta."""
    beta = np.asarray(beta, dtype=float)
    x = beta**2
    c = params.pole_magnitude_sq
    out = params.exponent * 2.0 * params.A_p * (c + x) / ((c - x) ** 2 + 4.0 * params.A_p**2 * x)
    return out if out.ndim else float(out)


def q_ndb(params: FilterParams, n_db: float) -> float:
    """Quality factor from the n-dB bandwidth: ``beta_peak / (beta_hi - beta_lo)``.

    The crossings solve a quadratic in ``beta^2`` exactly; the lower crossing
    may not exist for wide filters, in which case :class:`NoCrossingError`
    is raised.
    """
    bp = peak_beta(params)
    if n_db <= 0:
        raise ParameterError(f"n_db must be positive, got {n_db}")
    ratio = 10.0 ** (n_db / (10.0 * params.exponent))
    spread = 2.0 * params.A_p * params.b_p * np.sqrt(ratio - 1.0)
    x_lo = bp**2 - spread
    x_hi = bp**2 + spread
    if x_lo <= 0.0:
        raise NoCrossingError(
            f"response never falls {n_db} dB below peak on the low-frequency side")
    return float(bp / (np.sqrt(x_hi) - np.sqrt(x_lo)))


def erb(params: FilterParams) -> float:
    """Equivalent rectangular bandwidth of the power response.

    ``ERB = integral of |P(beta)|^2 / |P(beta_peak)|^2 over beta >= 0``; the
    normalized integrand is bounded by 1, and decays like ``beta**(-4 B_u)``,
    so convergence needs ``B_u > 1/4``.
    """
    bp = peak_beta(params)
    bu = params.exponent
    if bu <= 0.25:
        raise ParameterError(f"power integral diverges for B_u={bu} <= 1/4")
    m_peak = (2.0 * params.A_p * params.b_p) ** 2

    def integrand(beta):
        return (_magnitude_sq_of_base(params, beta) / m_peak) ** (-bu)

    total = 0.0
    pieces = [(0.0, bp), (bp, 3.0 * bp), (3.0 * bp, np.inf)]
    for lo, hi in pieces:
        val, _ = quad(integrand, lo, hi, epsabs=1e-14, epsrel=1e-11, limit=200)
        total += val
    return float(total)


def q_erb(params: FilterParams) -> float:
    return peak_beta(params) / erb(params)


def group_delay_max(params: FilterParams) -> float:
    """Maximum normalized group delay ``N = max(-dphi/dbeta) / (2 pi)``.

    The maximizer solves a quadratic in ``beta^2`` exactly:
    ``x* = 2 b_p sqrt(c) - c`` with ``c = A_p^2 + b_p^2`` (clamped to the
    beta = 0 endpoint when negative).  Exactly linear in the exponent.
    """
    validate(params)
    c = params.pole_magnitude_sq
    x_star = max(2.0 * params.b_p * np.sqrt(c) - c, 0.0)
    return float(group_delay(params, np.sqrt(x_star)) / (2.0 * np.pi))


@dataclass(frozen=True)
class Characteristics:
    """Characteristics of one parameter set, plus the compound ratios."""

    beta_peak: float
    q_erb: float
    q3: float
    q10: float
    q15: float
    n_group_delay: float

    @property
    def q_erb_over_n(self) -> float:
        return self.q_erb / self.n_group_delay

    @property
    def q_erb_over_q10(self) -> float:
        return self.q_erb / self.q10

    @property
    def q3_over_q15(self) -> float:
        return self.q3 / self.q15


def characteristics(params: FilterParams) -> Characteristics:
    return Characteristics(
        beta_peak=peak_beta(params),
        q_erb=q_erb(params),
        q3=q_ndb(params, 3.0),
        q10=q_ndb(params, 10.0),
        q15=q_ndb(params, 15.0),
        n_group_delay=group_delay_max(params),
    )


@dataclass(frozen=True)
class SweepRow:
    b_u: float
    chars: Characteristics | None
    error: str = ""


def characteristics_sweep(a_p: float, b_p: float, b_u_grid) -> list[SweepRow]:
    """One characteristics row per exponent value; failures become flagged rows."""
    rows = []
    for bu in b_u_grid:
        params = FilterParams(A_p=a_p, b_p=b_p, B_u=bu)
        try:
            rows.append(SweepRow(params.exponent, characteristics(params)))
        except (ParameterError, NoCrossingError, DegenerateBandpassError) as exc:
            rows.append(SweepRow(params.exponent, None, str(exc)))
    return rows


def sweep_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    buf.write("B_u,beta_peak,Q_erb,Q3,Q10,Q15,N,Qerb_over_N,Qerb_over_Q10,Q3_over_Q15\n")
    for row in rows:
        if row.chars is None:
            buf.write(f"{row.b_u:.17g},error: {row.error},,,,,,,,\n")
            continue
        ch = row.chars
        fields = (row.b_u, ch.beta_peak, ch.q_erb, ch.q3, ch.q10, ch.q15,
                  ch.n_group_delay, ch.q_erb_over_n, ch.q_erb_over_q10, ch.q3_over_q15)
        buf.write(",".join(f"{v:.17g}" for v in fields) + "\n")
    return buf.getvalue()
