"""Special-function constants and slowly convergent series.

Dilogarithm on [-1, 1], the two Bose-type integrals behind the saddle-point
variances, and the two classical series whose limits are ln(pi/2) and
(1 - ln 2)/2.  Real results are mpf values at the working precision; series
partial sums carry a rigorous tail bound alongside the value.
"""

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from mpmath import mpf

from .precision import resolve_bits, working_precision


@dataclass(frozen=True)
class SeriesPartialSum:
    """Partial sum of a convergent series plus an upper bound on the tail."""

    terms_used: int
    value: mpf
    tail_bound: mpf

    def __post_init__(self):
        if self.terms_used < 1:
            raise ValueError("terms_used must be >= 1")
        if self.tail_bound < 0:
            raise ValueError("tail_bound must be >= 0")


def dilog_series(x, precision_bits=None) -> mpf:
    """Li2 by direct summation of x^k/k^2; requires |x| < 1.

    Converges usably only away from |x| = 1; the public ``dilog`` reduces
    its argument into |x| <= 1/2 before calling this.
    """
    bits = resolve_bits(precision_bits)
    with working_precision(bits + 16):
        x_val = mpf(x)
        ax = abs(x_val)
        if not ax < 1:
            raise ValueError("direct series requires |x| < 1")
        if x_val == 0:
            acc = mpf(0)
        else:
            target = mpf(2) ** (-(bits + 8))
            acc = mpf(0)
            power = mpf(1)
            k = 1
            while True:
                power *= x_val
                term = power / (k * k)
                acc += term
                # geometric tail bound: |x|^(k+1)/((k+1)^2 (1-|x|))
                if abs(power) * ax / ((k + 1) * (k + 1) * (1 - ax)) < target:
                    break
                k += 1
    with working_precision(bits):
        return +acc


def dilog(x, precision_bits=None) -> mpf:
    """Li2(x) for -1 <= x <= 1 with absolute error < 2^-(precision_bits-8).

    Direct series for |x| <= 1/2; otherwise reduced into that region by the
    reflection Li2(x) + Li2(1-x) = pi^2/6 - ln(x)ln(1-x) on (1/2, 1] and the
    Landen transform Li2(x) = -Li2(x/(x-1)) - ln^2(1-x)/2 on [-1, -1/2).
    """
    bits = resolve_bits(precision_bits)
    with working_precision(bits + 16):
        x_val = mpf(x)
        if not (-1 <= x_val <= 1):
            raise ValueError("dilog is implemented on [-1, 1] only")
        if abs(x_val) <= mpf(1) / 2:
            result = dilog_series(x_val, precision_bits=bits + 16)
        elif x_val > 0:
            pi2_6 = mpmath.pi ** 2 / 6
            if x_val == 1:
                result = pi2_6
            else:
                cross = mpmath.log(x_val) * mpmath.log(1 - x_val)
                result = pi2_6 - cross - dilog_series(1 - x_val, precision_bits=bits + 16)
        else:
            # x in [-1, -1/2): x/(x-1) lands in [1/3, 1/2]
            y = x_val / (x_val - 1)
            result = -dilog_series(y, precision_bits=bits + 16) \
                - mpmath.log(1 - x_val) ** 2 / 2
    with working_precision(bits):
        return +result


def zeta3(precision_bits=None) -> mpf:
    """Apery's constant zeta(3) at working precision.

    Delegated to mpmath: the direct 1/k^3 series would need ~2^(bits/2)
    terms to certify the default precision.
    """
    bits = resolve_bits(precision_bits)
    with working_precision(bits):
        return +mpmath.zeta(3)


def _bose_closed_form(p: int, bits: int) -> mpf:
    with working_precision(bits):
        if p == 1:
            return +(mpmath.pi ** 2 / 6)
        return +(2 * mpmath.zeta(3))


def bose_integral_quadrature(p: int, precision_bits=None):
    """Integral of x^p/(e^x - 1) on (0, inf) by adaptive quadrature.

    Substitutes u = e^-x onto (0, 1), where the integrand is
    (-ln u)^p / (1 - u), then applies tanh-sinh quadrature.  Returns
    (value, error_estimate).
    """
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    bits = resolve_bits(precision_bits)
    with working_precision(bits):
        def integrand(u):
            if u == 0 or u == 1:
                return mpf(0) if p == 2 else mpf(1) if u == 1 else mpf(0)
            return (-mpmath.log(u)) ** p / (1 - u)

        value, err = mpmath.quad(integrand, [0, 1], error=True)
        return +value, +mpf(err)


def bose_integral(p: int, precision_bits=None, check: bool = True) -> mpf:
    """pi^2/6 for p=1, 2*zeta(3) for p=2: the moments of x^p/(e^x - 1).

    With ``check`` (default), an independent quadrature evaluation is run
    and must agree with the closed form within its error estimate.
    """
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    bits = resolve_bits(precision_bits)
    closed = _bose_closed_form(p, bits)
    if check:
        quad_val, quad_err = bose_integral_quadrature(p, precision_bits=bits)
        with working_precision(bits):
            tol = max(quad_err, mpf(2) ** (-(bits - 16)))
            if abs(quad_val - closed) > tol:
                raise ArithmeticError(
                    f"quadrature {quad_val} disagrees with closed form {closed} "
                    f"beyond its error estimate {quad_err}")
    return closed


def bose_square_integral_quadrature(precision_bits=None):
    """Integral of (x/(e^x - 1))^2 on (0, inf); returns (value, error)."""
    bits = resolve_bits(precision_bits)
    with working_precision(bits):
        def integrand(u):
            # u = e^-x: (ln u)^2 * u / (1 - u)^2, smooth limits 0 and 1
            if u == 0:
                return mpf(0)
            if u == 1:
                return mpf(1)
            return mpmath.log(u) ** 2 * u / (1 - u) ** 2

        value, err = mpmath.quad(integrand, [0, 1], error=True)
        return +value, +mpf(err)


def bose_square_integral(precision_bits=None, check: bool = True) -> mpf:
    """pi^2/3 - 2*zeta(3): the variance constant of the weighted sums."""
    bits = resolve_bits(precision_bits)
    with working_precision(bits):
        closed = +(mpmath.pi ** 2 / 3 - 2 * mpmath.zeta(3))
    if check:
        quad_val, quad_err = bose_square_integral_quadrature(precision_bits=bits)
        with working_precision(bits):
            tol = max(quad_err, mpf(2) ** (-(bits - 16)))
            if abs(quad_val - closed) > tol:
                raise ArithmeticError(
                    f"quadrature {quad_val} disagrees with closed form {closed} "
                    f"beyond its error estimate {quad_err}")
    return closed


_SUM_CHUNK = 1 << 20


def sine_product_log_sum(terms: int, precision_bits=None) -> SeriesPartialSum:
    """Partial sum of -ln(1 - 1/(4k^2)), whose limit is ln(pi/2).

    Terms are accumulated in double precision: the certified tail bound
    1/(2K) dominates the ~1e-13 summation noise for any feasible K.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    bits = resolve_bits(precision_bits)
    total = 0.0
    for lo in range(1, terms + 1, _SUM_CHUNK):
        hi = min(terms, lo + _SUM_CHUNK - 1)
        k = np.arange(lo, hi + 1, dtype=np.float64)
        total += float(-np.sum(np.log1p(-0.25 / (k * k))))
    with working_precision(bits):
        return SeriesPartialSum(terms_used=terms, value=mpf(total),
                                tail_bound=mpf(1) / (2 * terms))


def stirling_series_sum(terms: int, precision_bits=None) -> SeriesPartialSum:
    """Partial sum of k*(ln(1+1/2k) - ln(1-1/2k)) - 1; limit (1 - ln 2)/2.

    t_k = 2k*atanh(1/(2k)) - 1 ~ 1/(12k^2); the tail bound 1/(6K) doubles
    the leading asymptotic tail for safety.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    bits = resolve_bits(precision_bits)
    total = 0.0
    for lo in range(1, terms + 1, _SUM_CHUNK):
        hi = min(terms, lo + _SUM_CHUNK - 1)
        k = np.arange(lo, hi + 1, dtype=np.float64)
        total += float(np.sum(2.0 * k * np.arctanh(0.5 / k) - 1.0))
    with working_precision(bits):
        return SeriesPartialSum(terms_used=terms, value=mpf(total),
                                tail_bound=mpf(1) / (6 * terms))
