"""Closed-form leading-order growth estimates and ratio reporting.

Estimates for partition counts, factorials, the Gamma-function limit of the
Newton-binomial coefficients, infinite q-products and Jackson q-factorials,
each paired with an exact route from :mod:`.exact_core` through
``ratio_report``.  Anything that can overflow a fixed-width float is
returned on the natural-log scale.
"""

import enum
from dataclasses import dataclass

import mpmath
from mpmath import mpf

from . import exact_core, special_fn
from .precision import resolve_bits, working_precision


@dataclass(frozen=True)
class PartitionRegime:
    """Saddle radius bundle for partitions of n: eps = pi/sqrt(6n), r = e^-eps,
    eta = eps^(3/2)/sqrt(2 zeta(3))."""

    n: int
    eps: mpf
    r: mpf
    eta: mpf

    @classmethod
    def for_size(cls, n: int, precision_bits=None) -> "PartitionRegime":
        if not isinstance(n, int) or n < 1:
            raise ValueError("n must be a positive integer")
        bits = resolve_bits(precision_bits)
        with working_precision(bits):
            eps = mpmath.pi / mpmath.sqrt(6 * n)
            r = mpmath.exp(-eps)
            eta = eps ** mpf("1.5") / mpmath.sqrt(2 * special_fn.zeta3(bits))
            return cls(n=n, eps=+eps, r=+r, eta=+eta)


@dataclass(frozen=True)
class QRegime:
    """q-factorial regime at fixed rate beta: q = e^(-beta/n), saddle radius
    r = 1 - e^-beta, CLT variance sigma_sq = e^beta - 1 - beta."""

    beta: mpf
    n: int
    q: mpf
    r: mpf
    sigma_sq: mpf

    @classmethod
    def for_params(cls, beta, n: int, precision_bits=None) -> "QRegime":
        if not isinstance(n, int) or n < 1:
            raise ValueError("n must be a positive integer")
        bits = resolve_bits(precision_bits)
        with working_precision(bits):
            beta_val = mpf(beta)
            if not beta_val > 0:
                raise ValueError("beta must be > 0")
            q = mpmath.exp(-beta_val / n)
            r = 1 - mpmath.exp(-beta_val)
            sigma_sq = mpmath.exp(beta_val) - 1 - beta_val
            return cls(beta=+beta_val, n=n, q=+q, r=+r, sigma_sq=+sigma_sq)


@dataclass(frozen=True)
class RatioRow:
    """One exact-vs-estimate comparison; ratio = exp(approx_log - exact_log)."""

    n: int
    exact_log: mpf
    approx_log: mpf
    ratio: mpf


def hardy_ramanujan_estimate(n: int, precision_bits=None) -> mpf:
    """ln of exp(pi sqrt(2n/3)) / (4n sqrt(3)), the leading-order p(n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    with working_precision(precision_bits):
        return +(mpmath.pi * mpmath.sqrt(mpf(2 * n) / 3)
                 - mpmath.log(4 * n * mpmath.sqrt(3)))


def prefactor_estimate(n: int, precision_bits=None) -> mpf:
    """ln of exp(pi sqrt(2n/3)) / (24n)^(1/4): the saddle prefactor
    r^-n / prod(1 - r^k) at the optimal radius."""
    if n < 1:
        raise ValueError("n must be >= 1")
    with working_precision(precision_bits):
        return +(mpmath.pi * mpmath.sqrt(mpf(2 * n) / 3)
                 - mpmath.log(24 * n) / 4)


def stirling_estimate(n: int, precision_bits=None) -> mpf:
    """ln of n^n e^-n sqrt(2 pi n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    with working_precision(precision_bits):
        n_val = mpf(n)
        return +(n_val * mpmath.log(n_val) - n_val
                 + mpmath.log(2 * mpmath.pi * n_val) / 2)


def gamma_limit_estimate(s, n: int, precision_bits=None) -> mpf:
    """n^(s-1) / rising_coeff(s, n), which converges to Gamma(s).

    Exactly 1 for s = 1 at every n (geometric-series coefficients).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    bits = resolve_bits(precision_bits)
    coeff = exact_core.rising_coeff(s, n, precision_bits=bits + 16)
    with working_precision(bits + 16):
        value = mpf(n) ** (mpf(s) - 1) / coeff
    with working_precision(bits):
        return +value


def q_infinite_product_estimate(a, eps, precision_bits=None) -> mpf:
    """Small-eps estimate of (a; e^-eps)_infinity: exp(-Li2(a)/eps) sqrt(1-a)."""
    bits = resolve_bits(precision_bits)
    with working_precision(bits):
        a_val = mpf(a)
        eps_val = mpf(eps)
        if not (0 < a_val < 1):
            raise ValueError("a must lie in (0, 1)")
        if not eps_val > 0:
            raise ValueError("eps must be > 0")
        li2 = special_fn.dilog(a_val, precision_bits=bits)
        return +(mpmath.exp(-li2 / eps_val) * mpmath.sqrt(1 - a_val))


def q_inverse_pochhammer_estimate(reg: QRegime, precision_bits=None) -> mpf:
    """ln of the growth estimate for 1/(q; q)_n at q = e^(-beta/n).

    Closed form: n(-ln r + Li2(r)/beta) + beta/2 - ln(2 pi (1+sigma^2) n)/2.
    The exp(+beta/2) constant here is the numerically verified one; the
    companion q-factorial estimate below is kept algebraically consistent
    with it (their sum telescopes to n ln(n/beta) + beta/2 exactly).
    """
    bits = resolve_bits(precision_bits)
    with working_precision(bits):
        n = reg.n
        rate = n * (-mpmath.log(reg.r)
                    + special_fn.dilog(reg.r, precision_bits=bits) / reg.beta)
        return +(rate + reg.beta / 2
                 - mpmath.log(2 * mpmath.pi * (1 + reg.sigma_sq) * n) / 2)


def q_stirling_estimate(reg: QRegime, precision_bits=None) -> mpf:
    """ln of the growth estimate for the Jackson q-factorial [n]_q! at
    q = e^(-beta/n):

        n ln n + n(-ln beta + ln r - Li2(r)/beta) + ln(2 pi (1+sigma^2) n)/2.

    No exponential-in-beta prefactor survives once the (1-q)^n expansion
    (1 - e^(-beta/n))^n ~ (beta/n)^n e^(-beta/2) is combined with the
    inverse-Pochhammer estimate; this constant is verified numerically in
    the test suite.
    """
    bits = resolve_bits(precision_bits)
    with working_precision(bits):
        n = reg.n
        rate = n * (mpmath.log(mpf(n)) - mpmath.log(reg.beta) + mpmath.log(reg.r)
                    - special_fn.dilog(reg.r, precision_bits=bits) / reg.beta)
        return +(rate + mpmath.log(2 * mpmath.pi * (1 + reg.sigma_sq) * n) / 2)


class ReportKind(enum.Enum):
    PARTITION = "partition"
    STIRLING = "stirling"
    GAMMA = "gamma"
    Q_POCHHAMMER = "q-pochhammer"
    Q_FACTORIAL = "q-factorial"


def ratio_report(kind: ReportKind, ns, s=None, beta=None, precision_bits=None):
    """One RatioRow per n: exact route log vs closed-form estimate log.

    ``ns`` must be nonempty and strictly increasing.  GAMMA needs ``s``;
    the q kinds need ``beta``.  Rows are returned in input order.
    """
    ns = list(ns)
    if not ns:
        raise ValueError("ns must be nonempty")
    if any(not isinstance(n, int) or n < 1 for n in ns):
        raise ValueError("ns must contain positive integers")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("ns must be strictly increasing")
    kind = ReportKind(kind)
    if kind is ReportKind.GAMMA and s is None:
        raise ValueError("GAMMA reports need s")
    if kind in (ReportKind.Q_POCHHAMMER, ReportKind.Q_FACTORIAL) and beta is None:
        raise ValueError("q reports need beta")
    bits = resolve_bits(precision_bits)

    rows = []
    if kind is ReportKind.PARTITION:
        table = exact_core.partition_count_through(ns[-1])
        for n in ns:
            with working_precision(bits):
                exact_log = +mpmath.log(mpf(table[n]))
            rows.append(_make_row(n, exact_log,
                                  hardy_ramanujan_estimate(n, bits), bits))
    elif kind is ReportKind.STIRLING:
        for n in ns:
            with working_precision(bits):
                exact_log = +mpmath.log(mpf(exact_core.factorial(n)))
            rows.append(_make_row(n, exact_log, stirling_estimate(n, bits), bits))
    elif kind is ReportKind.GAMMA:
        with working_precision(bits):
            # classical anchor for the limit the estimate converges to
            exact_log = +mpmath.log(mpmath.gamma(mpf(s)))
        for n in ns:
            with working_precision(bits):
                approx_log = +mpmath.log(gamma_limit_estimate(s, n, bits))
            rows.append(_make_row(n, exact_log, approx_log, bits))
    elif kind is ReportKind.Q_POCHHAMMER:
        for n in ns:
            reg = QRegime.for_params(beta, n, bits)
            with working_precision(bits):
                exact_log = +(-mpmath.log(
                    exact_core.q_pochhammer(reg.q, reg.q, n, precision_bits=bits)))
            rows.append(_make_row(n, exact_log,
                                  q_inverse_pochhammer_estimate(reg, bits), bits))
    else:
        for n in ns:
            reg = QRegime.for_params(beta, n, bits)
            with working_precision(bits):
                exact_log = +mpmath.log(
                    exact_core.q_factorial(n, reg.q, precision_bits=bits))
            rows.append(_make_row(n, exact_log, q_stirling_estimate(reg, bits), bits))
    return rows


def _make_row(n, exact_log, approx_log, bits):
    with working_precision(bits):
        ratio = +mpmath.exp(approx_log - exact_log)
    return RatioRow(n=n, exact_log=exact_log, approx_log=approx_log, ratio=ratio)
