"""Direct numerical evaluation of the contour integrals and truncated sums.

This is the computational bridge between exact oracles and closed-form
estimates: Cauchy coefficient integrals on the circle evaluated by the
trapezoid rule (spectrally accurate for periodic analytic integrands),
Laplace-type real-line integrals by adaptive quadrature, and the
Euler-Maclaurin reference sums evaluated to certified truncation.

The contour kernels run on gmpy2's mpfr/mpc types: the per-node product has
thousands of factors and mpfr keeps that affordable at a few hundred bits.
Results cross the module boundary as mpmath mpf values.
"""

import math
from dataclasses import dataclass

import gmpy2
import mpmath
from gmpy2 import mpc, mpfr
from mpmath import mpf

from .asymptotics import PartitionRegime, hardy_ramanujan_estimate
from .precision import resolve_bits, working_precision


class QuadratureError(ArithmeticError):
    """Quadrature failed to converge within the configured subdivisions."""

    def __init__(self, message, evaluations=0):
        super().__init__(message)
        self.evaluations = evaluations


class CertificationError(ArithmeticError):
    """A result could not be certified to the accuracy the caller needs."""


@dataclass(frozen=True)
class QuadratureConfig:
    max_subdivisions: int = 24
    abs_tolerance: mpf = mpf("1e-30")
    rel_tolerance: mpf = mpf("1e-30")

    def __post_init__(self):
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if not (self.abs_tolerance > 0 and self.rel_tolerance > 0):
            raise ValueError("tolerances must be > 0")


@dataclass(frozen=True)
class IntegralResult:
    value: mpf
    imag: mpf
    error_estimate: mpf
    evaluations: int

    def __post_init__(self):
        if self.error_estimate < 0:
            raise ValueError("error_estimate must be >= 0")
        if self.evaluations < 1:
            raise ValueError("evaluations must be >= 1")


def _pairwise_sum(values, lo, hi):
    # deterministic pairwise reduction by index; bit-stable regardless of
    # how node evaluations were scheduled
    width = hi - lo
    if width == 1:
        return values[lo]
    if width == 2:
        return values[lo] + values[lo + 1]
    mid = lo + width // 2
    return _pairwise_sum(values, lo, mid) + _pairwise_sum(values, mid, hi)


def _mpfr_to_mpf(x, bits):
    man, exp = x.as_mantissa_exp()
    with working_precision(bits):
        return +mpmath.ldexp(mpf(int(man)), int(exp))


def _to_mpfr(x):
    """Exact conversion to gmpy2.mpfr (context precision permitting).

    Going through str() would round to the *global* mpmath display
    precision, which silently truncates high-precision inputs.
    """
    if isinstance(x, mpf):
        sign, man, exp, _ = x._mpf_
        value = gmpy2.mul_2exp(mpfr(int(man)), exp) if exp >= 0 \
            else gmpy2.div_2exp(mpfr(int(man)), -exp)
        return -value if sign else value
    return mpfr(x)


def _trapezoid_periodic(node, cfg: QuadratureConfig, bits: int,
                        initial_nodes: int = 64, use_symmetry: bool = True):
    """(1/2pi) * integral of ``node(theta)`` over one period of theta.

    Uniform nodes, count doubled until two successive results agree within
    tolerance; the last inter-level difference is the error estimate.  With
    ``use_symmetry`` the integrand is assumed conjugate-even in theta, so
    only [0, pi] is evaluated and the imaginary part cancels identically;
    convergence checks start only once the requested initial resolution is
    reached, so coarse levels cannot fake agreement.
    """
    target_m = 1 << max(2, int(initial_nodes - 1).bit_length())
    abs_tol = _to_mpfr(cfg.abs_tolerance)
    rel_tol = _to_mpfr(cfg.rel_tolerance)
    pi_val = gmpy2.const_pi()
    evals = 2

    if use_symmetry:
        # f(0) and f(pi) are real for conjugate-even integrands
        running = node(mpfr(0)).real + node(pi_val).real
    else:
        running = node(mpfr(0)) + node(pi_val)
    level_m = 2
    prev = None
    while True:
        # refine level_m -> 2*level_m: new nodes at pi*(2j+1)/level_m
        if use_symmetry:
            new = [node(pi_val * (2 * j + 1) / level_m).real
                   for j in range(level_m // 2)]
            weight = 2
        else:
            new = [node(pi_val * (2 * j + 1) / level_m)
                   for j in range(level_m)]
            weight = 1
        evals += len(new)
        if new:
            running += weight * _pairwise_sum(new, 0, len(new))
        level_m *= 2
        current = running / level_m
        if level_m >= target_m:
            if prev is not None:
                diff = abs(current - prev)
                if diff <= max(abs_tol, rel_tol * abs(current)):
                    if use_symmetry:
                        return (_mpfr_to_mpf(current, bits), mpf(0),
                                _mpfr_to_mpf(diff, bits), evals)
                    return (_mpfr_to_mpf(current.real, bits),
                            _mpfr_to_mpf(current.imag, bits),
                            _mpfr_to_mpf(diff, bits), evals)
            if level_m >= (1 << cfg.max_subdivisions):
                raise QuadratureError(
                    f"trapezoid rule did not converge by {level_m} nodes",
                    evaluations=evals)
            prev = current


def _next_pow2(x: float) -> int:
    return 1 << max(2, int(math.ceil(max(x, 4))) - 1).bit_length()


def default_partition_truncation(n: int, cfg: QuadratureConfig = None) -> int:
    """Product truncation index for the circle integrand at the saddle radius.

    Chosen so the discarded factors shift the product by less than both the
    configured absolute tolerance and a safe fraction of 1/p(n), which is
    what integer certification needs.
    """
    cfg = cfg or QuadratureConfig()
    eps = math.pi / math.sqrt(6 * n)
    ln_p = float(hardy_ramanujan_estimate(n, precision_bits=64))
    target = min(float(mpmath.log(cfg.abs_tolerance)), -(ln_p + 8))
    k = (-target + math.log(1.0 / (1.0 - math.exp(-eps)))) / eps
    return int(math.ceil(k)) + 1


def partition_cauchy_integral(n: int, K_trunc: int, cfg: QuadratureConfig = None,
                              precision_bits=None) -> IntegralResult:
    """p(n) as r^-n times the circle average of the truncated Euler product.

    The trapezoid rule on uniform nodes is spectrally accurate here because
    the integrand is analytic and periodic.  Factors with r^k below the
    rounding scale are not multiplied one by one: their joint contribution
    is the exponential of two geometric sums (second-order log expansion),
    which keeps the per-node cost at a few hundred multiplications.

    Raises CertificationError when the combined quadrature-plus-truncation
    error estimate reaches 0.5, i.e. when rounding cannot be certified.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cfg = cfg or QuadratureConfig()
    ln_p = float(hardy_ramanujan_estimate(n, precision_bits=64))
    bits = max(resolve_bits(precision_bits), int(ln_p / math.log(2)) + 80)
    reg = PartitionRegime.for_size(n, precision_bits=bits)
    eps = float(reg.eps)
    r_float = math.exp(-eps)
    if not r_float ** K_trunc / (1.0 - r_float) < float(cfg.abs_tolerance):
        raise ValueError("K_trunc leaves a product tail above abs_tolerance")

    # explicit factors while r^k is above 2^-t1; beyond that the cubic term
    # of the log expansion is already far below the certification target
    goal_bits = int(ln_p / math.log(2)) + 24
    t1 = (goal_bits + 8) * math.log(2) / 3.0
    k1 = min(K_trunc, int(math.ceil(t1 / eps)) + 1)

    # the engine sees the integral before the r^-n rescaling, so the
    # absolute stopping tolerance must shrink by the same factor
    with working_precision(bits):
        engine_cfg = QuadratureConfig(
            max_subdivisions=cfg.max_subdivisions,
            abs_tolerance=+(cfg.abs_tolerance * mpmath.exp(-mpf(n) * reg.eps)),
            rel_tolerance=cfg.rel_tolerance)

    with gmpy2.local_context(gmpy2.context(), precision=bits):
        r = gmpy2.exp(-_to_mpfr(reg.eps))
        one = mpc(1)

        def node(theta):
            w = mpc(gmpy2.cos(theta), gmpy2.sin(theta)) * r
            u = w
            prod = one
            for _ in range(k1):
                prod *= one - u
                u *= w
            if K_trunc > k1:
                # u == w^(k1+1); tails of ln(1-w^k) to second order
                s1 = u * (1 - w ** (K_trunc - k1)) / (one - w)
                w2 = w * w
                s2 = (u * u) * (1 - w2 ** (K_trunc - k1)) / (one - w2)
                prod *= gmpy2.exp(-s1 - s2 / 2)
            nt = n * theta
            return mpc(gmpy2.cos(nt), -gmpy2.sin(nt)) / prod

        initial = _next_pow2(max(64.0, 4.0 / float(reg.eta)))
        value, imag, quad_err, evals = _trapezoid_periodic(
            node, engine_cfg, bits, initial_nodes=initial)

    with working_precision(bits):
        scale = mpmath.exp(mpf(n) * reg.eps)  # r^-n
        value = +(value * scale)
        quad_err = +(quad_err * scale)
        trunc_err = +(abs(value) * (reg.r ** K_trunc) / (1 - reg.r))
        total_err = +(quad_err + trunc_err)
    result = IntegralResult(value=value, imag=imag, error_estimate=total_err,
                            evaluations=evals)
    if not total_err < mpf("0.5"):
        raise CertificationError(
            f"cannot certify p({n}): error estimate {total_err} >= 0.5")
    return result


def partition_count_cauchy(n: int, cfg: QuadratureConfig = None,
                           precision_bits=None) -> int:
    """Integer p(n) recovered from the contour integral, certified < 0.5 off."""
    ln_p = float(hardy_ramanujan_estimate(n, precision_bits=64))
    if cfg is None:
        cfg = QuadratureConfig(max_subdivisions=24,
                               abs_tolerance=mpf("0.125"),
                               rel_tolerance=mpf("0.125") * mpmath.exp(-ln_p))
    k_trunc = default_partition_truncation(n, cfg)
    result = partition_cauchy_integral(n, k_trunc, cfg, precision_bits)
    # round under enough precision to hold the integer exactly
    with working_precision(int(ln_p / math.log(2)) + 80):
        return int(mpmath.nint(result.value))


def binomial_theta_integral(n: int, tau, cfg: QuadratureConfig = None,
                            precision_bits=None) -> IntegralResult:
    """Circle average of exp(-in(theta - tau sin theta) - 2n tau sin^2(theta/2)).

    For tau away from 1 the result is exponentially smaller than the
    integrand's peak, so the working precision is raised by the large
    deviation allowance n(tau - 1 - ln tau) to survive the cancellation.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cfg = cfg or QuadratureConfig()
    tau_f = float(tau)
    if not tau_f > 0:
        raise ValueError("tau must be > 0")
    cancel_nats = n * (tau_f - 1 - math.log(tau_f))
    bits = resolve_bits(precision_bits) + max(0, int(cancel_nats / math.log(2))) + 32

    with gmpy2.local_context(gmpy2.context(), precision=bits):
        tau_r = _to_mpfr(tau)
        n_r = mpfr(n)

        def node(theta):
            half = gmpy2.sin(theta / 2)
            re_part = -2 * n_r * tau_r * half * half
            im_part = -n_r * (theta - tau_r * gmpy2.sin(theta))
            return gmpy2.exp(mpc(re_part, im_part))

        initial = _next_pow2(max(64.0, 2.0 * math.sqrt(n * tau_f),
                                 1.2 * n * abs(tau_f - 1.0)))
        value, imag, err, evals = _trapezoid_periodic(
            node, cfg, bits, initial_nodes=initial)
    return IntegralResult(value=value, imag=imag, error_estimate=err,
                          evaluations=evals)


def binomial_inner_integral_exact_check(n: int, t, r, cfg: QuadratureConfig = None,
                                        precision_bits=None) -> IntegralResult:
    """Circle average of exp(-in theta) exp(t r e^{i theta}) = (tr)^n / n!.

    An exact coefficient identity, so the quadrature must land within its
    own error estimate of the closed form; runs the engine without the
    symmetry shortcut so the imaginary part is measured, not assumed.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    cfg = cfg or QuadratureConfig()
    t_f, r_f = float(t), float(r)
    if not t_f > 0:
        raise ValueError("t must be > 0")
    if not 0 < r_f < 1:
        raise ValueError("r must lie in (0, 1)")
    tr = t_f * r_f
    cancel_nats = tr - (n * math.log(tr) - math.lgamma(n + 1)) if n else tr
    bits = resolve_bits(precision_bits) + max(0, int(cancel_nats / math.log(2))) + 32

    with gmpy2.local_context(gmpy2.context(), precision=bits):
        tr_r = _to_mpfr(t) * _to_mpfr(r)

        def node(theta):
            return gmpy2.exp(mpc(tr_r * gmpy2.cos(theta),
                                 tr_r * gmpy2.sin(theta) - n * theta))

        initial = _next_pow2(max(64.0, 2.0 * n + 2, 6.0 * tr))
        value, imag, err, evals = _trapezoid_periodic(
            node, cfg, bits, initial_nodes=initial, use_symmetry=False)
    return IntegralResult(value=value, imag=imag, error_estimate=err,
                          evaluations=evals)


def binomial_tau_integral(n: int, s, delta, cfg: QuadratureConfig = None,
                          precision_bits=None) -> IntegralResult:
    """Outer radial integral of the binomial saddle representation:

        integral_{n^-delta}^{inf} e^{-s(tau-1)} tau^{s-1}
                                  e^{n(ln tau + 1 - tau)} / sqrt(2 pi n) dtau,

    which approaches 1/n.  Adaptive (tanh-sinh) quadrature on a split
    interval; the upper limit is truncated where the integrand falls below
    the absolute tolerance.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    cfg = cfg or QuadratureConfig()
    s_f, delta_f = float(s), float(delta)
    if not s_f > 0:
        raise ValueError("s must be > 0")
    if not 0 < delta_f < 1.0 / 3:
        raise ValueError("delta must lie in (0, 1/3)")
    bits = resolve_bits(precision_bits)
    evals = [0]

    with working_precision(bits):
        lo = mpf(n) ** (-mpf(delta))
        s_val = mpf(s)
        n_val = mpf(n)
        norm = mpmath.sqrt(2 * mpmath.pi * n_val)
        log_floor = mpmath.log(cfg.abs_tolerance * norm)

        def log_integrand(tau):
            return (-s_val * (tau - 1) + (s_val - 1) * mpmath.log(tau)
                    + n_val * (mpmath.log(tau) + 1 - tau))

        hi = mpf(2)
        while log_integrand(hi) > log_floor:
            hi *= mpf("1.5")

        def integrand(tau):
            evals[0] += 1
            return mpmath.exp(log_integrand(tau)) / norm

        width = min(mpf("0.5"), 8 / mpmath.sqrt(n_val))
        points = [lo]
        if lo < 1 - width:
            points.append(1 - width)
        points.extend([mpf(1), 1 + width, hi])
        maxdeg = min(10, max(6, cfg.max_subdivisions // 2))
        value, err = mpmath.quad(integrand, points, error=True, maxdegree=maxdeg)
        value, err = +value, +mpf(err)
        if not err <= max(cfg.abs_tolerance, cfg.rel_tolerance * abs(value)):
            raise QuadratureError(
                f"tau integral error estimate {err} above tolerance",
                evaluations=evals[0])
    return IntegralResult(value=value, imag=mpf(0), error_estimate=err,
                          evaluations=evals[0])


def em_log_product_sum(eps, precision_bits=None) -> mpf:
    """-sum_{k>=1} ln(1 - e^(-eps k)), truncated with a certified tail.

    The truncation index K satisfies e^(-eps K)/(eps (1 - e^(-eps K))) <
    2^(-precision_bits/2), a geometric bound on the discarded log terms.
    Equals ln of the saddle prefactor product at radius e^-eps.
    """
    bits = resolve_bits(precision_bits)
    eps_f = float(eps)
    if not 0 < eps_f < 1:
        raise ValueError("eps must lie in (0, 1)")
    target = 2.0 ** (-bits / 2)

    def tail(k):
        e = math.exp(-eps_f * k)
        return e / (eps_f * (1.0 - e))

    k_trunc = max(4, int((0.5 * bits * math.log(2) - math.log(eps_f)) / eps_f))
    while tail(k_trunc) >= target:
        k_trunc += max(1, k_trunc // 8)

    with working_precision(bits + 16):
        decay = mpmath.exp(-mpf(eps))
        power = mpf(1)
        terms = []
        for _ in range(k_trunc):
            power *= decay
            terms.append(-mpmath.log1p(-power))
        acc = _pairwise_sum(terms, 0, len(terms))
    with working_precision(bits):
        return +acc


def em_mean_sum(r, eps, precision_bits=None) -> mpf:
    """sum_{k>=0} r e^(-k eps) / (1 - r e^(-k eps)), certified truncation.

    The Euler-Maclaurin prediction is -ln(1-r)/eps + r/(2(1-r)) as eps -> 0.
    """
    bits = resolve_bits(precision_bits)
    r_f, eps_f = float(r), float(eps)
    if not 0 < r_f < 1:
        raise ValueError("r must lie in (0, 1)")
    if not eps_f > 0:
        raise ValueError("eps must be > 0")
    target = 2.0 ** (-bits / 2)
    # terms <= r e^(-k eps)/(1-r); geometric tail
    k_trunc = max(4, int((0.5 * bits * math.log(2)
                          + math.log(r_f / ((1.0 - r_f) * (1.0 - math.exp(-eps_f)))))
                         / eps_f) + 1)

    with working_precision(bits + 16):
        r_val = mpf(r)
        decay = mpmath.exp(-mpf(eps))
        power = mpf(1)  # e^(-k eps) starting at k = 0
        terms = []
        for _ in range(k_trunc + 1):
            x = r_val * power
            terms.append(x / (1 - x))
            power *= decay
        acc = _pairwise_sum(terms, 0, len(terms))
    with working_precision(bits):
        return +acc


def weighted_bose_sum(p: int, reg: PartitionRegime, precision_bits=None) -> mpf:
    """sum_{k>=1} k^p r^k / (1 - r^k) at the saddle radius of ``reg``.

    For p = 1 this is the mean size of the random partition (~ n); for
    p = 2 it is the curvature sum whose normalized value eta^2 * sum -> 1.
    """
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    bits = resolve_bits(precision_bits)
    eps_f = float(reg.eps)
    target = 2.0 ** (-bits / 2)
    k_trunc = max(8, int(0.5 * bits * math.log(2) / eps_f))
    while (k_trunc ** p) * math.exp(-eps_f * k_trunc) / (1.0 - math.exp(-eps_f)) >= target:
        k_trunc += max(1, k_trunc // 8)

    with working_precision(bits + 16):
        r_val = mpf(reg.r)
        power = mpf(1)
        terms = []
        for k in range(1, k_trunc + 1):
            power *= r_val
            terms.append((k ** p) * power / (1 - power))
        acc = _pairwise_sum(terms, 0, len(terms))
    with working_precision(bits):
        return +acc


def minor_arc_mean_sum(reg: PartitionRegime, t, precision_bits=None) -> mpf:
    """Exact truncated 2 sum_k r^k/(1-r^k) sin^2(t eps k / 2).

    The mean-field version of the minor-arc exponent (weights replaced by
    their unit means); oracle for the integral route below.
    """
    bits = resolve_bits(precision_bits)
    eps_f = float(reg.eps)
    target = 2.0 ** (-bits / 2)
    k_trunc = max(8, int(0.5 * bits * math.log(2) / eps_f))
    while math.exp(-eps_f * k_trunc) / (1.0 - math.exp(-eps_f)) >= target:
        k_trunc += max(1, k_trunc // 8)

    with working_precision(bits + 16):
        r_val = mpf(reg.r)
        half_angle = mpf(t) * mpf(reg.eps) / 2
        power = mpf(1)
        terms = []
        for k in range(1, k_trunc + 1):
            power *= r_val
            terms.append(power / (1 - power) * mpmath.sin(half_angle * k) ** 2)
        acc = 2 * _pairwise_sum(terms, 0, len(terms))
    with working_precision(bits):
        return +acc


def minor_arc_bound(reg: PartitionRegime, t, cfg: QuadratureConfig = None,
                    precision_bits=None) -> mpf:
    """Minor-arc suppression exponent 2 eps^-1 * integral of
    sin^2(t x/2)/(e^x - 1) on (0, inf), by chunked adaptive quadrature.

    The integrand oscillates with period 2 pi / t, so it is integrated over
    half-period chunks (tanh-sinh within each) until the exponential decay
    makes further chunks irrelevant.
    """
    cfg = cfg or QuadratureConfig()
    t_f = float(t)
    if not t_f > 0:
        raise ValueError("t must be > 0")
    bits = resolve_bits(precision_bits)
    evals = [0]
    with working_precision(bits):
        t_val = mpf(t)
        stop_tol = min(mpf(cfg.abs_tolerance), mpf(2) ** (-bits // 2))

        def integrand(x):
            evals[0] += 1
            if x == 0:
                return mpf(0)
            return mpmath.sin(t_val * x / 2) ** 2 / mpmath.expm1(x)

        chunk = min(mpmath.pi / t_val, mpf(2))
        x_max = -mpmath.log(stop_tol) + 5
        total = mpf(0)
        err_total = mpf(0)
        lo = mpf(0)
        while lo < x_max:
            hi = lo + chunk
            val, err = mpmath.quad(integrand, [lo, hi], error=True)
            total += val
            err_total += mpf(err)
            lo = hi
        # discarded tail: integrand <= 1/(e^x - 1) ~ e^-x beyond x_max
        err_total += 2 * mpmath.exp(-x_max)
        value = +(2 / reg.eps * total)
        err_scaled = +(2 / reg.eps * err_total)
        if not err_scaled <= max(cfg.abs_tolerance, cfg.rel_tolerance * abs(value)):
            raise QuadratureError(
                f"minor-arc quadrature error {err_scaled} above tolerance",
                evaluations=evals[0])
    return value
