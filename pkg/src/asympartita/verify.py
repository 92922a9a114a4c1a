"""Acceptance diagnostics: every gate the artifact must clear, by name.

Each criterion function returns Diagnostic records with the measured value
and the tolerance it was held to.  ``run_criteria`` executes a selection in
order; the CLI's ``verify`` verb and the acceptance test suite both call
into this module so there is exactly one definition of pass/fail.

One diagnostic is expected to fail by design: ``sampler-mean-size`` holds
the random-partition mean to within 1% of n at n = 400, but the sampled
measure's true mean at the saddle radius is n - 1/(2 eps) + O(1), which is
1.9% below n at that size.  The companion ``sampler-mean-vs-model``
diagnostic shows the sampler agrees with its own model mean.
"""

import math

import mpmath
import numpy as np
from mpmath import mpf

from . import asymptotics, exact_core, prob_model, saddle_numeric, special_fn
from .asymptotics import PartitionRegime, QRegime, ReportKind
from .precision import working_precision
from .reporting import Diagnostic

DEFAULT_SEED = 42
P100 = 190569292


def criterion_exact_oracles(seed) -> list:
    table = exact_core.partition_count_through(100)
    mismatches = [n for n in range(61)
                  if table[n] != exact_core.partition_count_bruteforce(n)]
    return [
        Diagnostic.build("exact-oracles-enumeration", not mismatches,
                         f"{len(mismatches)} mismatches for n <= 60", "0 mismatches"),
        Diagnostic.build("exact-oracles-p100", table[100] == P100,
                         table[100], P100),
    ]


def criterion_cauchy_integral(seed) -> list:
    table = exact_core.partition_count_through(500)
    mismatches = []
    for n in [*range(1, 51), 100, 200, 500]:
        if saddle_numeric.partition_count_cauchy(n) != table[n]:
            mismatches.append(n)
    return [Diagnostic.build(
        "cauchy-integral-roundtrip", not mismatches,
        f"{len(mismatches)} uncertified of 53", "all n in 1..50,100,200,500",
        detail=f"mismatches: {mismatches}" if mismatches else "")]


def criterion_hardy_ramanujan(seed) -> list:
    ns = [10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5]
    rows = asymptotics.ratio_report(ReportKind.PARTITION, ns)
    ratios = [float(r.ratio) for r in rows]
    decreasing = all(b < a for a, b in zip(ratios, ratios[1:]))
    above_one = all(r > 1 for r in ratios)
    devs = [r - 1.0 for r in ratios]
    slope = np.polyfit(np.log(ns), np.log(devs), 1)[0] if above_one else float("nan")
    return [
        Diagnostic.build("hardy-ramanujan-monotone", decreasing and above_one,
                         "ratios " + ", ".join(f"{r:.6f}" for r in ratios),
                         "strictly decreasing toward 1"),
        Diagnostic.build("hardy-ramanujan-slope", -0.65 <= slope <= -0.35,
                         slope, "[-0.65, -0.35]"),
    ]


def criterion_saddle_prefactor(seed) -> list:
    eps_list = [0.1, 0.05, 0.02, 0.01, 0.005]
    residuals = []
    with working_precision(256):
        for eps in eps_list:
            value = saddle_numeric.em_log_product_sum(eps)
            pred = mpmath.pi ** 2 / (6 * mpf(eps)) + mpmath.log(mpf(eps) / (2 * mpmath.pi)) / 2
            residuals.append(abs(float(value - pred)))
    shrinking = all(b < a for a, b in zip(residuals, residuals[1:]))
    return [
        Diagnostic.build("saddle-prefactor-trend", shrinking,
                         ", ".join(f"{r:.2e}" for r in residuals),
                         "|residual| decreasing over eps = 0.1 .. 0.005"),
        Diagnostic.build("saddle-prefactor-final", residuals[-1] < 0.02,
                         residuals[-1], 0.02),
    ]


def criterion_stirling(seed) -> list:
    devs = {}
    with working_precision(256):
        for n in (100, 200):
            exact_log = mpmath.log(mpf(exact_core.factorial(n)))
            devs[n] = abs(float(mpmath.exp(exact_log - asymptotics.stirling_estimate(n)) - 1))
    return [
        Diagnostic.build("stirling-n100", devs[100] < 1e-3, devs[100], 1e-3),
        Diagnostic.build("stirling-decreasing", devs[200] < devs[100],
                         devs[200], f"< {devs[100]:.3e}"),
    ]


def criterion_gamma_limit(seed) -> list:
    with working_precision(256):
        err_half = abs(float(asymptotics.gamma_limit_estimate(0.5, 10 ** 6)
                             - mpmath.sqrt(mpmath.pi)))
        exact_ones = all(asymptotics.gamma_limit_estimate(1, n) == 1
                         for n in (1, 7, 100, 10 ** 4))
    return [
        Diagnostic.build("gamma-limit-half", err_half < 1e-5, err_half, 1e-5),
        Diagnostic.build("gamma-limit-one", exact_ones, "1 exactly" if exact_ones
                         else "deviates", "estimate(1, n) == 1 for all n"),
    ]


def criterion_series_constants(seed) -> list:
    with working_precision(256):
        sine = special_fn.sine_product_log_sum(10 ** 6)
        err_sine = abs(float(sine.value - mpmath.log(mpmath.pi / 2)))
        stirling = special_fn.stirling_series_sum(10 ** 4)
        err_st = abs(float(stirling.value - (1 - mpmath.log(2)) / 2))
    return [
        Diagnostic.build("series-sine-product", err_sine < 5e-7, err_sine, 5e-7),
        Diagnostic.build("series-stirling-correction", err_st < 1e-5, err_st, 1e-5),
    ]


def criterion_dilog_bose(seed) -> list:
    out = []
    with working_precision(256):
        err1 = abs(special_fn.dilog(1) - mpmath.pi ** 2 / 6)
        err2 = abs(special_fn.dilog(-1) + mpmath.pi ** 2 / 12)
        out.append(Diagnostic.build("dilog-at-one", err1 < mpf("1e-12"),
                                    float(err1), 1e-12))
        out.append(Diagnostic.build("dilog-at-minus-one", err2 < mpf("1e-12"),
                                    float(err2), 1e-12))
        worst = mpf(0)
        for p in (1, 2):
            quad_val, _ = special_fn.bose_integral_quadrature(p, precision_bits=256)
            worst = max(worst, abs(quad_val - special_fn.bose_integral(p, check=False)))
        quad_val, _ = special_fn.bose_square_integral_quadrature(precision_bits=256)
        worst = max(worst, abs(quad_val - special_fn.bose_square_integral(check=False)))
        out.append(Diagnostic.build("bose-closed-vs-quadrature",
                                    worst < mpf("1e-15"), float(worst), 1e-15))
    return out


def criterion_hayman_lemmas(seed) -> list:
    out = []
    with working_precision(256):
        dev = {}
        for n in (10 ** 4, 2 * 10 ** 4):
            res = saddle_numeric.binomial_theta_integral(n, 1.0)
            dev[n] = abs(float(res.value * mpmath.sqrt(2 * mpmath.pi * n) - 1))
        out.append(Diagnostic.build("hayman-theta-gaussian", dev[10 ** 4] < 0.05,
                                    dev[10 ** 4], 0.05))
        out.append(Diagnostic.build("hayman-theta-shrinks",
                                    dev[2 * 10 ** 4] < dev[10 ** 4],
                                    dev[2 * 10 ** 4], f"< {dev[10 ** 4]:.3e}"))
        worst_tau = 0.0
        for s in (0.5, 1.0, 2.0):
            res = saddle_numeric.binomial_tau_integral(10 ** 4, s, 0.3)
            worst_tau = max(worst_tau, abs(float(10 ** 4 * res.value) - 1))
        out.append(Diagnostic.build("hayman-tau-limit", worst_tau < 0.05,
                                    worst_tau, 0.05))

        gen = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence(entropy=seed, spawn_key=(90,))))
        worst_rel = mpf(0)
        failures = 0
        for _ in range(20):
            n = int(gen.integers(0, 31))
            t = float(gen.uniform(0.2, 15.0))
            r = float(gen.uniform(0.05, 0.95))
            res = saddle_numeric.binomial_inner_integral_exact_check(n, t, r)
            exact = (mpf(t) * mpf(r)) ** n / mpmath.factorial(n)
            diff = abs(res.value - exact)
            # the level-agreement estimate can collapse below arithmetic
            # rounding once the spectrum is fully resolved
            allowed = max(res.error_estimate, abs(exact) * mpf(2) ** -180)
            if diff > allowed:
                failures += 1
            if allowed > 0:
                worst_rel = max(worst_rel, diff / allowed)
        out.append(Diagnostic.build("hayman-inner-identity", failures == 0,
                                    f"worst diff/allowed = {mpmath.nstr(worst_rel, 3)}",
                                    "within quadrature error on 20 random triples"))
    return out


def criterion_q_asymptotics(seed) -> list:
    out = []
    with working_precision(256):
        devs = {}
        for eps in (0.01, 0.005):
            est = asymptotics.q_infinite_product_estimate(0.5, eps)
            exact = exact_core.q_pochhammer(0.5, mpmath.exp(-mpf(eps)), None)
            devs[eps] = abs(float(est / exact - 1))
        out.append(Diagnostic.build("q-product-estimate", devs[0.01] < 0.01,
                                    devs[0.01], 0.01))
        out.append(Diagnostic.build("q-product-error-halves",
                                    devs[0.005] < 0.65 * devs[0.01],
                                    devs[0.005], f"< {0.65 * devs[0.01]:.3e}"))

        for label, estimator, exact_log_fn in (
            ("q-inverse-pochhammer",
             asymptotics.q_inverse_pochhammer_estimate,
             lambda reg: -mpmath.log(exact_core.q_pochhammer(reg.q, reg.q, reg.n))),
            ("q-stirling",
             asymptotics.q_stirling_estimate,
             lambda reg: mpmath.log(exact_core.q_factorial(reg.n, reg.q))),
        ):
            dev_n = {}
            for n in (10 ** 3, 10 ** 4):
                reg = QRegime.for_params(1.0, n)
                dev_n[n] = abs(float(mpmath.exp(estimator(reg) - exact_log_fn(reg)) - 1))
            out.append(Diagnostic.build(f"{label}-estimate", dev_n[10 ** 3] < 0.05,
                                        dev_n[10 ** 3], 0.05))
            out.append(Diagnostic.build(f"{label}-improves",
                                        dev_n[10 ** 4] < dev_n[10 ** 3],
                                        dev_n[10 ** 4], f"< {dev_n[10 ** 3]:.3e}"))
    return out


def _variance_band(stats, target):
    # standard error of the sample variance from the central fourth moment
    se = math.sqrt(max(stats.fourth_moment - stats.variance ** 2, 0.0)
                   / stats.count)
    return abs(stats.variance - target), 4 * se


def criterion_probabilistic(seed) -> list:
    out = []
    sid = 0

    for a in (0.0, 0.3, 0.6):
        for m in (0, 1, 2):
            sid += 1
            stats = prob_model.tilting_check(
                a, m, 10 ** 5, prob_model.RngStream(seed=seed, stream_id=sid))
            band = 4 * stats.standard_error
            out.append(Diagnostic.build(
                f"tilting-a{a}-m{m}", abs(stats.mean) <= band,
                stats.mean, f"|diff| <= {band:.3e}"))

    reg = PartitionRegime.for_size(10 ** 4)
    stats = prob_model.clt_weighted_sum_check(
        reg, 10 ** 5, prob_model.RngStream(seed=seed, stream_id=101))
    target = float(special_fn.bose_square_integral())
    diff, band = _variance_band(stats, target)
    out.append(Diagnostic.build("clt-weighted-variance", diff <= band,
                                stats.variance, f"{target:.6f} +- {band:.2e}"))
    kurt_ratio = stats.fourth_moment / (3 * stats.variance ** 2)
    out.append(Diagnostic.build("clt-weighted-kurtosis",
                                abs(kurt_ratio - 1) < 0.05, kurt_ratio,
                                "m4 / (3 var^2) within 5% of 1"))

    qreg = QRegime.for_params(1.0, 10 ** 4)
    stats = prob_model.q_clt_variance_check(
        qreg, 10 ** 4, prob_model.RngStream(seed=seed, stream_id=102))
    diff, band = _variance_band(stats, math.e - 2)
    out.append(Diagnostic.build("q-clt-variance", diff <= band,
                                stats.variance, f"{math.e - 2:.6f} +- {band:.2e}"))

    reg400 = PartitionRegime.for_size(400)
    k400 = prob_model.default_sampler_truncation(reg400)
    sizes = prob_model.sample_partition_sizes(
        reg400, k400, prob_model.RngStream(seed=seed, stream_id=103), 10 ** 5)
    size_stats = prob_model.stats_from_values(sizes)
    rel_dev = abs(size_stats.mean - 400) / 400
    model_mean = float(sum(k * float(reg400.r) ** k / (1 - float(reg400.r) ** k)
                           for k in range(1, k400 + 1)))
    out.append(Diagnostic.build(
        "sampler-mean-size", rel_dev < 0.01, rel_dev, 0.01,
        detail=(f"empirical mean {size_stats.mean:.2f} vs n = 400; the sampled "
                f"measure's own mean is {model_mean:.2f} = n - 1/(2 eps) + O(1), "
                "so the 1% band around n cannot be met at this n")))
    model_dev = abs(size_stats.mean - model_mean)
    out.append(Diagnostic.build(
        "sampler-mean-vs-model", model_dev <= 4 * size_stats.standard_error,
        size_stats.mean, f"{model_mean:.3f} +- {4 * size_stats.standard_error:.3f}"))

    reg30 = PartitionRegime.for_size(30)
    k30 = max(prob_model.default_sampler_truncation(reg30), 30)
    sizes = prob_model.sample_partition_sizes(
        reg30, k30, prob_model.RngStream(seed=seed, stream_id=104), 10 ** 6)
    pmass = float(prob_model.partition_point_mass(
        reg30, k30, 30, exact_core.partition_count(30)))
    emp = float(np.mean(sizes == 30))
    se = math.sqrt(pmass * (1 - pmass) / 10 ** 6)
    out.append(Diagnostic.build("sampler-point-mass",
                                abs(emp - pmass) <= 4 * se, emp,
                                f"{pmass:.6f} +- {4 * se:.2e}"))
    return out


CRITERIA = {
    "exact-oracles": criterion_exact_oracles,
    "cauchy-integral": criterion_cauchy_integral,
    "hardy-ramanujan": criterion_hardy_ramanujan,
    "saddle-prefactor": criterion_saddle_prefactor,
    "stirling": criterion_stirling,
    "gamma-limit": criterion_gamma_limit,
    "series-constants": criterion_series_constants,
    "dilog-bose": criterion_dilog_bose,
    "hayman-lemmas": criterion_hayman_lemmas,
    "q-asymptotics": criterion_q_asymptotics,
    "probabilistic": criterion_probabilistic,
}

# diagnostics whose failure is the documented, analyzed outcome rather than
# a regression (see the module docstring)
EXPECTED_FAILURES = frozenset({"sampler-mean-size"})


def run_criteria(names=None, seed: int = DEFAULT_SEED) -> list:
    names = list(CRITERIA) if names is None else list(names)
    diagnostics = []
    for name in names:
        if name not in CRITERIA:
            raise ValueError(f"unknown criterion {name!r}; "
                             f"choose from {', '.join(CRITERIA)}")
        diagnostics.extend(CRITERIA[name](seed))
    return diagnostics
