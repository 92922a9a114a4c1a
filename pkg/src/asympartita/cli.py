"""Command-line front end.

Verbs map one-to-one onto the library layers: ``exact`` (reference values),
``approx`` (closed-form estimates), ``ratio`` (exact-vs-estimate reports,
optionally rendered to a figure), ``saddle`` (quadrature and reference
sums), ``sample`` (seeded Monte Carlo checks) and ``verify`` (the named
acceptance diagnostics).  Reports go to stdout as a table, CSV or JSON;
exit status is 0 on all-pass, 1 when any diagnostic fails, 2 on usage
errors.
"""

import argparse
import math
import sys
from datetime import datetime, timezone

import mpmath
from mpmath import mpf

from . import __version__, asymptotics, exact_core, prob_model, saddle_numeric, \
    special_fn, verify
from .asymptotics import PartitionRegime, QRegime, ReportKind
from .precision import resolve_bits, working_precision
from .reporting import Diagnostic, Report

_RATIO_KINDS = {kind.value: kind for kind in ReportKind}


def _int_list(text: str):
    try:
        values = [int(part) for part in text.split(",") if part]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _log_str(x, digits=20) -> str:
    return mpmath.nstr(x, digits, strip_zeros=True)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="output_format", default="table",
                        choices=("table", "csv", "json"),
                        help="report format on stdout")
    common.add_argument("--precision-bits", type=int, default=None,
                        help="working precision in bits (default: "
                             "ASYMPARTITA_PRECISION_BITS or 256)")
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp for byte-reproducible output")

    parser = argparse.ArgumentParser(
        prog="asympartita",
        description="Exact, asymptotic, saddle-point and Monte Carlo "
                    "cross-validation of partition and q-series growth laws.")
    parser.add_argument("--version", action="version", version=__version__)
    verbs = parser.add_subparsers(dest="verb", required=True, metavar="verb")

    # -- exact ------------------------------------------------------------
    p_exact = verbs.add_parser("exact", help="exact reference values")
    sub = p_exact.add_subparsers(dest="subject", required=True)
    sp = sub.add_parser("partition", parents=[common])
    sp.add_argument("--ns", type=_int_list, required=True)
    sp.set_defaults(handler=_cmd_exact_partition)
    sp = sub.add_parser("factorial", parents=[common])
    sp.add_argument("--ns", type=_int_list, required=True)
    sp.set_defaults(handler=_cmd_exact_factorial)
    sp = sub.add_parser("qpochhammer", parents=[common])
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--q", type=float, required=True)
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--n", type=int)
    group.add_argument("--infinite", action="store_true")
    sp.set_defaults(handler=_cmd_exact_qpochhammer)
    sp = sub.add_parser("qfactorial", parents=[common])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--q", type=float, required=True)
    sp.set_defaults(handler=_cmd_exact_qfactorial)

    # -- approx -----------------------------------------------------------
    p_approx = verbs.add_parser("approx", help="closed-form estimates")
    sub = p_approx.add_subparsers(dest="subject", required=True)
    for name, handler in (("hardy-ramanujan", _cmd_approx_hr),
                          ("prefactor", _cmd_approx_prefactor),
                          ("stirling", _cmd_approx_stirling)):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--ns", type=_int_list, required=True)
        sp.set_defaults(handler=handler)
    sp = sub.add_parser("gamma", parents=[common])
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--ns", type=_int_list, required=True)
    sp.set_defaults(handler=_cmd_approx_gamma)
    sp = sub.add_parser("qproduct", parents=[common])
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.set_defaults(handler=_cmd_approx_qproduct)
    for name, handler in (("qpochhammer-inverse", _cmd_approx_qpoch_inverse),
                          ("qstirling", _cmd_approx_qstirling)):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--beta", type=float, required=True)
        sp.add_argument("--ns", type=_int_list, required=True)
        sp.set_defaults(handler=handler)

    # -- ratio ------------------------------------------------------------
    p_ratio = verbs.add_parser("ratio", parents=[common],
                               help="exact-vs-estimate convergence reports")
    p_ratio.add_argument("kind", choices=sorted(_RATIO_KINDS))
    p_ratio.add_argument("--ns", type=_int_list, required=True)
    p_ratio.add_argument("--s", type=float, default=None,
                         help="exponent for the gamma kind")
    p_ratio.add_argument("--beta", type=float, default=None,
                         help="rate for the q kinds")
    p_ratio.add_argument("--plot", default=None, metavar="FILE",
                         help="also render the convergence figure to FILE")
    p_ratio.set_defaults(handler=_cmd_ratio)

    # -- saddle -----------------------------------------------------------
    p_saddle = verbs.add_parser("saddle", help="contour quadrature and reference sums")
    sub = p_saddle.add_subparsers(dest="subject", required=True)
    sp = sub.add_parser("cauchy", parents=[common])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k-trunc", type=int, default=None)
    sp.set_defaults(handler=_cmd_saddle_cauchy)
    sp = sub.add_parser("theta", parents=[common])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--tau", type=float, required=True)
    sp.set_defaults(handler=_cmd_saddle_theta)
    sp = sub.add_parser("tau", parents=[common])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--delta", type=float, default=0.3)
    sp.set_defaults(handler=_cmd_saddle_tau)
    sp = sub.add_parser("inner", parents=[common])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.set_defaults(handler=_cmd_saddle_inner)
    sp = sub.add_parser("em-log", parents=[common])
    sp.add_argument("--eps", type=float, required=True)
    sp.set_defaults(handler=_cmd_saddle_em_log)
    sp = sub.add_parser("em-mean", parents=[common])
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.set_defaults(handler=_cmd_saddle_em_mean)
    sp = sub.add_parser("bose-sum", parents=[common])
    sp.add_argument("--p", type=int, required=True, choices=(1, 2))
    sp.add_argument("--n", type=int, required=True)
    sp.set_defaults(handler=_cmd_saddle_bose_sum)
    sp = sub.add_parser("minor-bound", parents=[common])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--t", type=float, required=True)
    sp.set_defaults(handler=_cmd_saddle_minor_bound)

    # -- sample -----------------------------------------------------------
    p_sample = verbs.add_parser("sample", help="seeded Monte Carlo checks")
    sub = p_sample.add_subparsers(dest="subject", required=True)

    def sample_parser(name):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--seed", type=int, required=True)
        sp.add_argument("--stream-id", type=int, default=0)
        return sp

    sp = sample_parser("exponentials")
    sp.add_argument("--count", type=int, required=True)
    sp.set_defaults(handler=_cmd_sample_exponentials)
    sp = sample_parser("partition")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--k-trunc", type=int, default=None)
    sp.set_defaults(handler=_cmd_sample_partition)
    sp = sample_parser("tilting")
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--samples", type=int, required=True)
    sp.set_defaults(handler=_cmd_sample_tilting)
    sp = sample_parser("clt")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, required=True)
    sp.set_defaults(handler=_cmd_sample_clt)
    sp = sample_parser("qclt")
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, required=True)
    sp.set_defaults(handler=_cmd_sample_qclt)
    sp = sample_parser("minor-arc")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--samples", type=int, required=True)
    sp.set_defaults(handler=_cmd_sample_minor_arc)

    # -- verify -----------------------------------------------------------
    p_verify = verbs.add_parser("verify", parents=[common],
                                help="named acceptance diagnostics")
    p_verify.add_argument("criteria", nargs="+",
                          metavar="criterion",
                          help="'all' or any of: " + ", ".join(verify.CRITERIA))
    p_verify.add_argument("--seed", type=int, default=verify.DEFAULT_SEED)
    p_verify.set_defaults(handler=_cmd_verify)

    return parser


# -- exact handlers --------------------------------------------------------

def _cmd_exact_partition(args, report, bits):
    table = exact_core.partition_count_through(max(args.ns))
    with working_precision(bits):
        for n in args.ns:
            report.add_row(n=n, p_n=table[n],
                           log_p_n=_log_str(mpmath.log(mpf(table[n]))) if n else "0")


def _cmd_exact_factorial(args, report, bits):
    with working_precision(bits):
        for n in args.ns:
            value = exact_core.factorial(n)
            report.add_row(n=n, factorial=value,
                           log_factorial=_log_str(mpmath.log(mpf(value))) if n else "0")


def _cmd_exact_qpochhammer(args, report, bits):
    n = None if args.infinite else args.n
    value = exact_core.q_pochhammer(args.a, args.q, n, precision_bits=bits)
    report.add_row(a=args.a, q=args.q, n="inf" if n is None else n,
                   value=_log_str(value))


def _cmd_exact_qfactorial(args, report, bits):
    value = exact_core.q_factorial(args.n, args.q, precision_bits=bits)
    report.add_row(n=args.n, q=args.q, value=_log_str(value))


# -- approx handlers --------------------------------------------------------

def _estimate_rows(report, ns, estimator, bits):
    with working_precision(bits):
        for n in ns:
            log_est = estimator(n)
            report.add_row(n=n, log_estimate=_log_str(log_est),
                           estimate=_log_str(mpmath.exp(log_est), 12))


def _cmd_approx_hr(args, report, bits):
    _estimate_rows(report, args.ns,
                   lambda n: asymptotics.hardy_ramanujan_estimate(n, bits), bits)


def _cmd_approx_prefactor(args, report, bits):
    _estimate_rows(report, args.ns,
                   lambda n: asymptotics.prefactor_estimate(n, bits), bits)


def _cmd_approx_stirling(args, report, bits):
    _estimate_rows(report, args.ns,
                   lambda n: asymptotics.stirling_estimate(n, bits), bits)


def _cmd_approx_gamma(args, report, bits):
    for n in args.ns:
        value = asymptotics.gamma_limit_estimate(args.s, n, bits)
        report.add_row(s=args.s, n=n, estimate=_log_str(value))


def _cmd_approx_qproduct(args, report, bits):
    value = asymptotics.q_infinite_product_estimate(args.a, args.eps, bits)
    report.add_row(a=args.a, eps=args.eps, estimate=_log_str(value))


def _cmd_approx_qpoch_inverse(args, report, bits):
    for n in args.ns:
        reg = QRegime.for_params(args.beta, n, bits)
        report.add_row(beta=args.beta, n=n,
                       log_estimate=_log_str(
                           asymptotics.q_inverse_pochhammer_estimate(reg, bits)))


def _cmd_approx_qstirling(args, report, bits):
    for n in args.ns:
        reg = QRegime.for_params(args.beta, n, bits)
        report.add_row(beta=args.beta, n=n,
                       log_estimate=_log_str(asymptotics.q_stirling_estimate(reg, bits)))


# -- ratio / saddle / sample handlers ---------------------------------------

def _cmd_ratio(args, report, bits):
    kind = _RATIO_KINDS[args.kind]
    rows = asymptotics.ratio_report(kind, args.ns, s=args.s, beta=args.beta,
                                    precision_bits=bits)
    for row in rows:
        report.add_row(n=row.n, exact_log=_log_str(row.exact_log),
                       approx_log=_log_str(row.approx_log),
                       ratio=_log_str(row.ratio))
    if args.plot:
        from .plotting import render_ratio_figure
        report.figure = render_ratio_figure(rows, f"{args.kind} estimate", args.plot)


def _cmd_saddle_cauchy(args, report, bits):
    n = args.n
    cfg = None
    if args.k_trunc is not None:
        result = saddle_numeric.partition_cauchy_integral(n, args.k_trunc,
                                                          precision_bits=bits)
    else:
        ln_p = float(asymptotics.hardy_ramanujan_estimate(n, 64))
        cfg = saddle_numeric.QuadratureConfig(
            abs_tolerance=mpf("0.125"),
            rel_tolerance=mpf("0.125") * mpmath.exp(-ln_p))
        k_trunc = saddle_numeric.default_partition_truncation(n, cfg)
        result = saddle_numeric.partition_cauchy_integral(n, k_trunc, cfg)
    with working_precision(bits):
        rounded = int(mpmath.nint(result.value))
    exact = exact_core.partition_count(n)
    report.add_row(n=n, value=_log_str(result.value, 30), rounded=rounded,
                   error_estimate=_log_str(result.error_estimate, 6),
                   evaluations=result.evaluations)
    report.diagnostics.append(Diagnostic.build(
        "cauchy-integer-recovery", rounded == exact, rounded, exact))


def _cmd_saddle_theta(args, report, bits):
    result = saddle_numeric.binomial_theta_integral(args.n, args.tau,
                                                    precision_bits=bits)
    with working_precision(bits):
        prediction = mpmath.exp(args.n * (mpmath.log(mpf(args.tau)) + 1 - mpf(args.tau))) \
            / mpmath.sqrt(2 * mpmath.pi * args.n)
    report.add_row(n=args.n, tau=args.tau, value=_log_str(result.value, 12),
                   gaussian_prediction=_log_str(prediction, 12),
                   error_estimate=_log_str(result.error_estimate, 6),
                   evaluations=result.evaluations)


def _cmd_saddle_tau(args, report, bits):
    result = saddle_numeric.binomial_tau_integral(args.n, args.s, args.delta,
                                                  precision_bits=bits)
    report.add_row(n=args.n, s=args.s, delta=args.delta,
                   value=_log_str(result.value, 12),
                   n_times_value=_log_str(args.n * result.value, 12),
                   evaluations=result.evaluations)


def _cmd_saddle_inner(args, report, bits):
    result = saddle_numeric.binomial_inner_integral_exact_check(
        args.n, args.t, args.r, precision_bits=bits)
    with working_precision(bits):
        exact = (mpf(args.t) * mpf(args.r)) ** args.n / mpmath.factorial(args.n)
        diff = abs(result.value - exact)
    report.add_row(n=args.n, t=args.t, r=args.r, value=_log_str(result.value, 12),
                   closed_form=_log_str(exact, 12), abs_diff=_log_str(diff, 6),
                   evaluations=result.evaluations)


def _cmd_saddle_em_log(args, report, bits):
    value = saddle_numeric.em_log_product_sum(args.eps, precision_bits=bits)
    with working_precision(bits):
        eps = mpf(args.eps)
        residual = value - mpmath.pi ** 2 / (6 * eps) - mpmath.log(eps / (2 * mpmath.pi)) / 2
    report.add_row(eps=args.eps, value=_log_str(value),
                   residual=_log_str(residual, 8))


def _cmd_saddle_em_mean(args, report, bits):
    value = saddle_numeric.em_mean_sum(args.r, args.eps, precision_bits=bits)
    with working_precision(bits):
        r = mpf(args.r)
        prediction = -mpmath.log1p(-r) / mpf(args.eps) + r / (2 * (1 - r))
    report.add_row(r=args.r, eps=args.eps, value=_log_str(value),
                   em_prediction=_log_str(prediction),
                   residual=_log_str(value - prediction, 8))


def _cmd_saddle_bose_sum(args, report, bits):
    reg = PartitionRegime.for_size(args.n, bits)
    value = saddle_numeric.weighted_bose_sum(args.p, reg, precision_bits=bits)
    with working_precision(bits):
        if args.p == 1:
            normalized = value / (mpmath.pi ** 2 / (6 * reg.eps ** 2))
        else:
            normalized = value * reg.eta ** 2
    report.add_row(p=args.p, n=args.n, value=_log_str(value),
                   normalized=_log_str(normalized, 12))


def _cmd_saddle_minor_bound(args, report, bits):
    reg = PartitionRegime.for_size(args.n, bits)
    value = saddle_numeric.minor_arc_bound(reg, args.t, precision_bits=bits)
    mean_sum = saddle_numeric.minor_arc_mean_sum(reg, args.t, precision_bits=bits)
    report.add_row(n=args.n, t=args.t, bound=_log_str(value, 12),
                   mean_field_sum=_log_str(mean_sum, 12))


def _cmd_sample_exponentials(args, report, bits):
    stream = prob_model.RngStream(seed=args.seed, stream_id=args.stream_id)
    stats = prob_model.stats_from_values(
        prob_model.sample_exponentials(stream, args.count))
    report.add_row(count=stats.count, mean=stats.mean, variance=stats.variance,
                   standard_error=stats.standard_error)


def _cmd_sample_partition(args, report, bits):
    reg = PartitionRegime.for_size(args.n, bits)
    k_trunc = args.k_trunc or prob_model.default_sampler_truncation(reg)
    stream = prob_model.RngStream(seed=args.seed, stream_id=args.stream_id)
    sizes = prob_model.sample_partition_sizes(reg, k_trunc, stream, args.count)
    stats = prob_model.stats_from_values(sizes)
    report.add_row(n=args.n, k_trunc=k_trunc, count=stats.count,
                   mean_size=stats.mean, standard_error=stats.standard_error,
                   rel_deviation_from_n=abs(stats.mean - args.n) / args.n)


def _cmd_sample_tilting(args, report, bits):
    stream = prob_model.RngStream(seed=args.seed, stream_id=args.stream_id)
    stats = prob_model.tilting_check(args.a, args.m, args.samples, stream)
    report.add_row(a=args.a, m=args.m, samples=stats.count, mean_diff=stats.mean,
                   standard_error=stats.standard_error)
    band = 4 * stats.standard_error
    report.diagnostics.append(Diagnostic.build(
        "tilting-identity", abs(stats.mean) <= band, stats.mean,
        f"|diff| <= {band:.3e}"))


def _cmd_sample_clt(args, report, bits):
    reg = PartitionRegime.for_size(args.n, bits)
    stream = prob_model.RngStream(seed=args.seed, stream_id=args.stream_id)
    stats = prob_model.clt_weighted_sum_check(reg, args.samples, stream)
    target = float(special_fn.bose_square_integral(precision_bits=bits))
    se_var = math.sqrt(max(stats.fourth_moment - stats.variance ** 2, 0.0)
                       / stats.count)
    report.add_row(n=args.n, samples=stats.count, variance=stats.variance,
                   target=target, variance_se=se_var,
                   kurtosis_ratio=stats.fourth_moment / (3 * stats.variance ** 2))
    report.diagnostics.append(Diagnostic.build(
        "clt-variance", abs(stats.variance - target) <= 4 * se_var,
        stats.variance, f"{target:.6f} +- {4 * se_var:.2e}"))


def _cmd_sample_qclt(args, report, bits):
    reg = QRegime.for_params(args.beta, args.n, bits)
    stream = prob_model.RngStream(seed=args.seed, stream_id=args.stream_id)
    stats = prob_model.q_clt_variance_check(reg, args.samples, stream)
    target = float(reg.sigma_sq)
    se_var = math.sqrt(max(stats.fourth_moment - stats.variance ** 2, 0.0)
                       / stats.count)
    report.add_row(beta=args.beta, n=args.n, samples=stats.count,
                   variance=stats.variance, target=target, variance_se=se_var)
    report.diagnostics.append(Diagnostic.build(
        "q-clt-variance", abs(stats.variance - target) <= 4 * se_var,
        stats.variance, f"{target:.6f} +- {4 * se_var:.2e}"))


def _cmd_sample_minor_arc(args, report, bits):
    reg = PartitionRegime.for_size(args.n, bits)
    stream = prob_model.RngStream(seed=args.seed, stream_id=args.stream_id)
    stats = prob_model.minor_arc_empirical(reg, args.theta, args.samples, stream)
    exact_mean = prob_model.minor_arc_truncated_mean(reg, args.theta,
                                                     precision_bits=bits)
    bound = saddle_numeric.minor_arc_bound(reg, args.theta / float(reg.eps),
                                           precision_bits=bits)
    report.add_row(n=args.n, theta=args.theta, samples=stats.count,
                   empirical_mean=stats.mean,
                   truncated_exact_mean=_log_str(exact_mean, 12),
                   suppression_exponent=_log_str(bound, 12))
    margin = 0.2
    limit = float(mpmath.exp(-(1 - margin) * bound))
    report.diagnostics.append(Diagnostic.build(
        "minor-arc-suppression", stats.mean <= limit, stats.mean,
        f"<= exp(-(1-{margin}) * bound) = {limit:.3e}"))


def _cmd_verify(args, report, bits):
    names = None if "all" in args.criteria else args.criteria
    report.diagnostics.extend(verify.run_criteria(names, seed=args.seed))


# -- driver ------------------------------------------------------------------

def run(argv=None, stdout=None):
    """Parse argv, execute, print the report; returns (report, exit_status)."""
    stdout = stdout if stdout is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return None, (exc.code if isinstance(exc.code, int) else 2)

    try:
        bits = resolve_bits(args.precision_bits)
    except ValueError as exc:
        print(f"asympartita: {exc}", file=sys.stderr)
        return None, 2

    command = " ".join(argv if argv is not None else sys.argv[1:])
    report = Report(command=command, version=__version__, precision_bits=bits,
                    seed=getattr(args, "seed", None),
                    timestamp=None if args.no_timestamp
                    else datetime.now(timezone.utc).isoformat())
    try:
        args.handler(args, report, bits)
    except (ValueError, ArithmeticError) as exc:
        report.diagnostics.append(Diagnostic.build(
            "execution", False, type(exc).__name__, "no error", detail=str(exc)))
    stdout.write(report.render(args.output_format))
    return report, (1 if report.failed else 0)


def main():
    sys.exit(run()[1])


if __name__ == "__main__":
    main()
