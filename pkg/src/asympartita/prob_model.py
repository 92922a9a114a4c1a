"""Monte Carlo layer: exponential-1 variables, tilting, CLT and sampler checks.

Random partitions are drawn from the product measure with independent
geometric multiplicities P(nu(k) = m) = (1 - r^k) r^(km), the unique
product measure matching the generating-function factorization at radius r.

Sampling and statistics run in IEEE double precision: every statistical
gate here is a multiple-of-standard-error band, orders of magnitude above
binary64 rounding.  Streams are counter-derived from (seed, stream_id), so
identical inputs reproduce identical samples; merged statistics combine
(count, mean, M2) triples exactly.
"""

import math
from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np
from mpmath import mpf

from .asymptotics import PartitionRegime, QRegime
from .exact_core import Partition
from .precision import resolve_bits, working_precision

_MAX_SEED = 2 ** 64


@dataclass(frozen=True)
class RngStream:
    """Reproducible stream handle: same (seed, stream_id), same samples."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not isinstance(self.seed, int) or not 0 <= self.seed < _MAX_SEED:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not isinstance(self.stream_id, int) or self.stream_id < 0:
            raise ValueError("stream_id must be a nonnegative integer")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed,
                                    spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class SampleStats:
    """Count, mean, unbiased variance and standard error of the mean.

    ``fourth_moment`` (central) is carried when the producing check needs a
    normality diagnostic; it is None otherwise.
    """

    count: int
    mean: float
    variance: float
    standard_error: float
    fourth_moment: Optional[float] = None

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.variance < 0:
            raise ValueError("variance must be >= 0")


def _stats_from_raw(count, s1, s2, s3=None, s4=None) -> SampleStats:
    mean = s1 / count
    var = max(0.0, (s2 - count * mean * mean) / (count - 1)) if count > 1 else 0.0
    m4 = None
    if s3 is not None and s4 is not None:
        # central fourth moment from raw power sums
        m4 = (s4 - 4 * mean * s3 + 6 * mean * mean * s2
              - 3 * count * mean ** 4) / count
        m4 = max(0.0, m4)
    return SampleStats(count=count, mean=mean, variance=var,
                       standard_error=math.sqrt(var / count),
                       fourth_moment=m4)


def stats_from_values(values) -> SampleStats:
    x = np.asarray(values, dtype=np.float64)
    return _stats_from_raw(x.size, float(x.sum()), float((x * x).sum()),
                           float((x ** 3).sum()), float((x ** 4).sum()))


def merge_moments(a, b):
    """Exact pairwise combination of (count, mean, M2) triples."""
    n_a, mean_a, m2_a = a
    n_b, mean_b, m2_b = b
    n = n_a + n_b
    delta = mean_b - mean_a
    mean = mean_a + delta * n_b / n
    m2 = m2_a + m2_b + delta * delta * n_a * n_b / n
    return (n, mean, m2)


def rate_function(x, precision_bits=None) -> mpf:
    """Large-deviation rate for averages of exponential-1 variables:
    x - 1 - ln x; zero exactly at the mean."""
    with working_precision(precision_bits):
        x_val = mpf(x)
        if not x_val > 0:
            raise ValueError("x must be > 0")
        return +(x_val - 1 - mpmath.log(x_val))


def cumulant_gf(t, precision_bits=None) -> mpf:
    """Cumulant generating function -ln(1 - t) of an exponential-1 variable,
    finite for t < 1; its Legendre transform is ``rate_function``."""
    with working_precision(precision_bits):
        t_val = mpf(t)
        if not t_val < 1:
            raise ValueError("t must be < 1")
        return +(-mpmath.log1p(-t_val))


def _draw_exponentials(gen, shape):
    # inverse CDF applied to 1-U, so a zero draw from random() is harmless
    return -np.log1p(-gen.random(shape))


def sample_exponentials(stream: RngStream, count: int) -> np.ndarray:
    """``count`` IID exponential-1 draws by the inverse-CDF method."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return _draw_exponentials(stream.generator(), count)


def tilting_check(a, m: int, samples: int, stream: RngStream) -> SampleStats:
    """Monte Carlo check of E[e^{aT} T^m] = m!/(1-a)^{m+1}.

    The estimator rescales plain draws through the tilting identity
    E[e^{aT} f(T)] = (1-a)^{-1} E[f(T/(1-a))]: direct e^{aT} weighting has
    infinite variance for a >= 1/2, so the band test would be meaningless
    there.  Returns stats of the per-sample difference from the closed
    form, which must sit within a few standard errors of zero.
    """
    a = float(a)
    if not -1 < a < 1:
        raise ValueError("|a| must be < 1")
    if not 0 <= m <= 4:
        raise ValueError("m must be in 0..4")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    draws = sample_exponentials(stream, samples)
    scale = (1.0 - a) ** (-(m + 1))
    closed_form = math.factorial(m) * scale
    diffs = scale * draws ** m - closed_form
    return stats_from_values(diffs)


def default_sampler_truncation(reg: PartitionRegime) -> int:
    """Smallest K with expected size mass sum_{k>K} k r^k/(1-r^k) below 1."""
    r = float(reg.r)
    k = 1
    while True:
        # tail bound: sum_{j>k} j r^j/(1-r^j) <= sum_{j>k} j r^j / (1-r)
        #           = r^{k+1} ((k+1)(1-r) + r) / ((1-r)^3)
        tail = r ** (k + 1) * ((k + 1) * (1 - r) + r) / (1 - r) ** 3
        if tail < 1.0:
            return k
        k += 1


def _validate_sampler_truncation(reg, k_trunc):
    if k_trunc < default_sampler_truncation(reg):
        raise ValueError("K_trunc leaves more than one expected part truncated")


_CHUNK_BUDGET = 1 << 23  # draws per chunk across all vectorized samplers


def sample_partition_multiplicity_matrix(reg: PartitionRegime, K_trunc: int,
                                         stream: RngStream, count: int):
    """(count, K_trunc) geometric multiplicities nu(k) for k = 1..K_trunc."""
    if count < 1:
        raise ValueError("count must be >= 1")
    _validate_sampler_truncation(reg, K_trunc)
    gen = stream.generator()
    r = float(reg.r)
    p_success = -np.expm1(np.arange(1, K_trunc + 1) * math.log(r))  # 1 - r^k
    rows_per_chunk = max(1, _CHUNK_BUDGET // K_trunc)
    blocks = []
    done = 0
    while done < count:
        rows = min(rows_per_chunk, count - done)
        blocks.append(gen.geometric(p_success, size=(rows, K_trunc)) - 1)
        done += rows
    return np.vstack(blocks)


def sample_partition_sizes(reg: PartitionRegime, K_trunc: int,
                           stream: RngStream, count: int) -> np.ndarray:
    """Sizes of ``count`` independent random partitions (vectorized)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    _validate_sampler_truncation(reg, K_trunc)
    gen = stream.generator()
    r = float(reg.r)
    k_vec = np.arange(1, K_trunc + 1)
    p_success = -np.expm1(k_vec * math.log(r))
    rows_per_chunk = max(1, _CHUNK_BUDGET // K_trunc)
    sizes = np.empty(count, dtype=np.int64)
    done = 0
    while done < count:
        rows = min(rows_per_chunk, count - done)
        nu = gen.geometric(p_success, size=(rows, K_trunc)) - 1
        sizes[done:done + rows] = nu @ k_vec
        done += rows
    return sizes


def sample_partition(reg: PartitionRegime, K_trunc: int,
                     stream: RngStream) -> Partition:
    """One random partition under the geometric product measure."""
    nu = sample_partition_multiplicity_matrix(reg, K_trunc, stream, 1)[0]
    return Partition({k + 1: int(c) for k, c in enumerate(nu) if c})


def partition_point_mass(reg: PartitionRegime, K_trunc: int, m: int,
                         partition_count_m: int, precision_bits=None) -> mpf:
    """Exact P(size = m) under the truncated measure, for K_trunc >= m.

    Equals p(m) r^m prod_{k<=K_trunc}(1 - r^k): with all parts <= m
    available, every partition of m is reachable.
    """
    if K_trunc < m:
        raise ValueError("point mass needs K_trunc >= m")
    bits = resolve_bits(precision_bits)
    with working_precision(bits):
        log_prod = mpf(0)
        for k in range(1, K_trunc + 1):
            log_prod += mpmath.log1p(-reg.r ** k)
        return +(partition_count_m * reg.r ** m * mpmath.exp(log_prod))


def clt_weighted_sum_check(reg: PartitionRegime, samples: int,
                           stream: RngStream) -> SampleStats:
    """Stats of S = sqrt(eps) sum_k (T_k - 1) eps k/(r^-k - 1).

    The variance of S approaches the square-integral constant
    pi^2/3 - 2 zeta(3); the central fourth moment is carried so callers
    can compare against the Gaussian value 3 var^2.
    """
    if samples < 10 ** 4:
        raise ValueError("samples must be >= 1e4 for a meaningful band")
    eps = float(reg.eps)
    k_max = int(math.ceil(30.0 / eps))
    k = np.arange(1, k_max + 1)
    weights = eps * k / np.expm1(eps * k)
    gen = stream.generator()
    rows_per_chunk = max(1, _CHUNK_BUDGET // k_max)
    sums = np.empty(samples)
    done = 0
    while done < samples:
        rows = min(rows_per_chunk, samples - done)
        draws = _draw_exponentials(gen, (rows, k_max))
        draws -= 1.0
        sums[done:done + rows] = math.sqrt(eps) * (draws @ weights)
        done += rows
    return stats_from_values(sums)


def q_clt_variance_check(reg: QRegime, samples: int,
                         stream: RngStream) -> SampleStats:
    """Stats of n^-1/2 sum_k (T_k - 1) r e^{-beta k/n}/(1 - r e^{-beta k/n}).

    Its variance approaches sigma^2 = e^beta - 1 - beta.  The weight sum
    starts at k = 0 and is truncated once the discarded variance falls to
    1e-4 of sigma^2.
    """
    if samples < 10 ** 4:
        raise ValueError("samples must be >= 1e4 for a meaningful band")
    beta = float(reg.beta)
    n = reg.n
    r = float(reg.r)
    sigma_sq = float(reg.sigma_sq)
    # discarded tail of Var(X): (r^2/(2 beta)) e^(-2 beta K/n) < 1e-4 sigma^2
    k_max = int(math.ceil(n / (2 * beta)
                          * math.log(r * r / (2 * beta * 1e-4 * sigma_sq))))
    k = np.arange(0, k_max + 1)
    w = r * np.exp(-beta * k / n)
    weights = w / (1.0 - w)
    gen = stream.generator()
    rows_per_chunk = max(1, _CHUNK_BUDGET // (k_max + 1))
    sums = np.empty(samples)
    done = 0
    while done < samples:
        rows = min(rows_per_chunk, samples - done)
        draws = _draw_exponentials(gen, (rows, k_max + 1))
        draws -= 1.0
        sums[done:done + rows] = (draws @ weights) / math.sqrt(n)
        done += rows
    return stats_from_values(sums)


def minor_arc_empirical(reg: PartitionRegime, theta, samples: int,
                        stream: RngStream) -> SampleStats:
    """Stats of the integrand modulus exp(-2 sum_k T_k r^k/(1-r^k) sin^2(theta k/2)).

    The mean must decay like exp(-minor_arc_bound(reg, theta/eps)); the
    exact mean of the truncated modulus is prod_k 1/(1 + v_k) with
    v_k = 2 r^k/(1-r^k) sin^2(theta k/2).
    """
    theta = float(theta)
    if theta == 0 or abs(theta) > math.pi:
        raise ValueError("theta must be nonzero with |theta| <= pi")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    eps = float(reg.eps)
    r = float(reg.r)
    k_max = int(math.ceil((0.5 * 64 * math.log(2)
                           + math.log(2.0 / (1.0 - r))) / eps))
    k = np.arange(1, k_max + 1)
    rk = np.exp(k * math.log(r))
    v = 2.0 * rk / (1.0 - rk) * np.sin(theta * k / 2.0) ** 2
    gen = stream.generator()
    rows_per_chunk = max(1, _CHUNK_BUDGET // k_max)
    vals = np.empty(samples)
    done = 0
    while done < samples:
        rows = min(rows_per_chunk, samples - done)
        draws = _draw_exponentials(gen, (rows, k_max))
        vals[done:done + rows] = np.exp(-(draws @ v))
        done += rows
    return stats_from_values(vals)


def minor_arc_truncated_mean(reg: PartitionRegime, theta,
                             precision_bits=None) -> mpf:
    """Exact E[modulus] = prod_k (1 + v_k)^-1 for the truncated weight set."""
    theta = float(theta)
    eps = float(reg.eps)
    r = float(reg.r)
    k_max = int(math.ceil((0.5 * 64 * math.log(2)
                           + math.log(2.0 / (1.0 - r))) / eps))
    bits = resolve_bits(precision_bits)
    with working_precision(bits):
        acc = mpf(0)
        for k in range(1, k_max + 1):
            v = 2 * reg.r ** k / (1 - reg.r ** k) * mpmath.sin(mpf(theta) * k / 2) ** 2
            acc += mpmath.log1p(v)
        return +mpmath.exp(-acc)
