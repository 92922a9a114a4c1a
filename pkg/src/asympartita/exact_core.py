"""Exact and high-precision reference values.

Partition counts by two independent routes (Euler's pentagonal recurrence
and exhaustive enumeration), factorials, Newton-binomial (rising-factorial)
coefficients, q-Pochhammer products and Jackson q-factorials.  Everything
here is an oracle for the asymptotic and quadrature modules: integer results
are exact, real results carry an explicit working precision.

All functions are pure; no caches, no global state.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

import gmpy2
from mpmath import mpf

from .precision import resolve_bits, working_precision

BRUTEFORCE_LIMIT = 64


@dataclass(frozen=True)
class Partition:
    """A partition stored as part-size -> multiplicity with finite support.

    Zero multiplicities are stripped so equal partitions compare equal.
    """

    multiplicities: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for part, count in self.multiplicities.items():
            if not isinstance(part, int) or part < 1:
                raise ValueError(f"part sizes must be integers >= 1, got {part!r}")
            if not isinstance(count, int) or count < 0:
                raise ValueError(f"multiplicities must be integers >= 0, got {count!r}")
            if count:
                clean[part] = count
        object.__setattr__(self, "multiplicities", dict(sorted(clean.items())))

    @property
    def size(self) -> int:
        return sum(k * nu for k, nu in self.multiplicities.items())

    @classmethod
    def from_parts(cls, parts) -> "Partition":
        mult = {}
        for p in parts:
            mult[p] = mult.get(p, 0) + 1
        return cls(mult)


def partition_count_through(n: int) -> list:
    """Exact p(0..n) via the pentagonal-number recurrence, as one table.

    O(n^{3/2}) bignum additions.  Use this instead of repeated
    ``partition_count`` calls when many values are needed.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    table = [0] * (n + 1)
    table[0] = 1
    # generalized pentagonal numbers j(3j∓1)/2 with sign (-1)^(j+1), ascending
    pents = []
    j = 1
    while True:
        g = j * (3 * j - 1) // 2
        if g > n:
            break
        sign = 1 if j % 2 == 1 else -1
        pents.append((g, sign))
        g = j * (3 * j + 1) // 2
        if g <= n:
            pents.append((g, sign))
        j += 1
    for m in range(1, n + 1):
        acc = 0
        for g, s in pents:
            if g > m:
                break
            acc += s * table[m - g]
        table[m] = acc
    return table


def partition_count(n: int) -> int:
    """Exact number of partitions of ``n``; p(0) = 1."""
    return partition_count_through(n)[n]


def enumerate_partitions(n: int):
    """Yield every partition of ``n`` as a weakly ascending tuple of parts.

    Kelleher's accelerated ascending-composition walk; each partition is
    produced exactly once.  Intended for small n (oracle duty).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        yield ()
        return
    a = [0] * (n + 1)
    k = 1
    y = n - 1
    while k != 0:
        x = a[k - 1] + 1
        k -= 1
        while 2 * x <= y:
            a[k] = x
            y -= x
            k += 1
        while x <= y:
            a[k] = x
            a[k + 1] = y
            yield tuple(a[: k + 2])
            x += 1
            y -= 1
        a[k] = x + y
        y = x + y - 1
        yield tuple(a[: k + 1])


def partition_count_bruteforce(n: int) -> int:
    """Count partitions of ``n`` by exhaustively enumerating them.

    Independent of the pentagonal recurrence.  Guarded at n <= 64
    (p(64) ~ 1.7e6 partitions, enumerable in well under a second).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > BRUTEFORCE_LIMIT:
        raise ValueError(f"brute-force enumeration is capped at n = {BRUTEFORCE_LIMIT}")
    if n == 0:
        return 1
    # same walk as enumerate_partitions, counting instead of materializing
    a = [0] * (n + 1)
    k = 1
    y = n - 1
    count = 0
    while k != 0:
        x = a[k - 1] + 1
        k -= 1
        while 2 * x <= y:
            a[k] = x
            y -= x
            k += 1
        while x <= y:  # one partition per visit: prefix + (x, y)
            count += 1
            x += 1
            y -= 1
        a[k] = x + y
        y = x + y - 1
        count += 1  # prefix + (x + y)
    return count


def factorial(n: int) -> int:
    """Exact n!."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return math.factorial(n)


def _product_range(terms_lo: int, terms_hi: int, start: int, step: int):
    """gmpy2 product of start + j*step for j in [terms_lo, terms_hi)."""
    width = terms_hi - terms_lo
    if width == 0:
        return gmpy2.mpz(1)
    if width <= 16:
        acc = gmpy2.mpz(1)
        for j in range(terms_lo, terms_hi):
            acc *= start + j * step
        return acc
    mid = terms_lo + width // 2
    return _product_range(terms_lo, mid, start, step) * _product_range(mid, terms_hi, start, step)


def rising_coeff_exact(s, n: int) -> Fraction:
    """Exact (s)_n / n! for rational s, as a Fraction."""
    s = Fraction(s)
    if s <= 0:
        raise ValueError("s must be > 0")
    if n < 0:
        raise ValueError("n must be >= 0")
    num = _product_range(0, n, s.numerator, s.denominator)
    den = gmpy2.mpz(s.denominator) ** n * gmpy2.fac(n)
    return Fraction(int(num), int(den))


def rising_coeff(s, n: int, precision_bits=None) -> mpf:
    """Coefficient of z^n in (1-z)^(-s): the rising factorial (s)_n over n!.

    Rational ``s`` (int or Fraction) is evaluated exactly and rounded once;
    other reals are accumulated at an elevated precision so the relative
    error stays below 2^-(precision_bits - 8).
    """
    bits = resolve_bits(precision_bits)
    if n < 0:
        raise ValueError("n must be >= 0")
    if isinstance(s, (int, float, Fraction)):
        # floats are exact binary rationals, so they take the exact path too
        if isinstance(s, float) and not math.isfinite(s):
            raise ValueError("s must be finite")
        if s <= 0:
            raise ValueError("s must be > 0")
        frac = Fraction(s)
        num = _product_range(0, n, frac.numerator, frac.denominator)
        den = gmpy2.mpz(frac.denominator) ** n * gmpy2.fac(n)
        with working_precision(bits):
            return mpf(int(num)) / mpf(int(den))
    with working_precision(bits) as _:
        s_val = mpf(s)
    if not s_val > 0:
        raise ValueError("s must be > 0")
    guard = max(8, (2 * n).bit_length() + 2)
    with working_precision(bits + guard):
        acc = mpf(1)
        for j in range(n):
            acc *= s_val + j
        acc /= mpf(math.factorial(n))
    with working_precision(bits):
        return +acc


def _infinite_truncation_index(q_float: float, bits: int) -> int:
    # tail of -sum ln(1-a q^k) beyond K is below |a| q^K / (1-q); force it
    # under 2^-bits
    return int(math.ceil((bits * math.log(2) + math.log(1.0 / (1.0 - q_float)))
                         / (-math.log(q_float)))) + 1


def q_pochhammer(a, q, n: Optional[int] = None, precision_bits=None) -> mpf:
    """(a; q)_n = prod_{k<n} (1 - a q^k); ``n=None`` means the infinite product.

    Requires |a| < 1 and 0 < q < 1.  The infinite product is truncated at an
    index K with geometric tail bound |a| q^K / (1-q) < 2^-precision_bits, so
    the truncation error sits below one unit in the last reported digit.
    """
    bits = resolve_bits(precision_bits)
    with working_precision(bits):
        a_val = mpf(a)
        q_val = mpf(q)
    if not abs(a_val) < 1:
        raise ValueError("|a| must be < 1 for the product to converge factor-wise")
    if not (0 < q_val < 1):
        raise ValueError("q must lie in (0, 1)")
    if n is None:
        terms = _infinite_truncation_index(float(q_val), bits)
    else:
        if not isinstance(n, int) or n < 0:
            raise ValueError("n must be a nonnegative integer or None")
        terms = n
    guard = max(8, (2 * terms + 2).bit_length() + 2)
    with working_precision(bits + guard):
        prod = mpf(1)
        qk = mpf(1)
        for _ in range(terms):
            prod *= 1 - a_val * qk
            qk *= q_val
    with working_precision(bits):
        return +prod


def q_factorial(n: int, q, precision_bits=None) -> mpf:
    """Jackson q-factorial [n]_q! = (q; q)_n / (1-q)^n for q in (0, 1)."""
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be an integer >= 1")
    bits = resolve_bits(precision_bits)
    with working_precision(bits):
        q_val = mpf(q)
    if not (0 < q_val < 1):
        raise ValueError("q must lie in (0, 1)")
    guard = max(8, (2 * n + 2).bit_length() + 4)
    with working_precision(bits + guard):
        poch = q_pochhammer(q_val, q_val, n, precision_bits=bits + guard)
        result = poch / (1 - q_val) ** n
    with working_precision(bits):
        return +result
