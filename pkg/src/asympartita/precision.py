"""Working-precision plumbing shared by every numeric module.

Real scalars are mpmath ``mpf`` values produced under an explicit working
precision in bits.  Callers either pass ``precision_bits`` per call or rely
on the process default, which can be set through the environment variable
``ASYMPARTITA_PRECISION_BITS``.
"""

import os
from contextlib import contextmanager

import mpmath
from mpmath import mpf

DEFAULT_PRECISION_BITS = 256
MIN_PRECISION_BITS = 64
PRECISION_ENV_VAR = "ASYMPARTITA_PRECISION_BITS"


def default_precision_bits() -> int:
    """Process-wide default precision, from the environment or 256."""
    raw = os.environ.get(PRECISION_ENV_VAR)
    if raw is None:
        return DEFAULT_PRECISION_BITS
    try:
        bits = int(raw)
    except ValueError as exc:
        raise ValueError(
            f"{PRECISION_ENV_VAR} must be an integer, got {raw!r}") from exc
    _check_bits(bits)
    return bits


def resolve_bits(precision_bits=None) -> int:
    if precision_bits is None:
        return default_precision_bits()
    _check_bits(precision_bits)
    return precision_bits


def _check_bits(bits):
    if not isinstance(bits, int) or bits < MIN_PRECISION_BITS:
        raise ValueError(
            f"precision_bits must be an integer >= {MIN_PRECISION_BITS}, got {bits!r}")


@contextmanager
def working_precision(precision_bits=None):
    """Context manager setting mpmath's binary working precision."""
    bits = resolve_bits(precision_bits)
    with mpmath.workprec(bits):
        yield bits


def make_real(x, precision_bits=None) -> mpf:
    """Round ``x`` to an mpf at the working precision; NaN is rejected."""
    with working_precision(precision_bits):
        val = mpf(x) if not isinstance(x, mpf) else +x
    if mpmath.isnan(val):
        raise ValueError("NaN cannot be stored as a real scalar")
    return val
