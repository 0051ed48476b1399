"""
Exact rational scalars and certified approximations of exp and sqrt.

Rat is fractions.Fraction: arbitrary-precision, always in lowest terms with a
positive denominator, and exact under +, -, *, / and comparison.
"""

import logging
import re
from fractions import Fraction
from math import isqrt
from typing import Optional, Union

from detlab.errors import DomainError

logger = logging.getLogger("detlab.rational")

Rat = Fraction
RatLike = Union[Fraction, int, str]

_RAT_PATTERN = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rat(value: RatLike) -> Rat:
    """Parse "p/q", "p" or an int into a canonical Rat."""
    if isinstance(value, bool):
        raise DomainError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise DomainError(f"not a rational: {value!r}")

    match = _RAT_PATTERN.match(value)
    if not match:
        raise DomainError(f"malformed rational: {value!r}")
    num = int(match.group(1))
    den = int(match.group(2)) if match.group(2) is not None else 1
    if den == 0:
        raise DomainError(f"zero denominator: {value!r}")
    return Fraction(num, den)


def format_rat(value: RatLike) -> str:
    value = parse_rat(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def exact_sqrt(x: Rat) -> Optional[Rat]:
    """Exact square root of a nonnegative rational, or None if irrational."""
    if x < 0:
        return None
    num_root = isqrt(x.numerator)
    den_root = isqrt(x.denominator)
    if num_root * num_root == x.numerator and den_root * den_root == x.denominator:
        return Fraction(num_root, den_root)
    return None


def _check_eps(eps: Rat) -> None:
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")


def approx_exp(x: RatLike, eps: RatLike) -> Rat:
    """
    Partial Taylor sum r of e^x with (1-eps) e^x <= r <= (1+eps) e^x.

    Terms are added until the last one is at most eps/4 of the running sum
    (and at least four terms are in). For 0 <= x <= 1 the tail after term m
    is at most twice term m, so e^x - r <= (eps/2) r.
    """
    x = parse_rat(x)
    eps = parse_rat(eps)
    if not 0 <= x <= 1:
        raise DomainError(f"approx_exp needs x in [0, 1], got {x}")
    _check_eps(eps)

    term = Fraction(1)
    total = Fraction(1)
    m = 0
    while True:
        m += 1
        term = term * x / m
        total += term
        if m >= 4 and term <= eps / 4 * total:
            break

    logger.debug(f"approx_exp({x}) used {m + 1} terms")
    return total


def exp_enclosure(x: RatLike, eps: RatLike) -> tuple[Rat, Rat]:
    """Rational bracket (lo, hi) containing e^x, for x in [-1, 1]."""
    x = parse_rat(x)
    eps = parse_rat(eps)
    if not -1 <= x <= 1:
        raise DomainError(f"exp_enclosure needs x in [-1, 1], got {x}")
    r = approx_exp(abs(x), eps)
    lo, hi = r / (1 + eps), r / (1 - eps)
    if x < 0:
        lo, hi = 1 / hi, 1 / lo
    return lo, hi


def approx_sqrt(x: RatLike, eps: RatLike) -> Rat:
    """
    r > 0 with (1-eps) sqrt(x) <= r <= (1+eps) sqrt(x).

    Exact roots are returned as is; otherwise bisect the bracket
    [min(x, 1), max(x, 1)] until its width is at most eps times its
    lower end.
    """
    x = parse_rat(x)
    eps = parse_rat(eps)
    if x <= 0:
        raise DomainError(f"approx_sqrt needs x > 0, got {x}")
    _check_eps(eps)

    root = exact_sqrt(x)
    if root is not None:
        return root

    lo, hi = min(x, Fraction(1)), max(x, Fraction(1))
    steps = 0
    while hi - lo > eps * lo:
        mid = (lo + hi) / 2
        if mid * mid <= x:
            lo = mid
        else:
            hi = mid
        steps += 1

    logger.debug(f"approx_sqrt({x}) bisected {steps} times")
    return lo
