"""
Numbers in two modes: exact rationals and floats.

Most of the interesting examples (the sec6 family with d = 2 and beta = 2, the
kappa additivity suite) are fully rational, so we keep Fractions as long as
every ingredient is rational and only drop to floats when a power N(e)^-beta
is irrational.
"""

from decimal import ROUND_HALF_EVEN, Context
from fractions import Fraction
from typing import Callable, Optional, Union

from scipy import optimize
from sympy import Rational, integer_nthroot

from ultrakms.exceptions import InexactValue, ParseError

Number = Union[Fraction, float]

_FORMAT_CONTEXT = Context(prec=12, rounding=ROUND_HALF_EVEN)


def parse_number(text: str) -> Fraction:
    """
    Parse `p/q`, an integer or a decimal literal into an exact Fraction.

    Decimals are read as the decimal fraction they spell ("0.1" is 1/10), which
    is what people mean when they type them into a weight file.
    """
    cleaned = text.strip()
    try:
        return Fraction(cleaned)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a number: {exc}", text=cleaned) from exc


def is_exact(value: Number) -> bool:
    return isinstance(value, Fraction)


def rational_power(base: Fraction, exponent: Fraction) -> Optional[Fraction]:
    """Return base**exponent as a Fraction when it is rational, else None."""
    if base <= 0:
        return None
    if base == 1 or exponent == 0:
        return Fraction(1)
    p, q = exponent.numerator, exponent.denominator
    if q == 1:
        return base**p
    num_root, num_exact = integer_nthroot(base.numerator, q)
    den_root, den_exact = integer_nthroot(base.denominator, q)
    if not (num_exact and den_exact):
        return None
    return Fraction(int(num_root), int(den_root)) ** p


def power(base: Number, exponent: Number, exact: Optional[bool] = None) -> Number:
    """
    base**exponent, exact when possible.

    exact=True insists on a rational answer (InexactValue otherwise),
    exact=False forces a float, None picks whatever the inputs allow.
    """
    if exact is not False and is_exact(base) and is_exact(exponent):
        value = rational_power(base, exponent)  # type: ignore[arg-type]
        if value is not None:
            return value
    if exact:
        raise InexactValue(f"{format_number(base)}^{format_number(exponent)} is not rational")
    return float(base) ** float(exponent)


def to_float(value: Number) -> float:
    return float(value)


def is_zero(value: Number, tol: float) -> bool:
    """Exact zero test for rationals, |x| <= tol for floats."""
    if is_exact(value):
        return value == 0
    return abs(value) <= tol


def close(a: Number, b: Number, tol: float) -> bool:
    return is_zero(a - b, tol)


def not_above(a: Number, b: Number, tol: float) -> bool:
    """a <= b, with float slack tol."""
    if is_exact(a) and is_exact(b):
        return a <= b
    return float(a) <= float(b) + tol


def format_number(value: Number) -> str:
    """
    Render a number for reports.

    Rationals print as `p/q` (or `p`), floats with 12 significant digits and
    round-half-even so golden files stay diffable.
    """
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return str(value)
    return str(_FORMAT_CONTEXT.create_decimal_from_float(float(value)))


def as_sympy(value: Number):
    """Lift to a sympy number for exact linear algebra."""
    if isinstance(value, Fraction):
        return Rational(value.numerator, value.denominator)
    return value


def from_sympy(value) -> Fraction:
    """Back from a sympy Rational to a Fraction."""
    return Fraction(int(value.p), int(value.q))


def bisect(func: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """
    Root of func in [lo, hi] by bisection.

    Endpoints that are already roots are returned directly; scipy insists on a
    strict sign change otherwise.
    """
    f_lo, f_hi = func(lo), func(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    return float(optimize.bisect(func, lo, hi, xtol=tol, maxiter=500))
