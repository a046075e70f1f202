"""Exact rational scalars.

gmpy2's mpq/mpz are the working representation everywhere in the package:
they are drop-in arithmetic types, interoperate with fractions.Fraction, and
stay fast when the canonical-height telescoping produces million-digit
integers. This module centralizes coercion and string I/O so the rest of the
code never touches gmpy2 directly for scalar plumbing.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

import gmpy2
from gmpy2 import mpq, mpz

RationalLike = Union[int, str, Fraction, "mpq", "mpz"]

#: Exact rational scalar type used across the public API.
BigRational = type(mpq())


def rational(v: RationalLike) -> mpq:
    """Coerce v to an exact rational.

    Accepts int, mpz, mpq, Fraction, and strings in either 'p/q' or decimal
    form ('-3.25' becomes -13/4 exactly). Floats are rejected: a float that
    was meant exactly should be written as a string or Fraction by the caller.
    """
    if isinstance(v, float):
        raise TypeError("refusing float %r: pass a string or Fraction" % (v,))
    if isinstance(v, str):
        s = v.strip()
        if "/" in s:
            num, den = s.split("/")
            return mpq(mpz(num.strip()), mpz(den.strip()))
        if "." in s or "e" in s or "E" in s:
            # exact decimal: use Fraction's decimal parser
            return mpq(Fraction(s))
        return mpq(mpz(s))
    return mpq(v)


def rational_str(q) -> str:
    """Serialize an exact rational as 'p/q' (or 'p' when integral)."""
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return "%s/%s" % (q.numerator, q.denominator)


def floor_q(q) -> mpz:
    """Floor of an exact rational, as mpz."""
    q = mpq(q)
    return q.numerator // q.denominator


def ceil_q(q) -> mpz:
    q = mpq(q)
    return -((-q.numerator) // q.denominator)


def isqrt(n) -> mpz:
    if n < 0:
        raise ValueError("isqrt of negative")
    return gmpy2.isqrt(mpz(n))


def is_square(n) -> bool:
    if n < 0:
        return False
    r = gmpy2.isqrt(mpz(n))
    return r * r == n


def sqrt_exact(q):
    """Exact square root of a rational if it is one, else None."""
    q = mpq(q)
    if q < 0:
        return None
    a, b = mpz(q.numerator), mpz(q.denominator)
    ra, rb = gmpy2.isqrt(a), gmpy2.isqrt(b)
    if ra * ra == a and rb * rb == b:
        return mpq(ra, rb)
    return None
