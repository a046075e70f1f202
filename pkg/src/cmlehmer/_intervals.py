"""Certified interval comparisons on top of mpmath.iv.

The parameter audit must decide inequalities between transcendental
expressions (powers of logs) with a proof, not a float guess. Everything
here computes with outward-rounded intervals at increasing precision and
refuses to answer rather than guessing when the intervals keep straddling.
"""

from __future__ import annotations

import contextlib

import mpmath
from mpmath import iv

from .errors import PrecisionUnreachable

MAX_PREC = 4096


@contextlib.contextmanager
def iv_at(prec):
    """Context manager setting the interval working precision.

    mpmath keeps separate precision knobs for the real and the interval
    context; workprec alone leaves iv at its default 53 bits, so both are
    set here and restored on exit.
    """
    old = iv.prec
    iv.prec = prec
    try:
        with mpmath.workprec(prec):
            yield
    finally:
        iv.prec = old


class IntervalScalar:
    """Tiny wrapper so audit code reads algebraically: wraps one iv.mpf."""

    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v if isinstance(v, iv.mpf) else iv.mpf(v)

    def __add__(self, o):
        return IntervalScalar(self.v + _raw(o))

    __radd__ = __add__

    def __sub__(self, o):
        return IntervalScalar(self.v - _raw(o))

    def __rsub__(self, o):
        return IntervalScalar(_raw(o) - self.v)

    def __mul__(self, o):
        return IntervalScalar(self.v * _raw(o))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return IntervalScalar(self.v / _raw(o))

    def __rtruediv__(self, o):
        return IntervalScalar(_raw(o) / self.v)

    def __pow__(self, e):
        return IntervalScalar(self.v ** e)

    def log(self):
        return IntervalScalar(iv.log(self.v))

    @property
    def lo(self):
        return self.v.a

    @property
    def hi(self):
        return self.v.b

    def __repr__(self):
        return "IntervalScalar(%s)" % (self.v,)


def _raw(o):
    return o.v if isinstance(o, IntervalScalar) else o


def certified_floor(make_interval, start_prec=128):
    """Floor of a positive quantity given as prec -> IntervalScalar.

    Doubles precision until floor(lo) == floor(hi); raises
    PrecisionUnreachable if the value sits on an integer to 4096 bits
    (callers treat that as an ill-posed parameter plan, not a guess).
    """
    prec = start_prec
    while prec <= MAX_PREC:
        with iv_at(prec):
            x = make_interval(prec).v
            lo = mpmath.floor(mpmath.mpf(x.a))
            hi = mpmath.floor(mpmath.mpf(x.b))
            if lo == hi:
                return int(lo)
        prec *= 2
    raise PrecisionUnreachable("floor straddles an integer at %d bits"
                               % MAX_PREC)


def certified_compare(make_lhs, make_rhs, start_prec=128):
    """Certified trichotomy: returns -1, 0 (undecided), or +1.

    +1 means lhs > rhs with proof, -1 means lhs < rhs with proof. 0 is only
    returned after precision escalation fails, and callers decide whether
    that is an error.
    """
    prec = start_prec
    while prec <= MAX_PREC:
        with iv_at(prec):
            a = make_lhs(prec).v
            b = make_rhs(prec).v
            if a.a > b.b:
                return 1
            if a.b < b.a:
                return -1
        prec *= 2
    return 0


def iv_log_of_int(n, prec):
    with iv_at(prec):
        return IntervalScalar(iv.log(iv.mpf(n)))
