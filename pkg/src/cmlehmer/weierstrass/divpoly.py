"""Division polynomials and the multiplication-by-n maps.

psi_n is stored as (P, e) meaning P(x) * y^e with e in {0,1}; y^2 is folded
into f(x) = x^3 + a4 x + a6 on the fly, so all arithmetic stays in one
variable. The x-part of [n] is (x psi_n^2 - psi_{n+1} psi_{n-1}) / psi_n^2
and the y-part is y * G_n with G_n = omega_n / psi_n^3.
"""

from __future__ import annotations

from ..errors import DegreeOverflow
from .._poly import Poly, QQ, RatFunc

_DEGREE_CAP = 400  # largest n for which psi_n is worth computing here


class YPoly:
    """P(x) * y^e on a fixed curve, e in {0, 1}."""

    __slots__ = ("ctx", "p", "e")

    def __init__(self, ctx, p, e):
        self.ctx = ctx
        self.p = p
        self.e = e if p else 0  # zero is even by convention

    def __mul__(self, other):
        e = self.e + other.e
        p = self.p * other.p
        if e == 2:
            return YPoly(self.ctx, p * self.ctx.f, 0)
        return YPoly(self.ctx, p, e)

    def __sub__(self, other):
        if self.e != other.e and self.p and other.p:
            raise ValueError("mixed y-parity in subtraction")
        e = self.e if self.p else other.e
        return YPoly(self.ctx, self.p - other.p, e)

    def __neg__(self):
        return YPoly(self.ctx, -self.p, self.e)

    def square(self):
        return self * self

    def div_2y(self):
        """Exact division by 2y. A parity-0 operand must be divisible by f
        (it then carries a hidden y^2)."""
        if self.e == 1:
            return YPoly(self.ctx, self.p * self.ctx.half, 0)
        if not self.p:
            return YPoly(self.ctx, self.p, 0)
        q, r = self.p.divmod_poly(self.ctx.f)
        if r:
            raise ArithmeticError("division by 2y left a remainder")
        return YPoly(self.ctx, q * self.ctx.half, 1)


class DivisionPolynomialContext:
    """Caches psi_n for one curve; coefficients live in the curve's ring."""

    def __init__(self, curve):
        self.curve = curve
        ring = curve.ring
        self.ring = ring
        self.f = curve.f_poly()
        self.half = ring.of(1) / ring.of(2)
        a4, a6 = curve.a4, curve.a6
        x = Poly(ring, [ring.zero, ring.one], trusted=True)
        one = Poly(ring, [ring.one], trusted=True)
        zero = Poly(ring, [], trusted=True)
        psi3 = (3 * x ** 4 + 6 * a4 * x ** 2 + 12 * a6 * x
                - a4 * a4 * one)
        psi4_half = (x ** 6 + 5 * a4 * x ** 4 + 20 * a6 * x ** 3
                     - 5 * a4 * a4 * x ** 2 - 4 * a4 * a6 * x
                     - (8 * a6 * a6 + a4 * a4 * a4) * one)
        self._cache = {
            0: YPoly(self, zero, 0),
            1: YPoly(self, one, 0),
            2: YPoly(self, 2 * one, 1),
            3: YPoly(self, psi3, 0),
            4: YPoly(self, 4 * psi4_half, 1),
        }

    def psi(self, n):
        n = int(n)
        if n < 0:
            return -self.psi(-n)
        if n > _DEGREE_CAP:
            raise DegreeOverflow("psi_%d exceeds the supported range" % n)
        c = self._cache.get(n)
        if c is not None:
            return c
        m, r = divmod(n, 2)
        if r:
            val = self.psi(m + 2) * self.psi(m) * self.psi(m) * self.psi(m) \
                - self.psi(m - 1) * self.psi(m + 1) * self.psi(m + 1) \
                * self.psi(m + 1)
        else:
            inner = self.psi(m + 2) * self.psi(m - 1) * self.psi(m - 1) \
                - self.psi(m - 2) * self.psi(m + 1) * self.psi(m + 1)
            val = (self.psi(m) * inner).div_2y()
        self._cache[n] = val
        return val

    def psi_squared(self, n):
        """psi_n^2 as a plain polynomial in x."""
        sq = self.psi(n).square()
        assert sq.e == 0
        return sq.p

    def omega(self, n):
        """omega_n = (psi_{n+2} psi_{n-1}^2 - psi_{n-2} psi_{n+1}^2) / 4y,
        so that y o [n] = omega_n / psi_n^3."""
        t = self.psi(n + 2) * self.psi(n - 1) * self.psi(n - 1) \
            - self.psi(n - 2) * self.psi(n + 1) * self.psi(n + 1)
        half = t.div_2y()
        return YPoly(self, half.p * self.half, half.e)


def division_poly(curve, n):
    """(P, e) with psi_n = P(x) * y^e; e is 1 exactly when n is even."""
    ctx = _context(curve)
    pn = ctx.psi(n)
    return pn.p, pn.e


_CTX_CACHE = {}


def _context(curve):
    key = (id(curve.ring), curve.a4, curve.a6)
    ctx = _CTX_CACHE.get(key)
    if ctx is None:
        ctx = DivisionPolynomialContext(curve)
        _CTX_CACHE[key] = ctx
    return ctx


class RationalMap:
    """An isogeny written as (x, y) -> (X(x), y * G(x)) with X, G rational
    functions in x; `multiplier` is the pullback scalar on the invariant
    differential (n for [n], alpha for a CM endomorphism)."""

    __slots__ = ("x_map", "y_twist", "degree", "multiplier")

    def __init__(self, x_map, y_twist, degree, multiplier):
        self.x_map = x_map
        self.y_twist = y_twist
        self.degree = degree
        self.multiplier = multiplier

    def eval_point(self, point):
        """Image of an affine point; None signals the point maps to O."""
        curve = point.curve
        try:
            x2 = self.x_map.eval(point.x)
            g = self.y_twist.eval(point.x)
        except ZeroDivisionError:
            return curve.infinity()
        return CurvePointView(curve, x2, point.y * g)

    def integer_pair(self):
        """The x-map scaled to a jointly primitive integer pair (R, S).

        Both polynomials get integer coefficients whose overall gcd is 1;
        for [n] on an integral model this recovers the classical
        normalization with R monic of degree n^2 and lc(S) = n^2.
        """
        from gmpy2 import gcd as _gcd, mpq, mpz
        from .._poly import content_primitive
        if self.x_map.ring != QQ:
            raise ValueError("integer_pair needs rational coefficients")
        cn, pn = content_primitive(self.x_map.num)
        cd, pd = content_primitive(self.x_map.den)
        a, b = mpq(cn).numerator, mpq(cn).denominator
        c, d = mpq(cd).numerator, mpq(cd).denominator
        g = _gcd(mpz(a * d), mpz(c * b))
        rn = mpz(a * d // g)
        rd = mpz(c * b // g)
        r_poly = Poly(QQ, [mpq(v * rn) for v in pn], trusted=True)
        s_poly = Poly(QQ, [mpq(v * rd) for v in pd], trusted=True)
        return r_poly, s_poly

    def __repr__(self):
        return "RationalMap(deg=%d, mult=%r)" % (self.degree, self.multiplier)


def CurvePointView(curve, x, y):
    from .curve import CurvePoint
    pt = CurvePoint(curve, x, y)
    return pt


def mult_map(curve, n):
    """The multiplication-by-n map as a RationalMap over the curve's ring.

    x o [n] = (x psi_n^2 - psi_{n+1} psi_{n-1}) / psi_n^2, in lowest terms
    with monic numerator of degree n^2;  y o [n] = y * omega_n / psi_n^3.
    """
    n = int(n)
    if n == 0:
        raise ValueError("[0] is not a rational map")
    neg = n < 0
    n = abs(n)
    ctx = _context(curve)
    ring = curve.ring
    x = Poly(ring, [ring.zero, ring.one], trusted=True)
    sq = ctx.psi_squared(n)
    cross = ctx.psi(n + 1) * ctx.psi(n - 1)
    assert cross.e == 0
    num = x * sq - cross.p
    # numerator and psi_n^2 are coprime (shared roots would be extra kernel
    # points), so skip the expensive generic reduction
    x_map = RatFunc(num, sq, reduce=False)

    om = ctx.omega(n)
    psi_cubed = ctx.psi(n) * ctx.psi(n) * ctx.psi(n)
    # G_n = omega_n / psi_n^3 after cancelling the common power of y.
    if psi_cubed.e == 1:
        # even n: omega has parity 0, psi^3 = Q * y; multiply through by y.
        assert om.e == 0
        g = RatFunc(om.p, psi_cubed.p * ctx.f, reduce=False)
    else:
        assert om.e == 1
        g = RatFunc(om.p, psi_cubed.p, reduce=False)
    if neg:
        return RationalMap(x_map, -g, n * n, -n)
    return RationalMap(x_map, g, n * n, n)


def x_only_mult(curve, n):
    return mult_map(curve, n).x_map
