"""Algebraic numbers as (integer minimal polynomial, tracked complex root).

The exact data is the primitive integer minimal polynomial; the inexact data
is a high-precision root approximation that selects which root is meant.
Arithmetic goes through resultants computed exactly by evaluation and
Lagrange interpolation over Q, followed by integer factorization (sympy) and
root matching at certified separation margins.

Degrees are capped: the product of the input degrees of any binary operation
must stay <= 64, which keeps the construction layer honest about what the
package can exactly support.
"""

from __future__ import annotations

import mpmath
import sympy
from gmpy2 import mpq, mpz

from ..errors import DegreeOverflow, PrecisionUnreachable
from .._poly import Poly, QQ, content_primitive
from .._rat import rational

DEGREE_CAP = 64

_X = sympy.Symbol("x")


def _factor_int_poly(cs):
    """Irreducible integer factors of the primitive integer polynomial."""
    expr = sum(int(c) * _X ** i for i, c in enumerate(cs))
    _, factors = sympy.factor_list(sympy.Poly(expr, _X))
    out = []
    for fac, mult in factors:
        fc = [mpz(int(c)) for c in reversed(sympy.Poly(fac, _X).all_coeffs())]
        out.append((fc, mult))
    return out


def _poly_eval_mpc(cs, z):
    acc = mpmath.mpc(0)
    for c in reversed(cs):
        acc = acc * z + int(c)
    return acc


def _lagrange_interpolate(points, values):
    """Exact polynomial through (points[i], values[i]) over Q, as Poly."""
    n = len(points)
    out = Poly(QQ, [])
    for i in range(n):
        num = Poly(QQ, [1])
        den = mpq(1)
        for j in range(n):
            if j != i:
                num = num * Poly(QQ, [-points[j], 1])
                den *= points[i] - points[j]
        out = out + num * (values[i] / den)
    return out


class AlgebraicNumber:
    """A root of an irreducible integer polynomial, tagged by approximation."""

    __slots__ = ("min_cs", "_approx", "_prec")

    def __init__(self, min_cs, approx, prec):
        self.min_cs = tuple(mpz(c) for c in min_cs)
        self._approx = approx
        self._prec = prec

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_rational(cls, q):
        q = rational(q)
        cs = [mpz(-q.numerator), mpz(q.denominator)]
        g = _content(cs)
        cs = [c // g for c in cs]
        return cls(cs, mpmath.mpc(mpmath.mpf(q.numerator) / q.denominator),
                   mpmath.mp.prec)

    @classmethod
    def nth_root(cls, q, n):
        """Principal n-th root of the rational q (complex for negative q
        and even n; real positive branch for positive q)."""
        q = rational(q)
        if n < 1:
            raise ValueError("n must be positive")
        if not q:
            return cls.from_rational(0)
        cs = [mpz(0)] * (n + 1)
        cs[0] = mpz(-q.numerator)
        cs[n] = mpz(q.denominator)
        with mpmath.workprec(_WORK_PREC):
            base = mpmath.mpc(mpmath.mpf(q.numerator) / q.denominator)
            val = base ** (mpmath.mpf(1) / n)
        return _select_root(cs, val)

    @classmethod
    def root_of_unity(cls, m):
        from .cyclo import cyclotomic_poly
        p = cyclotomic_poly(m)
        cs = [mpz(c.numerator) for c in p.cs]
        with mpmath.workprec(_WORK_PREC):
            val = mpmath.e ** (2j * mpmath.pi / m)
        return _select_root(cs, val)

    # -- structure ----------------------------------------------------------

    @property
    def degree(self):
        return len(self.min_cs) - 1

    def minpoly(self) -> Poly:
        """Monic minimal polynomial over Q."""
        lead = mpq(self.min_cs[-1])
        return Poly(QQ, [mpq(c) / lead for c in self.min_cs])

    def minpoly_int(self):
        """Primitive integer coefficient tuple, positive leading."""
        return self.min_cs

    def is_rational(self):
        return self.degree == 1

    def rational_value(self):
        if not self.is_rational():
            raise ValueError("degree > 1")
        return mpq(-self.min_cs[0], self.min_cs[1])

    def approx(self, prec=53):
        """Complex approximation at >= prec bits of working precision."""
        if self._prec >= prec:
            return self._approx
        refined = _refine_root(self.min_cs, self._approx, prec)
        self._approx = refined
        self._prec = prec
        return refined

    # -- arithmetic ---------------------------------------------------------

    def _cap(self, other):
        if self.degree * other.degree > DEGREE_CAP:
            raise DegreeOverflow("degree product %d exceeds %d"
                                 % (self.degree * other.degree, DEGREE_CAP))

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if self.is_rational():
            return other._rational_shift(self.rational_value())
        if other.is_rational():
            return self._rational_shift(other.rational_value())
        self._cap(other)
        f = Poly(QQ, [mpq(c) for c in self.min_cs])
        g = Poly(QQ, [mpq(c) for c in other.min_cs])
        bound = f.degree * g.degree
        pts, vals = [], []
        x0 = 0
        while len(pts) <= bound:
            q0 = mpq(x0)
            # res_y(f(y), g(x0 - y)) as a value
            gshift = g.compose(Poly(QQ, [q0, -1]))
            pts.append(q0)
            vals.append(f.resultant(gshift))
            x0 += 1
        h = _lagrange_interpolate(pts, vals)
        with mpmath.workprec(_WORK_PREC):
            val = self.approx(_WORK_PREC) + other.approx(_WORK_PREC)
        return _select_root(_to_int_cs(h), val)

    __radd__ = __add__

    def __neg__(self):
        cs = [(-c if i & 1 else c) for i, c in enumerate(self.min_cs)]
        if cs[-1] < 0:
            cs = [-c for c in cs]
        return AlgebraicNumber(cs, -self._approx, self._prec)

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if self.is_rational():
            return other._rational_scale(self.rational_value())
        if other.is_rational():
            return self._rational_scale(other.rational_value())
        self._cap(other)
        f = Poly(QQ, [mpq(c) for c in self.min_cs])
        g = Poly(QQ, [mpq(c) for c in other.min_cs])
        dg = g.degree
        bound = f.degree * g.degree
        pts, vals = [], []
        x0 = 1
        while len(pts) <= bound:
            q0 = mpq(x0)
            # res_y(f(y), y^dg g(x0/y))
            cs = [g.cs[dg - j] * q0 ** (dg - j) for j in range(dg + 1)]
            gh = Poly(QQ, cs)
            pts.append(q0)
            vals.append(f.resultant(gh))
            x0 = -x0 if x0 > 0 else -x0 + 1  # 1, -1, 2, -2, ... never 0
        h = _lagrange_interpolate(pts, vals)
        with mpmath.workprec(_WORK_PREC):
            val = self.approx(_WORK_PREC) * other.approx(_WORK_PREC)
        return _select_root(_to_int_cs(h), val)

    __rmul__ = __mul__

    def inverse(self):
        # an irreducible minpoly has zero constant term only for the number 0
        if self.min_cs[0] == 0:
            raise ZeroDivisionError("inverse of zero")
        cs = list(reversed(self.min_cs))
        if cs[-1] < 0:
            cs = [-c for c in cs]
        with mpmath.workprec(_WORK_PREC):
            val = 1 / self.approx(_WORK_PREC)
        return _select_root([mpz(c) for c in cs], val)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        return other * self.inverse()

    def _rational_shift(self, q):
        # minpoly of a + q is f(x - q), cleared to integers
        f = Poly(QQ, [mpq(c) for c in self.min_cs])
        h = f.compose(Poly(QQ, [-q, 1]))
        with mpmath.workprec(max(self._prec, 64)):
            val = self._approx + mpmath.mpf(q.numerator) / q.denominator
        cs = _to_int_cs(h)
        return AlgebraicNumber(cs, val, self._prec)

    def _rational_scale(self, q):
        if not q:
            return AlgebraicNumber.from_rational(0)
        f = Poly(QQ, [mpq(c) for c in self.min_cs])
        h = f.scale_x(1 / q)
        with mpmath.workprec(max(self._prec, 64)):
            val = self._approx * mpmath.mpf(q.numerator) / q.denominator
        cs = _to_int_cs(h)
        return AlgebraicNumber(cs, val, self._prec)

    def equals(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if self.min_cs != other.min_cs:
            return False
        if self.degree == 1:
            return True
        prec = 256
        a = self.approx(prec)
        b = other.approx(prec)
        sep = _root_separation(self.min_cs)
        return abs(a - b) < sep / 2

    def __repr__(self):
        return ("AlgebraicNumber(deg=%d, ~%s)"
                % (self.degree, mpmath.nstr(self._approx, 8)))


_WORK_PREC = 300


def _content(cs):
    import gmpy2
    g = mpz(0)
    for c in cs:
        g = gmpy2.gcd(g, mpz(c))
    return g if g else mpz(1)


def _to_int_cs(p: Poly):
    _, ints = content_primitive(p)
    if not ints:
        raise ValueError("zero polynomial has no roots to select")
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return ints


def _refine_root(cs, seed, prec):
    """Track the root of cs nearest to seed at the requested precision."""
    deg = len(cs) - 1
    for attempt in range(4):
        wp = prec + 40 + 40 * attempt
        with mpmath.workprec(wp):
            try:
                roots = mpmath.polyroots([int(c) for c in reversed(cs)],
                                         maxsteps=200, extraprec=80)
            except mpmath.libmp.NoConvergence:
                continue
            best = min(roots, key=lambda r: abs(r - seed))
            others = [r for r in roots if r is not best]
            if not others:
                return mpmath.mpc(best)
            d2 = min(abs(best - r) for r in others)
            if d2 == 0 or abs(best - seed) < d2 / 2:
                return mpmath.mpc(best)
    raise PrecisionUnreachable("cannot track root of degree-%d polynomial"
                               % deg)


def _root_separation(cs):
    with mpmath.workprec(256):
        roots = mpmath.polyroots([int(c) for c in reversed(cs)],
                                 maxsteps=200, extraprec=80)
        n = len(roots)
        if n < 2:
            return mpmath.mpf(1)
        sep = min(abs(roots[i] - roots[j])
                  for i in range(n) for j in range(i + 1, n))
        return sep


def _select_root(cs, val):
    """Pick the irreducible factor of cs vanishing at val, certified by a
    separation margin, and return the algebraic number it defines."""
    factors = _factor_int_poly(cs)
    if len(factors) == 1 and factors[0][1] == 1:
        chosen = factors[0][0]
    else:
        with mpmath.workprec(_WORK_PREC):
            scored = []
            for fc, _ in factors:
                scored.append((abs(_poly_eval_mpc(fc, val)), fc))
            scored.sort(key=lambda t: t[0])
            best, runner = scored[0], scored[1] if len(scored) > 1 else None
            if runner is not None and runner[0] < mpmath.mpf(2) ** (-30):
                raise PrecisionUnreachable(
                    "cannot separate minimal polynomial candidates")
            if best[0] > mpmath.mpf(2) ** (-_WORK_PREC // 3):
                raise PrecisionUnreachable(
                    "no candidate factor vanishes at the tracked root")
            chosen = best[1]
    refined = _refine_root(chosen, val, _WORK_PREC)
    return AlgebraicNumber(chosen, refined, _WORK_PREC)


def _coerce(v):
    if isinstance(v, AlgebraicNumber):
        return v
    try:
        q = rational(v)
    except (TypeError, ValueError):
        return None
    return AlgebraicNumber.from_rational(q)


def minimal_polynomial(a) -> Poly:
    """Monic rational minimal polynomial of an algebraic number (or of a
    rational, coerced)."""
    a = _coerce(a)
    if a is None:
        raise TypeError("not an algebraic number")
    return a.minpoly()
