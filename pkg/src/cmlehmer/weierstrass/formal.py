"""Formal group of a Weierstrass curve at the origin.

Everything is computed in the parameter t = -x/y with w = -1/y, where the
curve equation becomes w = t^3 + a4 t w^2 + a6 w^3. Series are truncated
exactly (no floats): FormalSeries is a univariate jet, Biv a bivariate one,
and Laurent a finite-tail Laurent expansion used to expand rational maps
around the origin.
"""

from __future__ import annotations

from gmpy2 import mpq

from .._poly import QQ


class FormalSeries:
    """Truncated power series: coefficients cs[0..], known mod t^order."""

    __slots__ = ("ring", "cs", "order")

    def __init__(self, ring, cs, order):
        self.ring = ring
        self.order = order
        cs = list(cs[:order])
        while len(cs) < order:
            cs.append(ring.zero)
        self.cs = cs

    @classmethod
    def var(cls, ring, order):
        return cls(ring, [ring.zero, ring.one], order)

    @classmethod
    def const(cls, ring, c, order):
        return cls(ring, [ring.of(c)], order)

    def __getitem__(self, i):
        if 0 <= i < len(self.cs):
            return self.cs[i]
        return self.ring.zero

    def __eq__(self, other):
        if not isinstance(other, FormalSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return all(self[i] == other[i] for i in range(n))

    def __add__(self, other):
        other = self._coerce(other)
        n = min(self.order, other.order)
        return FormalSeries(self.ring,
                            [self[i] + other[i] for i in range(n)], n)

    def _coerce(self, other):
        if isinstance(other, FormalSeries):
            return other
        return FormalSeries.const(self.ring, other, self.order)

    __radd__ = __add__

    def __neg__(self):
        return FormalSeries(self.ring, [-c for c in self.cs], self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        if not isinstance(other, FormalSeries):
            c = self.ring.of(other)
            return FormalSeries(self.ring, [a * c for a in self.cs],
                                self.order)
        n = min(self.order, other.order)
        z = self.ring.zero
        out = [z] * n
        for i, a in enumerate(self.cs[:n]):
            if not a:
                continue
            for j, b in enumerate(other.cs[:n - i]):
                if b:
                    out[i + j] = out[i + j] + a * b
        return FormalSeries(self.ring, out, n)

    __rmul__ = __mul__

    def valuation(self):
        for i, c in enumerate(self.cs):
            if c:
                return i
        return None

    def compose(self, inner):
        """self(inner) for an inner series with zero constant term."""
        assert not inner[0]
        n = min(self.order, inner.order)
        acc = FormalSeries(self.ring, [], n)
        for c in reversed(self.cs[:n]):
            acc = acc * inner + FormalSeries.const(self.ring, c, n)
        return acc

    def truncate(self, order):
        return FormalSeries(self.ring, self.cs[:order], order)

    def map_coeffs(self, ring, f):
        return FormalSeries(ring, [f(c) for c in self.cs], self.order)

    def __repr__(self):
        bits = ["(%s)t^%d" % (c, i) for i, c in enumerate(self.cs) if c]
        return "FormalSeries(%s + O(t^%d))" % (" + ".join(bits) or "0",
                                               self.order)


class Biv:
    """Bivariate jet: {(i, j): c} for monomials t1^i t2^j, total degree
    < order."""

    __slots__ = ("ring", "terms", "order")

    def __init__(self, ring, terms, order):
        self.ring = ring
        self.order = order
        self.terms = {e: c for e, c in terms.items()
                      if c and e[0] + e[1] < order}

    @classmethod
    def var(cls, ring, i, order):
        e = (1, 0) if i == 0 else (0, 1)
        return cls(ring, {e: ring.one}, order)

    @classmethod
    def const(cls, ring, c, order):
        c = ring.of(c)
        return cls(ring, {(0, 0): c} if c else {}, order)

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, self.ring.zero) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Biv(self.ring, out, min(self.order, other.order))

    def __neg__(self):
        return Biv(self.ring, {e: -c for e, c in self.terms.items()},
                   self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Biv):
            c = self.ring.of(other)
            return Biv(self.ring,
                       {e: v * c for e, v in self.terms.items()}, self.order)
        order = min(self.order, other.order)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                i, j = e1[0] + e2[0], e1[1] + e2[1]
                if i + j >= order:
                    continue
                s = out.get((i, j), self.ring.zero) + c1 * c2
                if s:
                    out[(i, j)] = s
                else:
                    out.pop((i, j), None)
        return Biv(self.ring, out, order)

    __rmul__ = __mul__

    def inverse(self):
        """1/self when the constant term is a unit."""
        c0 = self.terms.get((0, 0), self.ring.zero)
        if not c0:
            raise ZeroDivisionError("bivariate jet with no constant term")
        inv0 = self.ring.one / c0
        u = Biv(self.ring,
                {e: -c * inv0 for e, c in self.terms.items() if e != (0, 0)},
                self.order)
        acc = Biv.const(self.ring, inv0, self.order)
        pw = Biv.const(self.ring, inv0, self.order)
        for _ in range(self.order):
            pw = pw * u
            if not pw.terms:
                break
            acc = acc + pw
        return acc

    def subst(self, s1: FormalSeries, s2: FormalSeries) -> FormalSeries:
        """Substitute univariate jets (both with zero constant term)."""
        assert not s1[0] and not s2[0]
        order = min(self.order, s1.order, s2.order)
        maxi = max((e[0] for e in self.terms), default=0)
        maxj = max((e[1] for e in self.terms), default=0)
        p1 = _powers(s1, maxi, order)
        p2 = _powers(s2, maxj, order)
        acc = FormalSeries(self.ring, [], order)
        for (i, j), c in self.terms.items():
            term = FormalSeries.const(self.ring, c, order)
            if i:
                term = term * p1[i]
            if j:
                term = term * p2[j]
            acc = acc + term
        return acc

    def __repr__(self):
        bits = ["(%s)t1^%d t2^%d" % (c, e[0], e[1])
                for e, c in sorted(self.terms.items())]
        return "Biv(%s + O(deg %d))" % (" + ".join(bits) or "0", self.order)


def _powers(s, k, order):
    out = [FormalSeries.const(s.ring, s.ring.one, order)]
    for _ in range(k):
        out.append(out[-1] * s)
    return out


class Laurent:
    """Finite-precision Laurent series: t^val * (cs[0] + cs[1] t + ...),
    with `len(cs)` known terms; cs[0] != 0 unless the series is zero."""

    __slots__ = ("ring", "val", "cs")

    def __init__(self, ring, val, cs):
        self.ring = ring
        cs = list(cs)
        shift = 0
        while cs and not cs[0]:
            cs.pop(0)
            shift += 1
        self.val = val + shift
        self.cs = cs

    @classmethod
    def from_series(cls, s: FormalSeries):
        return cls(s.ring, 0, s.cs)

    def nterms(self):
        return len(self.cs)

    def __add__(self, other):
        if not isinstance(other, Laurent):
            other = Laurent(self.ring, 0, [self.ring.of(other)])
        if not self.cs:
            return other
        if not other.cs:
            return self
        v = min(self.val, other.val)
        end = min(self.val + len(self.cs), other.val + len(other.cs))
        n = end - v
        z = self.ring.zero
        out = [z] * n
        for i, c in enumerate(self.cs):
            k = self.val + i - v
            if 0 <= k < n:
                out[k] = out[k] + c
        for i, c in enumerate(other.cs):
            k = other.val + i - v
            if 0 <= k < n:
                out[k] = out[k] + c
        return Laurent(self.ring, v, out)

    __radd__ = __add__

    def __neg__(self):
        return Laurent(self.ring, self.val, [-c for c in self.cs])

    def __sub__(self, other):
        if not isinstance(other, Laurent):
            other = Laurent(self.ring, 0, [self.ring.of(other)])
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Laurent):
            c = self.ring.of(other)
            return Laurent(self.ring, self.val, [a * c for a in self.cs])
        if not self.cs or not other.cs:
            return Laurent(self.ring, 0, [])
        n = min(len(self.cs), len(other.cs))
        z = self.ring.zero
        out = [z] * n
        for i, a in enumerate(self.cs[:n]):
            if not a:
                continue
            for j, b in enumerate(other.cs[:n - i]):
                if b:
                    out[i + j] = out[i + j] + a * b
        return Laurent(self.ring, self.val + other.val, out)

    __rmul__ = __mul__

    def inverse(self):
        if not self.cs:
            raise ZeroDivisionError("inverse of zero Laurent series")
        c0 = self.cs[0]
        inv0 = self.ring.one / c0
        n = len(self.cs)
        # Newton-free direct recursion for the reciprocal of 1 + u.
        out = [inv0] + [self.ring.zero] * (n - 1)
        for k in range(1, n):
            acc = self.ring.zero
            for i in range(1, k + 1):
                acc = acc + self.cs[i] * out[k - i]
            out[k] = -acc * inv0
        return Laurent(self.ring, -self.val, out)

    def __truediv__(self, other):
        if not isinstance(other, Laurent):
            other = Laurent(self.ring, 0, [self.ring.of(other)])
        return self * other.inverse()

    def coeff(self, k):
        i = k - self.val
        if 0 <= i < len(self.cs):
            return self.cs[i]
        return self.ring.zero

    def map_coeffs(self, ring, f):
        return Laurent(ring, self.val, [f(c) for c in self.cs])

    def __repr__(self):
        bits = ["(%s)t^%d" % (c, self.val + i)
                for i, c in enumerate(self.cs) if c]
        return "Laurent(%s)" % (" + ".join(bits) or "0")


def poly_eval_laurent(poly, arg: Laurent) -> Laurent:
    acc = Laurent(arg.ring, 0, [])
    for c in reversed(poly.cs):
        acc = acc * arg + Laurent(arg.ring, 0, [arg.ring.of(c)])
    return acc


def ratfunc_eval_laurent(rf, arg: Laurent) -> Laurent:
    return poly_eval_laurent(rf.num, arg) / poly_eval_laurent(rf.den, arg)


# -- curve-specific series ---------------------------------------------------

def formal_w(curve, order):
    """w(t) = t^3 (1 + ...) solving w = t^3 + a4 t w^2 + a6 w^3."""
    ring = curve.ring
    t = FormalSeries.var(ring, order)
    t3 = t * t * t
    w = t3
    for _ in range(order):
        w2 = w * w
        nxt = t3 + curve.a4 * t * w2 + curve.a6 * w2 * w
        if nxt == w:
            w = nxt
            break
        w = nxt
    return w


def formal_xy(curve, order):
    """Laurent expansions x(t) = t^-2 + ..., y(t) = -t^-3 + ... ."""
    w = formal_w(curve, order + 5)
    lw = Laurent(curve.ring, 0, w.cs)
    t = Laurent(curve.ring, 1, [curve.ring.one] + [curve.ring.zero] * (order + 3))
    x = t / lw
    y = -lw.inverse()
    return x, y


def formal_group_law(curve, order):
    """F(t1, t2) with P1 + P2 having parameter F; F = t1 + t2 + O(deg 2)."""
    ring = curve.ring
    w = formal_w(curve, order + 3)
    t1 = Biv.var(ring, 0, order)
    t2 = Biv.var(ring, 1, order)
    # lambda = (w(t2) - w(t1)) / (t2 - t1), computed coefficientwise.
    lam = Biv(ring, {}, order)
    for n, c in enumerate(w.cs):
        if not c or n == 0:
            continue
        # (t2^n - t1^n)/(t2 - t1) = sum_{a+b=n-1} t1^a t2^b
        for a in range(n):
            if a + (n - 1 - a) < order:
                lam = lam + Biv(ring, {(a, n - 1 - a): c}, order)
    w1 = Biv(ring, {}, order)
    for n, c in enumerate(w.cs):
        if c and n < order:
            w1 = w1 + Biv(ring, {(n, 0): c}, order)
    nu = w1 - lam * t1
    a4 = curve.a4
    a6 = curve.a6
    lam2 = lam * lam
    lam3 = lam2 * lam
    c3 = Biv.const(ring, ring.one, order) + a4 * lam2 + a6 * lam3
    c2 = 2 * a4 * lam * nu + 3 * a6 * lam2 * nu
    # third chord intersection has t = -(t1 + t2) - c2/c3; negate for the sum
    return t1 + t2 + c2 * c3.inverse()


def formal_add(curve, s1: FormalSeries, s2: FormalSeries, order=None):
    """Group law applied to two series arguments (zero constant terms)."""
    order = order or min(s1.order, s2.order)
    law = formal_group_law(curve, order)
    return law.subst(s1.truncate(order), s2.truncate(order))


def formal_mul(curve, n, order):
    """[n](t) = n t + ... by repeated formal addition."""
    n = int(n)
    ring = curve.ring
    t = FormalSeries.var(ring, order)
    if n == 0:
        return FormalSeries(ring, [], order)
    neg = n < 0
    n = abs(n)
    law = formal_group_law(curve, order)
    acc = t
    for _ in range(n - 1):
        acc = law.subst(t, acc)
    if neg:
        acc = -acc
    return acc


def formal_endo(curve, rational_map, order):
    """[alpha](t) from the endomorphism's rational map: the t-expansion of
    -X(x(t)) / (y(t) G(x(t))); leading coefficient is alpha."""
    x_map = rational_map.x_map
    ring = x_map.ring
    x, y = formal_xy(curve, order + 6)
    if x.ring != ring:
        x = x.map_coeffs(ring, ring.of)
        y = y.map_coeffs(ring, ring.of)
    xs = ratfunc_eval_laurent(x_map, x)
    g = ratfunc_eval_laurent(rational_map.y_twist, x)
    tprime = -xs / (y * g)
    assert tprime.val == 1, "endomorphism series must vanish to order 1"
    cs = [ring.zero] + tprime.cs
    return FormalSeries(ring, cs, len(cs))
