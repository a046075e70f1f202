"""Generic exact polynomial arithmetic.

Dense univariate polynomials and reduced rational functions over any exact
coefficient field, plus a small sparse four-variable polynomial type used by
the derivative recursion. Coefficient fields are represented by lightweight
ring adapters exposing `zero`, `one`, and `of(v)`; the elements themselves
carry the arithmetic through operator overloading, so the same code runs over
the rationals, imaginary quadratic fields, cyclotomic fields, and prime
fields.

Nothing here knows about curves or heights; keep it that way.
"""

from __future__ import annotations

from gmpy2 import mpq, mpz

from ._rat import rational


class RationalRing:
    """Ring adapter for the exact rationals (gmpy2.mpq elements)."""

    zero = mpq(0)
    one = mpq(1)

    @staticmethod
    def of(v):
        return rational(v)

    @staticmethod
    def strip_content(cs):
        import gmpy2
        g, l = mpz(0), mpz(1)
        for c in cs:
            if c:
                g = gmpy2.gcd(g, c.numerator)
                l = l // gmpy2.gcd(l, c.denominator) * c.denominator
        if g <= 1 and l == 1:
            return list(cs)
        scale = mpq(l, g)
        return [c * scale for c in cs]

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalRing)

    def __hash__(self):
        return hash("QQ")


QQ = RationalRing()


def _strip(cs):
    n = len(cs)
    while n and not cs[n - 1]:
        n -= 1
    del cs[n:]
    return cs


class Poly:
    """Dense univariate polynomial; coefficient list cs[i] multiplies x^i."""

    __slots__ = ("ring", "cs")

    def __init__(self, ring, cs=(), trusted=False):
        self.ring = ring
        if trusted:
            self.cs = _strip(list(cs))
        else:
            self.cs = _strip([ring.of(c) for c in cs])

    @classmethod
    def const(cls, ring, c):
        return cls(ring, [c])

    @classmethod
    def x(cls, ring):
        return cls(ring, [ring.zero, ring.one], trusted=True)

    # -- basic structure -------------------------------------------------

    @property
    def degree(self):
        return len(self.cs) - 1

    def is_zero(self):
        return not self.cs

    def __bool__(self):
        return bool(self.cs)

    def leading(self):
        if not self.cs:
            return self.ring.zero
        return self.cs[-1]

    def __getitem__(self, i):
        if 0 <= i < len(self.cs):
            return self.cs[i]
        return self.ring.zero

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.cs == other.cs
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self.cs))

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        return Poly(self.ring, [self.ring.of(other)])

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.cs, other.cs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(self.ring, out, trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, [-c for c in self.cs], trusted=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = self.ring.of(other)
            return Poly(self.ring, [a * c for a in self.cs], trusted=True)
        a, b = self.cs, other.cs
        if not a or not b:
            return Poly(self.ring, [], trusted=True)
        z = self.ring.zero
        out = [z] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
        return Poly(self.ring, out, trusted=True)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative exponent")
        r = Poly(self.ring, [self.ring.one], trusted=True)
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def divmod_poly(self, other):
        """Quotient and remainder; coefficient domain must be a field."""
        if other.is_zero():
            raise ZeroDivisionError("poly division by zero")
        r = list(self.cs)
        d = other.degree
        lead_inv = self.ring.one / other.cs[-1]
        q = [self.ring.zero] * max(0, len(r) - d)
        for i in range(len(r) - d - 1, -1, -1):
            c = r[i + d] * lead_inv
            if not c:
                continue
            q[i] = c
            for j, oc in enumerate(other.cs):
                r[i + j] = r[i + j] - c * oc
        return (Poly(self.ring, q, trusted=True),
                Poly(self.ring, r[:d], trusted=True))

    def __mod__(self, other):
        return self.divmod_poly(other)[1]

    def __floordiv__(self, other):
        return self.divmod_poly(other)[0]

    def monic(self):
        if self.is_zero():
            return self
        inv = self.ring.one / self.cs[-1]
        return Poly(self.ring, [c * inv for c in self.cs], trusted=True)

    def gcd(self, other):
        # remainders are content-stripped when the ring knows how, which
        # keeps the Euclidean sequence from exploding over Q and Q(tau)
        strip = getattr(self.ring, "strip_content", None)
        a, b = self, other
        while not b.is_zero():
            r = a % b
            if strip is not None and r.cs:
                r = Poly(self.ring, strip(r.cs), trusted=True)
            a, b = b, r
        return a.monic() if not a.is_zero() else a

    def xgcd(self, other):
        """Extended gcd: returns (g, u, v) with u*self + v*other = g, g monic."""
        ring = self.ring
        zero = Poly(ring, [], trusted=True)
        one = Poly(ring, [ring.one], trusted=True)
        r0, r1 = self, other
        s0, s1 = one, zero
        t0, t1 = zero, one
        while not r1.is_zero():
            q, r = r0.divmod_poly(r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if r0.is_zero():
            return r0, s0, t0
        inv = ring.one / r0.cs[-1]
        return r0 * inv, s0 * inv, t0 * inv

    def powmod(self, e, modulus):
        """self**e reduced mod modulus, by square and multiply."""
        if e < 0:
            raise ValueError("negative exponent")
        ring = self.ring
        r = Poly(ring, [ring.one], trusted=True)
        b = self % modulus
        while e:
            if e & 1:
                r = (r * b) % modulus
            b = (b * b) % modulus
            e >>= 1
        return r

    def derivative(self):
        return Poly(self.ring,
                    [self.ring.of(i) * c for i, c in enumerate(self.cs)][1:],
                    trusted=True)

    def eval(self, x):
        """Horner evaluation; x may live in an extension of the ring."""
        if not self.cs:
            return self.ring.zero
        acc = self.cs[-1]
        for c in reversed(self.cs[:-1]):
            acc = acc * x + c
        return acc

    def compose(self, other):
        """self(other) for a polynomial argument."""
        out = Poly(self.ring, [], trusted=True)
        for c in reversed(self.cs):
            out = out * other + Poly(self.ring, [c], trusted=True)
        return out

    def _compose_num(self, g: "RatFunc") -> "Poly":
        """Numerator of self(g) over the denominator g.den**self.degree."""
        if not self.cs:
            return Poly(self.ring, [], trusted=True)
        num = Poly(self.ring, [self.cs[-1]], trusted=True)
        dpow = Poly(self.ring, [self.ring.one], trusted=True)
        for c in reversed(self.cs[:-1]):
            dpow = dpow * g.den
            num = num * g.num + dpow * c
        return num

    def compose_rat(self, g: "RatFunc", reduce=True) -> "RatFunc":
        """self(g) for a rational-function argument, by Horner."""
        if self.degree < 1:
            return RatFunc(self, reduce=False)
        return RatFunc(self._compose_num(g), g.den ** self.degree,
                       reduce=reduce)

    def scale_x(self, a):
        """p(a*x): substitute x -> a*x for a ring scalar a."""
        a = self.ring.of(a)
        out, pw = [], self.ring.one
        for c in self.cs:
            out.append(c * pw)
            pw = pw * a
        return Poly(self.ring, out, trusted=True)

    def negate_x(self):
        return Poly(self.ring,
                    [(-c if i & 1 else c) for i, c in enumerate(self.cs)],
                    trusted=True)

    def resultant(self, other):
        """Resultant, by the Euclidean remainder sequence over a field."""
        ring = self.ring
        a, b = self, other
        if a.is_zero() or b.is_zero():
            return ring.zero
        sign = 1
        acc = ring.one
        while b.degree > 0:
            r = a % b
            if r.is_zero():
                return ring.zero
            # res(a,b) = (-1)^(da*db) * lc(b)^(da - dr) * res(b, r)
            if (a.degree * b.degree) & 1:
                sign = -sign
            acc = acc * b.leading() ** (a.degree - r.degree)
            a, b = b, r
        # b is a nonzero constant
        acc = acc * b.cs[0] ** a.degree
        return acc if sign == 1 else -acc

    def map_coeffs(self, ring, f):
        """New polynomial over `ring` with coefficients f(c)."""
        return Poly(ring, [f(c) for c in self.cs])

    def __repr__(self):
        if not self.cs:
            return "Poly(0)"
        bits = []
        for i, c in enumerate(self.cs):
            if c:
                bits.append("(%s)*x^%d" % (c, i))
        return "Poly(" + " + ".join(bits) + ")"


def content_primitive(p: Poly):
    """For a rational-coefficient polynomial: (content, primitive int coeffs).

    content is a positive mpq, the primitive part has integer coefficients
    with gcd 1 and the same sign pattern: p = content * primitive.
    Zero polynomial returns (0, []).
    """
    if p.is_zero():
        return mpq(0), []
    den = mpz(1)
    for c in p.cs:
        den = den * mpq(c).denominator // mpz(gcd_int(den, mpq(c).denominator))
    ints = [mpz(mpq(c) * den) for c in p.cs]
    g = mpz(0)
    for v in ints:
        g = gcd_int(g, v)
    return mpq(g, den), [v // g for v in ints]


def gcd_int(a, b):
    import gmpy2
    return gmpy2.gcd(mpz(a), mpz(b))


class RatFunc:
    """Reduced rational function num/den over a field, den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly = None, reduce=True):
        if den is None:
            den = Poly(num.ring, [num.ring.one], trusted=True)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if reduce:
            g = num.gcd(den)
            if g.degree > 0:
                num = num // g
                den = den // g
        if den.leading() != num.ring.one:
            inv = num.ring.one / den.leading()
            num = num * inv
            den = den * inv
        self.num = num
        self.den = den

    @classmethod
    def const(cls, ring, c):
        return cls(Poly(ring, [c]), reduce=False)

    @classmethod
    def x(cls, ring):
        return cls(Poly.x(ring), reduce=False)

    @property
    def ring(self):
        return self.num.ring

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, Poly):
            return RatFunc(other, reduce=False)
        return RatFunc(Poly(self.ring, [self.ring.of(other)]), reduce=False)

    def __add__(self, other):
        other = self._coerce(other)
        return RatFunc(self.num * other.den + other.num * self.den,
                       self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, e):
        if e < 0:
            return RatFunc(self.den ** (-e), self.num ** (-e))
        return RatFunc(self.num ** e, self.den ** e, reduce=False)

    def eval(self, x):
        """Value at x; raises ZeroDivisionError at a pole."""
        dv = self.den.eval(x)
        if not dv:
            raise ZeroDivisionError("pole of rational function")
        return self.num.eval(x) / dv

    def derivative(self):
        n, d = self.num, self.den
        return RatFunc(n.derivative() * d - n * d.derivative(), d * d)

    def scale_x(self, a):
        return RatFunc(self.num.scale_x(a), self.den.scale_x(a))

    def negate_x(self):
        return RatFunc(self.num.negate_x(), self.den.negate_x())

    def compose(self, g: "RatFunc", reduce=True) -> "RatFunc":
        """self(g(x)); the denominator of g never vanishes identically here.

        Callers composing x-maps of isogenies can pass reduce=False: there
        the composite is in lowest terms already (degrees multiply), and the
        generic reduction is by far the dominant cost.
        """
        a, b = self.num.degree, self.den.degree
        pn = self.num._compose_num(g)
        qn = self.den._compose_num(g)
        if a >= b:
            return RatFunc(pn, qn * g.den ** (a - b), reduce=reduce)
        return RatFunc(pn * g.den ** (b - a), qn, reduce=reduce)

    def __repr__(self):
        return "RatFunc(%r / %r)" % (self.num, self.den)


class MPoly4:
    """Sparse polynomial in four variables with exact rational coefficients.

    Terms map exponent 4-tuples to mpq. Only the handful of operations the
    derivative recursion needs are provided.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for e, c in terms.items():
                c = rational(c)
                if c:
                    self.terms[tuple(e)] = c

    @classmethod
    def var(cls, i):
        e = [0, 0, 0, 0]
        e[i] = 1
        return cls({tuple(e): 1})

    @classmethod
    def const(cls, c):
        return cls({(0, 0, 0, 0): c})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, MPoly4) and self.terms == other.terms

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, mpq(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        r = MPoly4()
        r.terms = out
        return r

    def __neg__(self):
        r = MPoly4()
        r.terms = {e: -c for e, c in self.terms.items()}
        return r

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, MPoly4):
            out = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = (e1[0] + e2[0], e1[1] + e2[1],
                         e1[2] + e2[2], e1[3] + e2[3])
                    s = out.get(e, mpq(0)) + c1 * c2
                    if s:
                        out[e] = s
                    else:
                        out.pop(e, None)
            r = MPoly4()
            r.terms = out
            return r
        c = rational(other)
        r = MPoly4()
        if c:
            r.terms = {e: v * c for e, v in self.terms.items()}
        return r

    __rmul__ = __mul__

    def partial(self, i):
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = c * e[i]
        r = MPoly4()
        r.terms = out
        return r

    def eval4(self, vals):
        """Evaluate at a 4-tuple of elements of any ring containing QQ."""
        if not self.terms:
            return vals[0] - vals[0]
        maxe = [0, 0, 0, 0]
        for e in self.terms:
            for i in range(4):
                if e[i] > maxe[i]:
                    maxe[i] = e[i]
        pows = []
        for i in range(4):
            tab = [None] * (maxe[i] + 1)
            acc = None
            for k in range(maxe[i] + 1):
                if k == 0:
                    tab[0] = None  # sentinel: exponent zero contributes nothing
                elif k == 1:
                    acc = vals[i]
                    tab[1] = acc
                else:
                    acc = acc * vals[i]
                    tab[k] = acc
            pows.append(tab)
        total = None
        for e, c in self.terms.items():
            term = None
            for i in range(4):
                if e[i]:
                    term = pows[i][e[i]] if term is None else term * pows[i][e[i]]
            term = c if term is None else c * term
            total = term if total is None else total + term
        return total

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def num_terms(self):
        return len(self.terms)

    def coeff(self, e):
        return self.terms.get(tuple(e), mpq(0))

    def __repr__(self):
        if not self.terms:
            return "MPoly4(0)"
        bits = []
        for e in sorted(self.terms):
            bits.append("%s*X%s" % (self.terms[e], list(e)))
        return "MPoly4(" + " + ".join(bits) + ")"
