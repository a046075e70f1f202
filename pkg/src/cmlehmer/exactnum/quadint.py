"""Imaginary quadratic integers for the nine class-number-one orders.

Elements are written a + b*tau where tau = sqrt(disc)/2 when disc = 0 mod 4
and tau = (1 + sqrt(disc))/2 when disc = 1 mod 4, so (1, tau) is always an
integral basis of the maximal order. Everything is exact; the only numeric
method is embed(), which hands back an mpmath complex at caller precision.
"""

from __future__ import annotations

import json

import gmpy2
import mpmath
from gmpy2 import mpq, mpz
from sympy.ntheory.residue_ntheory import sqrt_mod

from ..errors import NonIntegral, NotSplit, UnsupportedCM
from .._rat import is_square, isqrt

#: Discriminants of the imaginary quadratic fields with class number one.
CLASS_NUMBER_ONE_DISCS = (-3, -4, -7, -8, -11, -19, -43, -67, -163)


def _check_disc(disc):
    if disc not in CLASS_NUMBER_ONE_DISCS:
        raise UnsupportedCM("discriminant %r is not in the class-number-one "
                            "list %r" % (disc, CLASS_NUMBER_ONE_DISCS))


class QuadInt:
    """Element a + b*tau of the maximal order of Q(sqrt(disc))."""

    __slots__ = ("a", "b", "disc")

    def __init__(self, a, b, disc):
        _check_disc(disc)
        self.a = mpz(a)
        self.b = mpz(b)
        self.disc = disc

    # -- ring structure ---------------------------------------------------

    def _same(self, other):
        if isinstance(other, QuadInt):
            if other.disc != self.disc:
                raise ValueError("mixed discriminants %d, %d"
                                 % (self.disc, other.disc))
            return other
        if isinstance(other, int) or isinstance(other, type(mpz(0))):
            return QuadInt(other, 0, self.disc)
        return NotImplemented

    def __add__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadInt(self.a + other.a, self.b + other.b, self.disc)

    __radd__ = __add__

    def __neg__(self):
        return QuadInt(-self.a, -self.b, self.disc)

    def __sub__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, c, d = self.a, self.b, other.a, other.b
        if self.disc % 4 == 0:
            # tau^2 = disc/4
            return QuadInt(a * c + b * d * (self.disc // 4),
                           a * d + b * c, self.disc)
        # tau^2 = tau + (disc - 1)/4
        return QuadInt(a * c + b * d * ((self.disc - 1) // 4),
                       a * d + b * c + b * d, self.disc)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative power of a quadratic integer")
        r = QuadInt(1, 0, self.disc)
        base = self
        while e:
            if e & 1:
                r = r * base
            base = base * base
            e >>= 1
        return r

    def __eq__(self, other):
        if isinstance(other, QuadInt):
            return (self.a == other.a and self.b == other.b
                    and self.disc == other.disc)
        if isinstance(other, (int, type(mpz(0)))):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        return hash((int(self.a), int(self.b), self.disc))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    # -- invariants -------------------------------------------------------

    def conj(self):
        if self.disc % 4 == 0:
            return QuadInt(self.a, -self.b, self.disc)
        return QuadInt(self.a + self.b, -self.b, self.disc)

    def norm(self):
        if self.disc % 4 == 0:
            return self.a * self.a + (-self.disc // 4) * self.b * self.b
        return (self.a * self.a + self.a * self.b
                + ((1 - self.disc) // 4) * self.b * self.b)

    def trace(self):
        if self.disc % 4 == 0:
            return 2 * self.a
        return 2 * self.a + self.b

    def is_unit(self):
        return self.norm() == 1

    def exact_div(self, other):
        """self / other in the order; raises NonIntegral if not divisible."""
        other = self._same(other)
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero quadratic integer")
        num = self * other.conj()
        if num.a % n or num.b % n:
            raise NonIntegral("%r does not divide %r" % (other, self))
        return QuadInt(num.a // n, num.b // n, self.disc)

    def divides(self, other):
        other = self._same(other)
        n = self.norm()
        if n == 0:
            return not other
        num = other * self.conj()
        return num.a % n == 0 and num.b % n == 0

    def embed(self, prec=None):
        """Complex value under the embedding with Im(sqrt(disc)) > 0."""
        with mpmath.workprec(prec or mpmath.mp.prec):
            s = mpmath.sqrt(mpmath.mpf(-self.disc))
            if self.disc % 4 == 0:
                tau = mpmath.mpc(0, s / 2)
            else:
                tau = mpmath.mpc(mpmath.mpf(1) / 2, s / 2)
            return self.a + self.b * tau

    def to_json(self):
        return {"a": str(self.a), "b": str(self.b), "disc": self.disc}

    @classmethod
    def from_json(cls, d):
        if isinstance(d, str):
            d = json.loads(d)
        return cls(int(d["a"]), int(d["b"]), int(d["disc"]))

    def __repr__(self):
        return "QuadInt(%s, %s, disc=%d)" % (self.a, self.b, self.disc)


def units(disc):
    """The unit group of the order, as a tuple of QuadInt."""
    _check_disc(disc)
    if disc == -4:
        return (QuadInt(1, 0, -4), QuadInt(0, 1, -4),
                QuadInt(-1, 0, -4), QuadInt(0, -1, -4))
    if disc == -3:
        # powers of the sixth root of unity tau
        out = [QuadInt(1, 0, -3)]
        z6 = QuadInt(0, 1, -3)
        for _ in range(5):
            out.append(out[-1] * z6)
        return tuple(out)
    return (QuadInt(1, 0, disc), QuadInt(-1, 0, disc))


def canonical_associate(x: QuadInt) -> QuadInt:
    """Deterministic representative among the associates of x:
    the lexicographically largest (a, b) pair."""
    best = None
    for u in units(x.disc):
        c = x * u
        key = (c.a, c.b)
        if best is None or key > best[0]:
            best = (key, c)
    return best[1]


def cornacchia(p, disc):
    """A quadratic integer of norm p, for p a rational prime split in the
    order of discriminant disc. Raises NotSplit for inert or ramified p.

    Classic Cornacchia descent: a square root of disc mod (4)p starts a
    Euclidean remainder sequence, and the first remainder below the target
    bound yields the representation when one exists.
    """
    _check_disc(disc)
    p = mpz(p)
    if p < 2:
        raise ValueError("p must be a prime, got %s" % p)
    if disc % p == 0:
        raise NotSplit("p=%s ramifies in disc=%d" % (p, disc))

    if p < 50:
        # tiny primes: direct search over b is simpler than Cornacchia edge
        # cases (p = 2 in particular has no odd square root step)
        sol = _small_norm_search(p, disc)
        if sol is None:
            raise NotSplit("p=%s is inert in disc=%d" % (p, disc))
        return canonical_associate(sol)

    if disc % 4 == 0:
        d = -disc // 4
        r = sqrt_mod((-d) % p, p)
        if r is None:
            raise NotSplit("p=%s is inert in disc=%d" % (p, disc))
        r = mpz(r)
        if 2 * r < p:
            r = p - r
        a0, a1 = p, r
        lim = isqrt(p)
        while a1 > lim:
            a0, a1 = a1, a0 % a1
        rem = p - a1 * a1
        if rem % d:
            raise NotSplit("p=%s is inert in disc=%d" % (p, disc))
        bb = rem // d
        if not is_square(bb):
            raise NotSplit("p=%s is inert in disc=%d" % (p, disc))
        return canonical_associate(QuadInt(a1, isqrt(bb), disc))

    # disc = 1 mod 4: solve x^2 + |disc| y^2 = 4p with x = y mod 2
    r = sqrt_mod(disc % p, p)
    if r is None:
        raise NotSplit("p=%s is inert in disc=%d" % (p, disc))
    r = mpz(r)
    for cand in (r, p - r):
        x0 = cand if cand % 2 == 1 else cand + p
        # x0 odd, x0^2 = disc mod 4p
        a0, a1 = 2 * p, x0 % (2 * p)
        lim = 2 * isqrt(p)
        while a1 > lim:
            a0, a1 = a1, a0 % a1
        rem = 4 * p - a1 * a1
        if rem % (-disc):
            continue
        bb = rem // (-disc)
        if not is_square(bb):
            continue
        y = isqrt(bb)
        if (a1 - y) % 2:
            continue
        return canonical_associate(QuadInt((a1 - y) // 2, y, disc))
    raise NotSplit("p=%s is inert in disc=%d" % (p, disc))


def _small_norm_search(p, disc):
    if disc % 4 == 0:
        d = -disc // 4
        b = 0
        while d * b * b <= p:
            rest = p - d * b * b
            if is_square(rest):
                return QuadInt(isqrt(rest), b, disc)
            b += 1
        return None
    q = (1 - disc) // 4
    b = 0
    while (-disc) * b * b <= 4 * p:
        # a^2 + a b + q b^2 = p, solve the quadratic in a
        delta = b * b - 4 * (q * b * b - p)
        if delta >= 0 and is_square(delta):
            num = -b + isqrt(delta)
            if num % 2 == 0:
                return QuadInt(num // 2, b, disc)
        b += 1
    return None


def norm_p_candidates(p, disc):
    """All quadratic integers of norm p: associates of the Cornacchia
    solution and of its conjugate, deduplicated."""
    base = cornacchia(p, disc)
    seen = {}
    for g in (base, base.conj()):
        for u in units(disc):
            c = g * u
            seen[(int(c.a), int(c.b))] = c
    return list(seen.values())


def ideal_generator(elements):
    """Generator of the ideal spanned by the given quadratic integers.

    Works in every class-number-one order, Euclidean or not: the ideal is a
    rank-2 lattice in the (1, tau) basis, and its shortest nonzero vector
    under the norm form is a generator (any x = g*y in g*O has
    N(x) = N(g)N(y) >= N(g), with equality exactly at unit y). Lagrange
    reduction of the 2x2 HNF basis finds that vector exactly.
    """
    elements = [e for e in elements if e]
    if not elements:
        raise ValueError("zero ideal has no generator")
    disc = elements[0].disc
    rows = []
    for e in elements:
        if e.disc != disc:
            raise ValueError("mixed discriminants")
        rows.append([e.a, e.b])
        et = e * _tau(disc)
        rows.append([et.a, et.b])
    from .._linalg import hnf_with_transform
    h, _ = hnf_with_transform(rows)
    basis = [r for r in h if any(r)]
    if len(basis) == 1:
        # ideal is generated by a rational multiple of one vector only when
        # that vector spans; a nonzero ideal always has rank 2, so this means
        # duplicates reduced out and we re-span with tau
        g = QuadInt(basis[0][0], basis[0][1], disc)
        gt = g * _tau(disc)
        basis = [[g.a, g.b], [gt.a, gt.b]]
        h, _ = hnf_with_transform(basis)
        basis = [r for r in h if any(r)]
    v1 = QuadInt(basis[0][0], basis[0][1], disc)
    v2 = QuadInt(basis[1][0], basis[1][1], disc)

    def bil(u, v):
        return ((u + v).norm() - u.norm() - v.norm())  # 2*B(u,v)

    while True:
        if v2.norm() < v1.norm():
            v1, v2 = v2, v1
        n1 = v1.norm()
        t2 = bil(v1, v2)
        # round(t2 / (2 n1)) with ties toward zero: a tie means 2|B| = N(v1),
        # already Lagrange-reduced, and rounding away would oscillate forever
        mag = (abs(t2) + n1 - 1) // (2 * n1)
        t = mag if t2 >= 0 else -mag
        if t == 0:
            break
        v2 = v2 - QuadInt(t, 0, disc) * v1
    g = canonical_associate(v1)
    for e in elements:
        assert g.divides(e), "ideal reduction produced a non-divisor"
    return g


def quad_gcd(x, y):
    """A gcd of two quadratic integers (canonical associate)."""
    if not x:
        return canonical_associate(y)
    if not y:
        return canonical_associate(x)
    return ideal_generator([x, y])


def _tau(disc):
    return QuadInt(0, 1, disc)


def pi_adic_valuation(coords, pi: QuadInt, max_iter=10_000):
    """Valuation at the prime (pi) of a field element given by rational
    coordinates (a, b) in the (1, tau) basis. pi must have prime norm p,
    split case (so v(p) = 1 at this place).

    Returns an int, or None for the zero element.
    """
    a, b = mpq(coords[0]), mpq(coords[1])
    if not a and not b:
        return None
    p = pi.norm()
    if p < 2:
        raise ValueError("pi must have prime norm")
    # clear p from denominators: v(x) = v(x * p^k) - k
    k = 0
    for q in (a, b):
        den = q.denominator
        kk = 0
        while den % p == 0:
            den //= p
            kk += 1
        k = max(k, kk)
    a *= p ** k
    b *= p ** k
    shift = -k
    pib = pi.conj()
    v = 0
    for _ in range(max_iter):
        # x * conj(pi) / p stays p-integral exactly when pi divides x
        na, nb = _mul_coords(a, b, mpq(pib.a), mpq(pib.b), pi.disc)
        na, nb = na / p, nb / p
        if na.denominator % p == 0 or nb.denominator % p == 0:
            return v + shift
        a, b = na, nb
        v += 1
    raise RuntimeError("valuation did not terminate")


def _mul_coords(a, b, c, d, disc):
    """(a + b*tau)(c + d*tau) in (1, tau) coordinates; works over mpq."""
    if disc % 4 == 0:
        return a * c + b * d * (disc // 4), a * d + b * c
    return a * c + b * d * ((disc - 1) // 4), a * d + b * c + b * d


def quadint_valuation(x: QuadInt, pi: QuadInt):
    v = pi_adic_valuation((mpq(x.a), mpq(x.b)), pi)
    return v


class QuadElt:
    """Element of the imaginary quadratic field: a + b*tau with a, b in Q."""

    __slots__ = ("a", "b", "disc")

    def __init__(self, a, b, disc):
        self.a = mpq(a)
        self.b = mpq(b)
        self.disc = disc

    def _coerce(self, other):
        if isinstance(other, QuadElt):
            if other.disc != self.disc:
                raise ValueError("mixed discriminants")
            return other
        if isinstance(other, QuadInt):
            if other.disc != self.disc:
                raise ValueError("mixed discriminants")
            return QuadElt(other.a, other.b, self.disc)
        try:
            q = mpq(other)
        except TypeError:
            return NotImplemented
        return QuadElt(q, 0, self.disc)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadElt(self.a + other.a, self.b + other.b, self.disc)

    __radd__ = __add__

    def __neg__(self):
        return QuadElt(-self.a, -self.b, self.disc)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadElt(self.a - other.a, self.b - other.b, self.disc)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = _mul_coords(self.a, self.b, other.a, other.b, self.disc)
        return QuadElt(a, b, self.disc)

    __rmul__ = __mul__

    def conj(self):
        if self.disc % 4 == 0:
            return QuadElt(self.a, -self.b, self.disc)
        return QuadElt(self.a + self.b, -self.b, self.disc)

    def norm(self):
        if self.disc % 4 == 0:
            return self.a * self.a + mpq(-self.disc, 4) * self.b * self.b
        return (self.a * self.a + self.a * self.b
                + mpq(1 - self.disc, 4) * self.b * self.b)

    def inverse(self):
        n = self.norm()
        if not n:
            raise ZeroDivisionError("inverse of zero")
        c = self.conj()
        return QuadElt(c.a / n, c.b / n, self.disc)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b, self.disc))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def is_integral(self):
        return self.a.denominator == 1 and self.b.denominator == 1

    def to_quadint(self):
        if not self.is_integral():
            raise NonIntegral("%r is not integral" % (self,))
        return QuadInt(self.a.numerator, self.b.numerator, self.disc)

    def embed(self, prec=None):
        with mpmath.workprec(prec or mpmath.mp.prec):
            s = mpmath.sqrt(mpmath.mpf(-self.disc))
            if self.disc % 4 == 0:
                tau = mpmath.mpc(0, s / 2)
            else:
                tau = mpmath.mpc(mpmath.mpf(1) / 2, s / 2)
            return (mpmath.mpf(self.a.numerator) / self.a.denominator
                    + (mpmath.mpf(self.b.numerator) / self.b.denominator) * tau)

    def valuation(self, pi: QuadInt):
        """Valuation at the split prime (pi); None for the zero element."""
        return pi_adic_valuation((self.a, self.b), pi)

    def __repr__(self):
        return "QuadElt(%s + %s*tau, disc=%d)" % (self.a, self.b, self.disc)


class QuadField:
    """Ring adapter (for Poly) over the imaginary quadratic field."""

    def __init__(self, disc):
        _check_disc(disc)
        self.disc = disc
        self.zero = QuadElt(0, 0, disc)
        self.one = QuadElt(1, 0, disc)
        self.tau = QuadElt(0, 1, disc)

    def of(self, v):
        if isinstance(v, QuadElt):
            if v.disc != self.disc:
                raise ValueError("mixed discriminants")
            return v
        if isinstance(v, QuadInt):
            if v.disc != self.disc:
                raise ValueError("mixed discriminants")
            return QuadElt(v.a, v.b, self.disc)
        if isinstance(v, tuple):
            return QuadElt(v[0], v[1], self.disc)
        return QuadElt(mpq(v), 0, self.disc)

    def strip_content(self, cs):
        """Divide through by the rational content of all coordinates; keeps
        Euclidean remainder sequences over the field from blowing up."""
        g, l = mpz(0), mpz(1)
        for c in cs:
            for q in (c.a, c.b):
                if q:
                    g = gmpy2.gcd(g, q.numerator)
                    l = l // gmpy2.gcd(l, q.denominator) * q.denominator
        if g <= 1 and l == 1:
            return list(cs)
        s = mpq(l, g)
        return [QuadElt(c.a * s, c.b * s, self.disc) for c in cs]

    def __eq__(self, other):
        return isinstance(other, QuadField) and other.disc == self.disc

    def __hash__(self):
        return hash(("QuadField", self.disc))

    def __repr__(self):
        return "QuadField(%d)" % self.disc
