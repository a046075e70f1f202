"""Prime fields and their quadratic extensions, Poly-compatible.

Used to reduce CM curves and their endomorphisms modulo a good prime and to
test the Frobenius identities exactly. Elements overload arithmetic so the
generic polynomial code runs unchanged over F_p.
"""

from __future__ import annotations

from gmpy2 import mpq, mpz


class FpElt:
    __slots__ = ("v", "p")

    def __init__(self, v, p):
        self.v = int(v) % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, FpElt):
            if other.p != self.p:
                raise ValueError("mixed characteristics")
            return other
        if isinstance(other, (int, type(mpz(0)))):
            return FpElt(other, self.p)
        if isinstance(other, type(mpq(0))):
            den = int(other.denominator) % self.p
            if den == 0:
                raise ZeroDivisionError("p divides denominator")
            return FpElt(int(other.numerator) * pow(den, -1, self.p), self.p)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FpElt(self.v + other.v, self.p)

    __radd__ = __add__

    def __neg__(self):
        return FpElt(-self.v, self.p)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FpElt(self.v - other.v, self.p)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FpElt(self.v * other.v, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def inverse(self):
        if not self.v:
            raise ZeroDivisionError("inverse of zero in F_p")
        return FpElt(pow(self.v, -1, self.p), self.p)

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return FpElt(pow(self.v, int(e), self.p), self.p)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.v == other.v

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return "FpElt(%d mod %d)" % (self.v, self.p)


class GFp:
    """Ring adapter for F_p."""

    def __init__(self, p):
        self.p = int(p)
        self.zero = FpElt(0, self.p)
        self.one = FpElt(1, self.p)

    def of(self, v):
        if isinstance(v, FpElt):
            if v.p != self.p:
                raise ValueError("mixed characteristics")
            return v
        return self.zero._coerce(v)

    def __eq__(self, other):
        return isinstance(other, GFp) and other.p == self.p

    def __hash__(self):
        return hash(("GFp", self.p))

    def __repr__(self):
        return "GFp(%d)" % self.p


class Fp2Elt:
    """a + b*s with s^2 = nonresidue, over F_p."""

    __slots__ = ("a", "b", "fld")

    def __init__(self, a, b, fld):
        self.a = int(a) % fld.p
        self.b = int(b) % fld.p
        self.fld = fld

    def _coerce(self, other):
        if isinstance(other, Fp2Elt):
            if other.fld is not self.fld and other.fld != self.fld:
                raise ValueError("mixed fields")
            return other
        if isinstance(other, FpElt):
            return Fp2Elt(other.v, 0, self.fld)
        if isinstance(other, (int, type(mpz(0)))):
            return Fp2Elt(other, 0, self.fld)
        if isinstance(other, type(mpq(0))):
            den = int(other.denominator) % self.fld.p
            if den == 0:
                raise ZeroDivisionError("p divides denominator")
            return Fp2Elt(int(other.numerator) * pow(den, -1, self.fld.p),
                          0, self.fld)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Fp2Elt(self.a + other.a, self.b + other.b, self.fld)

    __radd__ = __add__

    def __neg__(self):
        return Fp2Elt(-self.a, -self.b, self.fld)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p, ns = self.fld.p, self.fld.ns
        return Fp2Elt(self.a * other.a + ns * self.b * other.b,
                      self.a * other.b + self.b * other.a, self.fld)

    __rmul__ = __mul__

    def inverse(self):
        p, ns = self.fld.p, self.fld.ns
        d = (self.a * self.a - ns * self.b * self.b) % p
        if d == 0:
            raise ZeroDivisionError("inverse of zero in F_p^2")
        di = pow(d, -1, p)
        return Fp2Elt(self.a * di, -self.b * di, self.fld)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e):
        e = int(e)
        if e < 0:
            return self.inverse() ** (-e)
        r = self.fld.one
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def frobenius(self):
        """x -> x^p, computed via conjugation (s^p = -s for a nonresidue)."""
        return Fp2Elt(self.a, -self.b, self.fld)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b, self.fld.p))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __repr__(self):
        return "Fp2Elt(%d + %d*s mod %d)" % (self.a, self.b, self.fld.p)


class GFp2:
    """Ring adapter for F_{p^2} = F_p(s), s^2 = smallest nonresidue."""

    def __init__(self, p):
        self.p = int(p)
        if self.p % 2 == 0:
            raise ValueError("odd characteristic only")
        ns = None
        for c in range(2, self.p):
            if pow(c, (self.p - 1) // 2, self.p) == self.p - 1:
                ns = c
                break
        if ns is None:
            raise ValueError("no nonresidue found; is p prime?")
        self.ns = ns
        self.zero = Fp2Elt(0, 0, self)
        self.one = Fp2Elt(1, 0, self)
        self.s = Fp2Elt(0, 1, self)

    def of(self, v):
        if isinstance(v, Fp2Elt):
            if v.fld != self:
                raise ValueError("mixed fields")
            return v
        return self.zero._coerce(v)

    def sqrt(self, x):
        """A square root in F_{p^2} if one exists, else None (Tonelli-Shanks
        over the multiplicative group of order p^2 - 1)."""
        x = self.of(x)
        if not x:
            return self.zero
        q = self.p * self.p - 1
        if x ** (q // 2) != self.one:
            return None
        # write q = 2^s * t
        s, t = 0, q
        while t % 2 == 0:
            t //= 2
            s += 1
        # find a non-square z deterministically
        z = None
        k = 0
        while z is None:
            k += 1
            cand = Fp2Elt(k % self.p, (k * k + 1) % self.p, self)
            if cand and cand ** (q // 2) != self.one:
                z = cand
        m, c, tt, r = s, z ** t, x ** t, x ** ((t + 1) // 2)
        while tt != self.one:
            i, tmp = 0, tt
            while tmp != self.one:
                tmp = tmp * tmp
                i += 1
                if i == m:
                    return None
            b = c ** (1 << (m - i - 1))
            m, c, tt, r = i, b * b, tt * b * b, r * b
        return r

    def __eq__(self, other):
        return isinstance(other, GFp2) and other.p == self.p

    def __hash__(self):
        return hash(("GFp2", self.p))

    def __repr__(self):
        return "GFp2(%d)" % self.p
