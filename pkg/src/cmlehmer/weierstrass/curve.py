"""Short Weierstrass curves y^2 = x^3 + a4 x + a6 over exact fields.

The curve is generic over a ring adapter (rationals by default), so the same
chord-tangent code serves points with rational, quadratic, cyclotomic, and
finite-field coordinates; reduction mod p is just the same curve over F_p.
"""

from __future__ import annotations

from gmpy2 import mpq, mpz

from ..errors import BadReduction, UnsupportedCM
from .._gf import GFp
from .._poly import Poly, QQ
from .._rat import rational

#: j-invariants of the class-number-one CM orders (maximal orders).
CM_J_INVARIANTS = {
    -3: mpq(0),
    -4: mpq(1728),
    -7: mpq(-3375),
    -8: mpq(8000),
    -11: mpq(-32768),
    -19: mpq(-884736),
    -43: mpq(-884736000),
    -67: mpq(-147197952000),
    -163: mpq(-262537412640768000),
}


class CurvePoint:
    """Affine point or the point at infinity (x is None)."""

    __slots__ = ("curve", "x", "y")

    def __init__(self, curve, x=None, y=None):
        self.curve = curve
        self.x = x
        self.y = y

    @property
    def is_infinity(self):
        return self.x is None

    def __eq__(self, other):
        if not isinstance(other, CurvePoint):
            return NotImplemented
        if self.is_infinity or other.is_infinity:
            return self.is_infinity and other.is_infinity
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((None if self.is_infinity else (self.x, self.y)))

    def __neg__(self):
        if self.is_infinity:
            return self
        return CurvePoint(self.curve, self.x, -self.y)

    def __add__(self, other):
        return self.curve.add(self, other)

    def __sub__(self, other):
        return self.curve.add(self, -other)

    def __rmul__(self, n):
        return self.curve.scalar_mul(n, self)

    def __repr__(self):
        if self.is_infinity:
            return "CurvePoint(O)"
        return "CurvePoint(%r, %r)" % (self.x, self.y)


class WeierstrassCurve:
    """y^2 = x^3 + a4 x + a6 over the given coefficient ring (a field)."""

    def __init__(self, a4, a6, ring=QQ):
        self.ring = ring
        self.a4 = ring.of(a4)
        self.a6 = ring.of(a6)
        d = self.discriminant()
        if not d:
            raise ValueError("singular curve: discriminant is zero")

    def discriminant(self):
        a4, a6 = self.a4, self.a6
        return -16 * (4 * a4 * a4 * a4 + 27 * a6 * a6)

    def j_invariant(self):
        a4, a6 = self.a4, self.a6
        num = 4 * a4 * a4 * a4
        den = num + 27 * a6 * a6
        return 1728 * num / den

    def cm_discriminant(self):
        """The CM discriminant if j matches a class-number-one order, else
        None. Only meaningful over Q."""
        if self.ring != QQ:
            return None
        j = self.j_invariant()
        for disc, jd in CM_J_INVARIANTS.items():
            if j == jd:
                return disc
        return None

    def require_cm(self):
        d = self.cm_discriminant()
        if d is None:
            raise UnsupportedCM("curve j=%s is not a class-number-one CM "
                                "j-invariant" % self.j_invariant())
        return d

    # -- point arithmetic --------------------------------------------------

    def infinity(self):
        return CurvePoint(self)

    def point(self, x, y, check=True):
        x = self.ring.of(x) if not _foreign(x) else x
        y = self.ring.of(y) if not _foreign(y) else y
        if check and not self.contains(x, y):
            raise ValueError("point (%r, %r) is not on the curve" % (x, y))
        return CurvePoint(self, x, y)

    def f_eval(self, x):
        return x * x * x + self.a4 * x + self.a6

    def f_poly(self):
        return Poly(self.ring, [self.a6, self.a4, self.ring.zero,
                                self.ring.one], trusted=True)

    def contains(self, x, y):
        return y * y == self.f_eval(x)

    def add(self, p, q):
        if p.is_infinity:
            return q
        if q.is_infinity:
            return p
        if p.x == q.x:
            if p.y == -q.y:
                return self.infinity()
            # tangent
            lam = (3 * p.x * p.x + self.a4) / (2 * p.y)
        else:
            lam = (q.y - p.y) / (q.x - p.x)
        x3 = lam * lam - p.x - q.x
        y3 = lam * (p.x - x3) - p.y
        return CurvePoint(self, x3, y3)

    def scalar_mul(self, n, p):
        n = int(n)
        if n < 0:
            return self.scalar_mul(-n, -p)
        acc = self.infinity()
        base = p
        while n:
            if n & 1:
                acc = self.add(acc, base)
            base = self.add(base, base)
            n >>= 1
        return acc

    # -- reduction and counting --------------------------------------------

    def reduction(self, p):
        """The curve over F_p; BadReduction if the model is not p-integral
        or becomes singular mod p."""
        if self.ring != QQ:
            raise ValueError("reduction is defined for rational models")
        p = int(p)
        for c in (self.a4, self.a6):
            if c.denominator % p == 0:
                raise BadReduction("model is not integral at %d" % p)
        gf = GFp(p)
        try:
            return WeierstrassCurve(gf.of(self.a4), gf.of(self.a6), gf)
        except ValueError:
            raise BadReduction("singular reduction at %d" % p) from None

    def count_points(self, p):
        """|E(F_p)| by the quadratic character sum; intended for p <= ~10^5."""
        ec = self.reduction(p)
        a4, a6 = ec.a4.v, ec.a6.v
        half = (p - 1) // 2
        total = p + 1
        for x in range(p):
            fx = (x * x * x + a4 * x + a6) % p
            if fx == 0:
                continue
            total += 1 if pow(fx, half, p) == 1 else -1
        return total

    def trace_of_frobenius(self, p):
        return p + 1 - self.count_points(p)

    def torsion_multiple_bound(self):
        """Over Q, torsion orders are bounded by 16 (a safe cover of the
        possible orders); used by the exact torsion test."""
        return 16

    def __repr__(self):
        return "WeierstrassCurve(a4=%r, a6=%r over %r)" % (
            self.a4, self.a6, self.ring)


def _foreign(v):
    """True when v is already a field element of some extension (so the
    curve should not coerce it into its own base ring)."""
    from ..exactnum.quadint import QuadElt
    from ..exactnum.cyclo import CycloElt
    from .._gf import FpElt, Fp2Elt
    return isinstance(v, (QuadElt, CycloElt, FpElt, Fp2Elt))


def curve_from_label_data(a4, a6):
    return WeierstrassCurve(rational(a4), rational(a6))
