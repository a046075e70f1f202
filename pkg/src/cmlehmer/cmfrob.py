"""Frobenius lifts on CM curves at good split primes.

At a split prime p the Frobenius of the reduced curve lifts to an element
alpha of the CM order: N(alpha) = p, tr(alpha) = a_p, and alpha lies in the
prime (p, tau - t) selected by the embedding tau -> t mod p. The trace pins
the unit ambiguity down completely (collisions would force p to be a
represented square, impossible for split p), so the lift is computed, not
searched for numerically. verify_fermat_shape then certifies the
characteristic shape X o [alpha] = (u x^p + pi*V) / (u + pi*W) coefficient
by coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpz

from ._gf import GFp
from ._poly import Poly
from .errors import AmbiguousUnit, BadReduction, NotSplit, ShapeViolation
from .exactnum.quadint import (QuadElt, QuadField, QuadInt,
                               canonical_associate, ideal_generator, units)

_COUNT_CAP = 200_000


@dataclass(frozen=True)
class FrobeniusDatum:
    """Frobenius lift at one good split prime."""

    p: int
    disc: int
    trace: int
    npoints: int
    alpha: QuadInt
    pi: QuadInt
    embedding_root: int

    def __repr__(self):
        return ("FrobeniusDatum(p=%d, alpha=%r, trace=%d)"
                % (self.p, self.alpha, self.trace))


def _legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _sqrt_mod_p(a, p):
    """A square root of a mod an odd prime p; a must be a QR."""
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # Tonelli-Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while _legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, tt = 0, t
        while tt != 1:
            tt = tt * tt % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t = t * c % p
        r = r * b % p
    return r


def is_good_split(curve, p, disc=None):
    """Good reduction and p split in the CM field (p odd)."""
    p = int(p)
    if p == 2:
        return False
    disc = disc if disc is not None else curve.require_cm()
    if abs(disc) % p == 0:
        return False
    try:
        curve.reduction(p)
    except BadReduction:
        return False
    return _legendre(disc % p, p) == 1


def split_primes(curve, bound, start=3):
    """Good split primes for the curve, in increasing order up to bound."""
    import sympy
    disc = curve.require_cm()
    out = []
    p = max(2, start - 1)
    while True:
        p = int(sympy.nextprime(p))
        if p > bound:
            break
        if abs(disc) % p == 0:
            continue
        if not is_good_split(curve, p, disc):
            continue
        out.append(p)
    return out


def _embedding_root(disc, p):
    """Smallest root t of tau's minimal polynomial mod p (split p)."""
    r = _sqrt_mod_p(disc % p, p)
    if disc % 4 == 0:
        inv2 = pow(2, -1, p)
        cands = (r * inv2 % p, (p - r) * inv2 % p)
    else:
        inv2 = pow(2, -1, p)
        cands = ((1 + r) * inv2 % p, (1 + p - r) * inv2 % p)
    return min(cands)


def deuring_frobenius(curve, p):
    """FrobeniusDatum at a good split prime p.

    Raises NotSplit at inert/ramified/supersingular primes, BadReduction at
    primes of bad reduction, AmbiguousUnit if the trace filter does not
    isolate the lift (cannot happen for odd split p, but the error exists
    so the invariant is checked rather than assumed).
    """
    p = int(p)
    disc = curve.require_cm()
    if p == 2:
        raise NotSplit("p = 2 is not supported by the counting step")
    if p > _COUNT_CAP:
        raise ValueError("p exceeds the exhaustive point-count cap")
    if abs(disc) % p == 0 or _legendre(disc % p, p) != 1:
        raise NotSplit("p = %d is not split in disc %d" % (p, disc))
    npoints = curve.count_points(p)  # raises BadReduction when appropriate
    a_p = p + 1 - npoints
    if a_p % p == 0:
        raise NotSplit("p = %d is supersingular for this curve" % p)

    t = _embedding_root(disc, p)
    pi = ideal_generator([QuadInt(p, 0, disc), QuadInt(-t, 1, disc)])
    assert int(pi.norm()) == p, "prime above p must be principal of norm p"

    matches = [u * pi for u in units(disc) if int((u * pi).trace()) == a_p]
    if len(matches) != 1:
        raise AmbiguousUnit("trace filter left %d candidates at p=%d"
                            % (len(matches), p))
    alpha = matches[0]
    # Frobenius sanity: norm, trace, and membership in the embedding prime.
    assert int(alpha.norm()) == p
    disc_sq = a_p * a_p - 4 * p
    b2, rem = divmod(disc_sq, disc)
    assert rem == 0 and _is_int_square(b2), \
        "a_p^2 - 4p must be disc times a square on a CM curve"
    return FrobeniusDatum(p=p, disc=disc, trace=a_p, npoints=npoints,
                          alpha=alpha, pi=canonical_associate(pi),
                          embedding_root=t)


def _is_int_square(n):
    if n < 0:
        return False
    from gmpy2 import isqrt
    r = isqrt(mpz(n))
    return r * r == n


# -- reduction of k-coefficients at the embedding prime ----------------------

def quadelt_mod(e, t, p):
    """Reduce a + b*tau at the prime (p, tau - t): a + b t mod p."""
    num_a, den_a = e.a.numerator, e.a.denominator
    num_b, den_b = e.b.numerator, e.b.denominator
    if den_a % p == 0 or den_b % p == 0:
        raise ZeroDivisionError("coefficient not integral at the prime")
    av = int(num_a) * pow(int(den_a), -1, p) % p
    bv = int(num_b) * pow(int(den_b), -1, p) % p
    return (av + bv * t) % p


def _poly_mod_prime(poly, t, p):
    return [quadelt_mod(c, t, p) for c in poly.cs]


def primitive_quad_pair(num, den):
    """Scale a rational-function pair over k so all coefficients are
    integral with content ideal (1); works in class number one, where the
    content ideal is principal."""
    coeffs = list(num.cs) + list(den.cs)
    lcm = mpz(1)
    for c in coeffs:
        for q in (c.a, c.b):
            d = q.denominator
            g = _gcd(lcm, d)
            lcm = lcm // g * d
    disc = coeffs[0].disc
    ints = []
    for c in coeffs:
        ints.append(QuadInt(c.a * lcm, c.b * lcm, disc))
    g = ideal_generator([v for v in ints if v])
    out = [v.exact_div(g) for v in ints]
    ncs = out[:len(num.cs)]
    dcs = out[len(num.cs):]
    kf = QuadField(disc)
    to_elt = lambda v: QuadElt(v.a, v.b, disc)
    return (Poly(kf, [to_elt(v) for v in ncs], trusted=True),
            Poly(kf, [to_elt(v) for v in dcs], trusted=True))


def _gcd(a, b):
    import gmpy2
    return gmpy2.gcd(mpz(a), mpz(b))


@dataclass(frozen=True)
class FermatShape:
    """Certified decomposition X o [alpha] = (u x^q + pi V) / (u + pi W)."""

    q: int
    unit: QuadInt
    pi: QuadInt
    r_poly: object
    s_poly: object
    v_witness: object
    w_witness: object


def verify_fermat_shape(curve, alpha, rational_map=None):
    """Certify the Frobenius shape of [alpha] for alpha of prime norm.

    The x-map is cleared to an O_k-primitive pair (R, S); then a unit u is
    found with S = u + pi*W and R = u x^q + pi*V exactly, coefficient by
    coefficient (pi = alpha up to a unit, q = N(alpha)). ShapeViolation is
    raised when no unit works, which would disprove the Frobenius property.
    """
    from .weierstrass.endo import endo_map
    disc = curve.require_cm()
    if not isinstance(alpha, QuadInt):
        raise TypeError("alpha must be a QuadInt")
    q = int(alpha.norm())
    emap = rational_map or endo_map(curve, alpha)
    r_poly, s_poly = primitive_quad_pair(emap.x_map.num, emap.x_map.den)
    pi = canonical_associate(alpha)

    for uq in units(disc):
        s_shift = list(s_poly.cs)
        s_shift[0] = s_shift[0] - QuadElt(uq.a, uq.b, disc)
        r_shift = list(r_poly.cs)
        while len(r_shift) <= q:
            r_shift.append(QuadElt(0, 0, disc))
        r_shift[q] = r_shift[q] - QuadElt(uq.a, uq.b, disc)
        try:
            w = [_quad_exact_div(c, pi) for c in s_shift]
            v = [_quad_exact_div(c, pi) for c in r_shift]
        except ValueError:
            continue
        kf = QuadField(disc)
        return FermatShape(
            q=q, unit=uq, pi=pi,
            r_poly=r_poly, s_poly=s_poly,
            v_witness=Poly(kf, v, trusted=True),
            w_witness=Poly(kf, w, trusted=True))
    raise ShapeViolation("no unit gives the Frobenius shape for %r" % alpha)


def _quad_exact_div(c: QuadElt, pi: QuadInt):
    if not c:
        return QuadElt(0, 0, pi.disc)
    if not c.is_integral():
        raise ValueError("non-integral coefficient")
    try:
        return QuadElt(*_div_pair(c, pi), pi.disc)
    except Exception:
        raise ValueError("not divisible by pi")


def _div_pair(c: QuadElt, pi: QuadInt):
    from .errors import NonIntegral
    ci = QuadInt(c.a.numerator, c.b.numerator, pi.disc)
    try:
        d = ci.exact_div(pi)
    except NonIntegral:
        raise ValueError("not divisible")
    return d.a, d.b


def frobenius_action_check(curve, datum: FrobeniusDatum):
    """Exact mod-p verification that [alpha] reduces to Frobenius.

    x-action: the primitive pair reduces to (u x^p, u).
    y-action: the y-twist reduces to f(x)^((p-1)/2).
    Returns a dict of booleans; intended for small p where the map is
    constructed explicitly.
    """
    from .weierstrass.endo import endo_map
    p, t = datum.p, datum.embedding_root
    emap = endo_map(curve, datum.alpha)
    r_poly, s_poly = primitive_quad_pair(emap.x_map.num, emap.x_map.den)
    r_red = _poly_mod_prime(r_poly, t, p)
    s_red = _poly_mod_prime(s_poly, t, p)
    # S must collapse to a nonzero constant u, R to u*x^p.
    x_ok = (any(s_red) and not any(s_red[1:])
            and len(r_red) == p + 1
            and not any(r_red[:p])
            and r_red[p] == s_red[0])

    gn, gd = primitive_quad_pair(emap.y_twist.num, emap.y_twist.den)
    gn_red = _poly_mod_prime(gn, t, p)
    gd_red = _poly_mod_prime(gd, t, p)
    gf = GFp(p)
    fp = curve.f_poly().map_coeffs(gf, gf.of)
    target = fp ** ((p - 1) // 2)
    gn_p = Poly(gf, [gf.of(c) for c in gn_red], trusted=True)
    gd_p = Poly(gf, [gf.of(c) for c in gd_red], trusted=True)
    y_ok = gn_p == target * gd_p
    return {"x_action": x_ok, "y_action": y_ok}
