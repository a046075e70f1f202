"""CM endomorphisms as explicit rational maps.

A class-number-one CM curve has End = Z[tau]; every endomorphism is
[a + b*tau]. For discriminants -3 and -4 tau acts as an automorphism and
the map is assembled from twists and scalar maps. Otherwise [tau] is an
isogeny of prime degree ell = N(tau): its kernel polynomial is found
exactly (roots in k for ell <= 3, else an eigenspace computation mod
several split primes lifted by CRT), pushed through Velu's formulas, and
certified by the exact normalization test A' = a4*tau^4, B' = a6*tau^6.
All results are verified identities over k, never floating point.
"""

from __future__ import annotations

from gmpy2 import mpq, mpz

from ..errors import PrecisionUnreachable, UnsupportedCM
from .._fppoly import (fp_from_rationals, fp_gcd, fp_is_squarefree, fp_mul,
                       fp_rem, fp_sub, fp_trim, fp_x_power_mod)
from .._poly import Poly, QQ, RatFunc
from .._rat import rational, sqrt_exact
from ..exactnum.quadint import QuadElt, QuadField, QuadInt
from .divpoly import RationalMap, division_poly, mult_map


def _lift_poly(poly, kfield):
    return poly.map_coeffs(kfield, kfield.of)


def _lift_ratfunc(rf, kfield):
    return RatFunc(_lift_poly(rf.num, kfield), _lift_poly(rf.den, kfield),
                   reduce=False)


def _conj_poly(poly):
    return Poly(poly.ring, [c.conj() for c in poly.cs], trusted=True)


class SymMap:
    """x-map of an endomorphism together with its differential multiplier.

    The y-twist is recovered from normalization: y o [alpha] = y * X'/alpha.
    """

    __slots__ = ("x_map", "mult", "_g")

    def __init__(self, x_map, mult):
        self.x_map = x_map
        self.mult = mult
        self._g = None

    def g(self):
        if self._g is None:
            inv = self.x_map.ring.one / self.x_map.ring.of(self.mult)
            self._g = self.x_map.derivative() * inv
        return self._g


def _sym_add(curve_k, m1, m2):
    """Chord addition of two distinct endomorphism x-maps."""
    f = RatFunc(curve_k.f_poly(), reduce=False)
    dx = m2.x_map - m1.x_map
    if dx.is_zero():
        raise ValueError("chord addition needs distinct maps")
    dg = m2.g() - m1.g()
    lam_sq = f * dg * dg / (dx * dx)
    x3 = lam_sq - m1.x_map - m2.x_map
    return SymMap(x3, m1.mult + m2.mult)


def _sym_double(curve_k, m):
    ring = curve_k.ring
    f = RatFunc(curve_k.f_poly(), reduce=False)
    g = m.g()
    num = 3 * m.x_map * m.x_map + RatFunc.const(ring, curve_k.a4)
    lam_sq = num * num / (4 * f * g * g)
    return SymMap(lam_sq - 2 * m.x_map, m.mult + m.mult)


# -- exact roots in k of low-degree rational polynomials --------------------

def _roots_in_k(poly_q, kfield):
    """All roots in k of a rational polynomial of degree <= 2 per factor;
    the input is factored over Q first so any degree is accepted."""
    import sympy

    xs = sympy.symbols("x")
    expr = sum(sympy.Rational(str(c)) * xs ** i
               for i, c in enumerate(poly_q.cs))
    roots = []
    for fac, _mult in sympy.factor_list(sympy.Poly(expr, xs))[1]:
        fp = fac.all_coeffs()[::-1]  # ascending
        cs = [mpq(str(c)) for c in fp]
        if len(cs) == 2:  # linear: c0 + c1 x
            roots.append(kfield.of(-cs[0] / cs[1]))
        elif len(cs) == 3:  # quadratic, split over k iff disc/D is a square
            a, b, c = cs[2], cs[1], cs[0]
            dq = b * b - 4 * a * c
            if dq == 0:
                roots.append(kfield.of(-b / (2 * a)))
                continue
            s = sqrt_exact(dq / kfield.disc)  # sqrt(dq) = s*sqrt(disc)
            if s is None or s == 0:
                continue
            root_of_disc = _sqrt_disc(kfield)
            sq = s * root_of_disc
            inv = kfield.one / kfield.of(2 * a)
            roots.append((kfield.of(-b) + sq) * inv)
            roots.append((kfield.of(-b) - sq) * inv)
    return roots


def _sqrt_disc(kfield):
    """sqrt(disc) as an element of k, written in the 1, tau basis."""
    d = kfield.disc
    if d % 4 == 0:
        return kfield.of(2) * kfield.tau  # tau = sqrt(d)/2
    return kfield.of(2) * kfield.tau - kfield.one  # tau = (1+sqrt(d))/2


# -- Velu isogenies from a kernel polynomial --------------------------------

def velu_from_kernel(curve_k, h):
    """Normalized isogeny with kernel cut out by the monic polynomial h.

    Returns (X, A2, B2): the x-map as a rational function and the image
    curve y^2 = x^3 + A2 x + B2. h lists each +-pair of kernel x-coordinates
    once; a degree-1 h whose root is a 2-torsion x-coordinate is the ell=2
    case and is detected from f(x0) = 0.
    """
    ring = curve_k.ring
    a4, a6 = curve_k.a4, curve_k.a6
    if h.degree == 1 and not curve_k.f_eval(-h[0]):
        x0 = -h[0]
        t = 3 * x0 * x0 + a4
        x_var = RatFunc.x(ring)
        xmap = x_var + RatFunc(Poly(ring, [t]), Poly(ring, [-x0, ring.one]))
        return xmap, a4 - 5 * t, a6 - 7 * x0 * t

    d = h.degree
    e1 = -h[d - 1] if d >= 1 else ring.zero
    e2 = h[d - 2] if d >= 2 else ring.zero
    e3 = -h[d - 3] if d >= 3 else ring.zero
    p1 = e1
    p2 = e1 * p1 - 2 * e2
    p3 = e1 * p2 - e2 * p1 + 3 * e3
    dd = ring.of(d)

    hp = h.derivative()
    hpp = hp.derivative()
    s1 = RatFunc(hp, h)
    s2 = RatFunc(hp * hp - hpp * h, h * h)
    x = RatFunc.x(ring)
    x2 = x * x
    x3 = x2 * x
    xmap = (x
            + 6 * (x2 * s1 - dd * x - RatFunc.const(ring, p1))
            + 2 * a4 * s1
            + 4 * (x3 * s2 - 3 * x2 * s1 + 2 * dd * x
                   + RatFunc.const(ring, p1)
                   + a4 * (x * s2 - s1) + a6 * s2))
    t_sum = 6 * p2 + 2 * a4 * dd
    w_sum = 10 * p3 + 6 * a4 * p1 + 4 * a6 * dd
    return xmap, a4 - 5 * t_sum, a6 - 7 * w_sum


# -- kernel of [tau] ---------------------------------------------------------

def _norm_tau(disc):
    if disc % 4 == 0:
        return -disc // 4
    return (1 - disc) // 4


def _tau_kernel_candidates_small(curve, kfield, ell):
    """Candidate kernel polynomials for ell in {2, 3}, by exact root
    extraction in k."""
    cands = []
    if ell == 2:
        for r in _roots_in_k(curve.f_poly(), kfield):
            cands.append(Poly(kfield, [-r, kfield.one], trusted=True))
    else:
        psi3, e = division_poly(curve, 3)
        assert e == 0
        for r in _roots_in_k(psi3, kfield):
            cands.append(Poly(kfield, [-r, kfield.one], trusted=True))
    return cands


def _split_prime_stream(curve, ell, skip):
    """Good split primes usable for the eigenspace reduction."""
    import sympy
    disc = curve.cm_discriminant()
    bad = mpz(abs(int(curve.discriminant().numerator))) * ell * abs(disc)
    for c in (curve.a4, curve.a6):
        bad *= c.denominator
    p = 100
    while p < 10 ** 7:
        p = int(sympy.nextprime(p))
        if bad % p == 0 or p in skip:
            continue
        yield p


def _frobenius_integer_part(curve, p, disc):
    """(a, b, t) with the Frobenius lift a + b*tau at the prime (p, tau - t),
    t the smallest root of tau's minimal polynomial mod p."""
    from ..cmfrob import deuring_frobenius
    datum = deuring_frobenius(curve, p)
    return int(datum.alpha.a), int(datum.alpha.b), datum.embedding_root


def _tau_kernel_crt(curve, kfield, ell, max_primes=60):
    """Kernel polynomial of [tau] for odd ell >= 5.

    Mod a split prime p, ker tau reduces to the subgroup of E[ell] where
    Frobenius acts as the integer part a of alpha_p = a + b*tau, so its
    kernel polynomial mod p is gcd(psi_ell, S_a x^p - R_a). Coefficients
    (in Z[tau]) are recovered from several primes by lattice reduction and
    certified afterwards, so wrong lifts cannot escape.
    """
    from ..errors import NotSplit, BadReduction
    psi, e = division_poly(curve, ell)
    assert e == 0
    d = (ell - 1) // 2
    residues = []
    used = 0
    for p in _split_prime_stream(curve, ell, skip=()):
        if used >= max_primes:
            break
        try:
            a, b, t = _frobenius_integer_part(curve, p, kfield.disc)
        except (NotSplit, BadReduction):
            continue
        if b % ell == 0:
            continue
        a_red = a % ell
        if a_red == 0:
            continue
        psi_p = fp_from_rationals(psi.cs, p)
        if len(psi_p) != psi.degree + 1 or not fp_is_squarefree(psi_p, p):
            continue
        mm = mult_map(curve, a_red)
        r_a, s_a = mm.integer_pair()
        rp = fp_from_rationals(r_a.cs, p)
        sp = fp_from_rationals(s_a.cs, p)
        xp = fp_x_power_mod(p, psi_p, p)
        cond = fp_sub(fp_rem(fp_mul(xp, sp, p), psi_p, p),
                      fp_rem(rp, psi_p, p), p)
        h_p = fp_gcd(psi_p, cond, p)
        if len(h_p) != d + 1:
            continue
        used += 1
        residues.append((p, t, h_p))
        if len(residues) >= 2:
            h = _lift_kernel(residues, d, kfield, psi, ell)
            if h is not None:
                return h
    raise PrecisionUnreachable(
        "kernel of [tau] not recovered from %d primes" % used)


def _lift_kernel(residues, d, kfield, psi_q, ell):
    """CRT + lattice lift of the kernel polynomial; returns a certified h
    over k or None if more primes are needed."""
    for scale_pow in (0, 1, 2):
        s = mpz(ell) ** scale_pow
        coeffs = []
        ok = True
        for j in range(d):
            pairs = []
            for p, t, h_p in residues:
                c = h_p[j] * int(s % p) % p
                pairs.append((p, t, c))
            uv = _lift_uv(pairs)
            if uv is None:
                ok = False
                break
            u, v = uv
            coeffs.append(QuadElt(mpq(u, s), mpq(v, s), kfield.disc))
        if not ok:
            continue
        coeffs.append(kfield.one)
        h = Poly(kfield, coeffs, trusted=True)
        lifted = _lift_poly(psi_q, kfield)
        if not (lifted % h):
            return h
    return None


def _lift_uv(pairs):
    """Small (u, v) in Z^2 with u + v*t == c mod p for each (p, t, c)."""
    from .._linalg import lll_reduce
    big = mpz(1)
    for p, _, _ in pairs:
        big *= p
    # u0: CRT of the c's with v = 0; lattice of homogeneous solutions.
    u0 = _crt([(c, p) for p, _, c in pairs])
    tt = _crt([(t, p) for p, t, _ in pairs])
    basis = [[big, mpz(0)], [-tt, mpz(1)]]
    b1, b2 = lll_reduce(basis)
    det = b1[0] * b2[1] - b2[0] * b1[1]
    if not det:
        return None
    # Exact coordinates of (u0, 0) in the reduced basis, then a +/-1
    # enumeration window around the rounded point: exact CVP in rank 2.
    xq = mpq(u0 * b2[1], det)
    yq = mpq(-b1[1] * u0, det)
    xf = xq.numerator // xq.denominator
    yf = yq.numerator // yq.denominator
    best = None
    for dx in (-1, 0, 1, 2):
        for dy in (-1, 0, 1, 2):
            cx, cy = xf + dx, yf + dy
            ru = u0 - cx * b1[0] - cy * b2[0]
            rv = -cx * b1[1] - cy * b2[1]
            n2 = ru * ru + rv * rv
            if best is None or n2 < best[0]:
                best = (n2, ru, rv)
    u, v = best[1], best[2]
    # residual must actually satisfy the congruences
    for p, t, c in pairs:
        if (int(u) + int(v) * t - c) % p:
            return None
    if max(abs(u), abs(v)) ** 2 * 16 > big:
        return None  # too close to the lattice covering radius to trust
    return mpz(u), mpz(v)


def _crt(pairs):
    """x mod prod(p) with x == c (mod p) for each (c, p)."""
    x, m = mpz(0), mpz(1)
    for c, p in pairs:
        r = (mpz(c) - x) * pow(int(m), -1, p) % p
        x += m * r
        m *= p
    return x


_TAU_CACHE = {}


def tau_map(curve):
    """SymMap of [tau] for a CM curve with discriminant <= -7."""
    disc = curve.require_cm()
    if disc in (-3, -4):
        raise ValueError("tau is an automorphism for disc %d" % disc)
    key = (disc, curve.a4, curve.a6)
    hit = _TAU_CACHE.get(key)
    if hit is not None:
        return hit
    kfield = QuadField(disc)
    tau = kfield.tau
    ell = _norm_tau(disc)
    assert curve.a4 and curve.a6, "j = 0 or 1728 cannot occur here"
    a4k = kfield.of(curve.a4)
    a6k = kfield.of(curve.a6)
    t4 = tau * tau * tau * tau
    t6 = t4 * tau * tau
    tb = tau.conj()
    tb4 = tb * tb * tb * tb
    tb6 = tb4 * tb * tb

    if ell <= 3:
        candidates = _tau_kernel_candidates_small(curve, kfield, ell)
    else:
        candidates = [_tau_kernel_crt(curve, kfield, ell)]

    from .curve import WeierstrassCurve
    curve_k = WeierstrassCurve(a4k, a6k, kfield)
    for h in candidates:
        xv, a2, b2 = velu_from_kernel(curve_k, h)
        if a2 == a4k * t4 and b2 == a6k * t6:
            pass
        elif a2 == a4k * tb4 and b2 == a6k * tb6:
            h = _conj_poly(h)
            xv, a2, b2 = velu_from_kernel(curve_k, h)
            if not (a2 == a4k * t4 and b2 == a6k * t6):
                continue
        else:
            continue
        inv_t2 = kfield.one / (tau * tau)
        result = SymMap(xv * inv_t2, tau)
        _TAU_CACHE[key] = result
        return result
    raise UnsupportedCM("no kernel matched the normalization test for "
                        "disc %d" % disc)


# -- the public constructor --------------------------------------------------

def endo_map(curve, alpha):
    """[alpha] as a RationalMap over k = Q(sqrt(disc)).

    alpha is a QuadInt in the curve's CM order; the map is (x, y) ->
    (X(x), y * G(x)) with G = X'/alpha, and its degree is N(alpha).
    """
    disc = curve.require_cm()
    if isinstance(alpha, QuadInt):
        if alpha.disc != disc:
            raise ValueError("alpha lives in disc %d, curve has disc %d"
                             % (alpha.disc, disc))
    else:
        alpha = QuadInt(alpha, 0, disc)
    if not alpha:
        raise ValueError("[0] is not a rational map")
    kfield = QuadField(disc)
    a, b = int(alpha.a), int(alpha.b)

    from .curve import WeierstrassCurve
    curve_k = WeierstrassCurve(kfield.of(curve.a4), kfield.of(curve.a6),
                               kfield)

    sym = _endo_sym(curve, curve_k, kfield, disc, a, b)
    alpha_elt = kfield.of(alpha)
    assert sym.mult == alpha_elt
    deg = int(alpha.norm())
    return RationalMap(sym.x_map, sym.g(), deg, alpha_elt)


def _endo_sym(curve, curve_k, kfield, disc, a, b):
    if b == 0:
        return _scalar_sym(curve, kfield, a)
    if disc == -4:
        # [a + b i] = [a] + [b][i];  [i](x, y) = (-x, i y).
        part = _compose_scalar_after(curve, kfield, b, _i_map(kfield))
    elif disc == -3:
        # tau = zeta6 = 1 + zeta3: [a + b tau] = [a + b] + [b][zeta3].
        part = _compose_scalar_after(curve, kfield, b, _zeta3_map(kfield))
        a = a + b
    else:
        part = _compose_scalar_after_sym(curve, kfield, b, tau_map(curve))
    if a == 0:
        return part
    return _combine(curve_k, _scalar_sym(curve, kfield, a), part)


def _combine(curve_k, m1, m2):
    if m1.x_map == m2.x_map:
        if m1.mult == m2.mult:
            return _sym_double(curve_k, m1)
        raise ValueError("degenerate combination [alpha] + [-alpha]")
    return _sym_add(curve_k, m1, m2)


def _scalar_sym(curve, kfield, n):
    mm = mult_map(curve, n)
    return SymMap(_lift_ratfunc(mm.x_map, kfield), kfield.of(n))


def _i_map(kfield):
    # x-map of [i] with multiplier i = tau.
    x = RatFunc.x(kfield)
    return SymMap(-x, kfield.tau)


def _zeta3_map(kfield):
    # zeta3 = tau - 1 for tau = zeta6; [zeta3](x, y) = (zeta3 x, y).
    z3 = kfield.tau - kfield.one
    x = RatFunc.x(kfield)
    return SymMap(z3 * x, z3)


def _compose_scalar_after(curve, kfield, b, auto):
    """[b] o (automorphism) as a SymMap."""
    if b == 1:
        return auto
    if b == -1:
        return SymMap(auto.x_map, -auto.mult)
    scal = _scalar_sym(curve, kfield, b)
    return SymMap(scal.x_map.compose(auto.x_map, reduce=False),
                  scal.mult * auto.mult)


def _compose_scalar_after_sym(curve, kfield, b, tmap):
    if b == 1:
        return tmap
    if b == -1:
        return SymMap(tmap.x_map, -tmap.mult)
    scal = _scalar_sym(curve, kfield, b)
    return SymMap(scal.x_map.compose(tmap.x_map, reduce=False),
                  scal.mult * tmap.mult)
