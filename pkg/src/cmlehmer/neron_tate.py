"""Canonical heights from the doubling telescope, with certified error bars.

On an integral short Weierstrass model the x line of a doubled point is the
classical duplication pair

    F(X, Z) = X^4 - 2 a4 X^2 Z^2 - 8 a6 X Z^3 + a4^2 Z^4
    G(X, Z) = 4 Z (X^3 + a4 X Z^2 + a6 Z^3),

and with h the absolute Weil height of the x line, the drift
h(x([2]Q)) - 4 h(x(Q)) is trapped in a per-curve interval [-c_low, c_up]
certified here rather than quoted: the upper constant is an archimedean
coefficient sum (finite places cost nothing on an integral model), the
lower one comes from Bezout cofactor identities for (F, G) on the two
projective charts, whose common denominator controls every finite place at
once while outward-rounded intervals on their coefficients lower-bound
max(|F|, |G|) on the unit disc of each embedding. Telescoping then gives

    hhat(P) = h(x(P)) + sum_k 4^{-(k-1)} (h_{k+1} - 4 h_k),

the normalization in which (0, 4) on y^2 = x^3 - 16x + 16 has height
0.0511114..., and cutting the series after N terms leaves a tail inside
[-c_low, c_up] / (3 * 4^N).

Over the rationals each series term splits into an archimedean part,
iterated in interval arithmetic on the bounded ratio x_n alone, and the
exact log gcd(F, G) of the step. That gcd divides the resultant of the
pair, so residues modulo a fixed power of the resultant recover it without
ever touching the 4^n-bit integers the naive iteration would grow; the
whole run is a few dozen small-number steps at any tolerance. Over a
quadratic or cyclotomic base field the doubling runs on exact field
elements instead and the heights module takes each h_n with exact finite
parts, so tolerances there are costlier and default coarser.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd as int_gcd

import gmpy2
import mpmath
from gmpy2 import mpq, mpz
from mpmath import iv
from sympy import factorint

from ._intervals import MAX_PREC, IntervalScalar, iv_at
from ._linalg import det_field
from ._poly import QQ, Poly
from .errors import (DegreeTooLarge, NonIntegral, PrecisionUnreachable,
                     UnsupportedField)
from .exactnum.cyclo import CycloElt, CycloField
from .exactnum.quadint import QuadElt, QuadField, QuadInt, ideal_generator
from .heights import proj_height
from .weierstrass.curve import CurvePoint, WeierstrassCurve

_BOUND_PREC = 192       # working precision for the certified constants
_MAX_TERMS = 64         # fast paths: series terms are cheap
_MAX_DOUBLINGS_NF = 14  # field elements grow like 4^n bits per coordinate
_TORSION_SCAN = 24      # multiples tried over a number field before iterating
_ORDER_CAP = 64         # is_torsion stops scanning multiples here

# imaginary quadratic fields whose maximal order is a PID; on these the
# step gcd of the telescope has an actual generator and the fast path runs
_CLASS_ONE_DISCS = frozenset({-3, -4, -7, -8, -11, -19, -43, -67, -163})


@dataclass(frozen=True)
class HeightEstimate:
    """A canonical height together with a certified two-sided error."""

    value: object
    error_bound: object
    iterations: int

    def lower(self):
        return self.value - self.error_bound

    def upper(self):
        return self.value + self.error_bound

    def __float__(self):
        return float(self.value)


class _UndecidedType:
    """Tri-state bottom for is_torsion. Refuses boolean coercion so a bare
    truth test cannot silently read it as an answer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __bool__(self):
        raise TypeError("torsion status is undecided; compare against "
                        "UNDECIDED explicitly")

    def __repr__(self):
        return "UNDECIDED"


UNDECIDED = _UndecidedType()


def _exact_zero():
    return HeightEstimate(mpmath.mpf(0), mpmath.mpf(0), 0)


# -- base field bookkeeping --------------------------------------------------

def _component_denoms(c, kind):
    if kind == "rational":
        return (mpq(c).denominator,)
    if kind == "quad":
        return (c.a.denominator, c.b.denominator)
    return tuple(q.denominator for q in c.coords)


def _ring_kind(ring):
    if isinstance(ring, QuadField):
        return "quad", ring
    if isinstance(ring, CycloField):
        return "cyclo", ring
    if ring == QQ:
        return "rational", None
    raise UnsupportedField("canonical heights need a characteristic zero "
                           "base; got a curve over %r" % (ring,))


def _coerce_field(curve, coords):
    """Settle the base field from the curve plus coordinate values.

    A rational model carrying quadratic or cyclotomic coordinates is
    base-changed onto the coordinates' field.
    """
    kind, field = _ring_kind(curve.ring)
    if kind == "rational":
        cyclo = None
        quad_disc = None
        for c in coords:
            if isinstance(c, CycloElt):
                cyclo = c.field
            elif isinstance(c, (QuadElt, QuadInt)):
                quad_disc = c.disc
        if cyclo is not None and quad_disc is not None:
            raise UnsupportedField("point mixes quadratic and cyclotomic "
                                   "coordinates")
        if cyclo is not None:
            kind, field = "cyclo", cyclo
        elif quad_disc is not None:
            kind, field = "quad", QuadField(quad_disc)
        if field is not None:
            curve = WeierstrassCurve(field.of(curve.a4), field.of(curve.a6),
                                     field)
    if kind == "cyclo" and field.phi > 8:
        raise DegreeTooLarge("cyclotomic degree %d is past the supported 8"
                             % field.phi)
    return kind, field, curve


def _prepare(curve, point):
    """Normalize (curve, point) onto one base field.

    Returns (kind, field, curve, point) with the curve over the smallest
    field holding the point; infinity comes back as a None point.
    """
    if isinstance(point, CurvePoint):
        if point.is_infinity:
            return "rational", None, curve, None
        x, y = point.x, point.y
    else:
        x, y = point
    kind, field, curve = _coerce_field(curve, (x, y))
    return kind, field, curve, curve.point(x, y)


def _integral_model(curve, x, y, kind):
    """Scale (x, y) -> (u^2 x, u^3 y) onto a model with integral
    coefficients; the canonical height does not move."""
    den4 = mpz(1)
    den6 = mpz(1)
    for d in _component_denoms(curve.a4, kind):
        den4 = gmpy2.lcm(den4, mpz(d))
    for d in _component_denoms(curve.a6, kind):
        den6 = gmpy2.lcm(den6, mpz(d))
    if den4 == 1 and den6 == 1:
        return curve, x, y
    exps = {}
    for p, e in factorint(int(den4)).items():
        exps[p] = -(-e // 4)
    for p, e in factorint(int(den6)).items():
        exps[p] = max(exps.get(p, 0), -(-e // 6))
    u = 1
    for p, e in exps.items():
        u *= int(p) ** e
    scaled = WeierstrassCurve(curve.a4 * u ** 4, curve.a6 * u ** 6,
                              curve.ring)
    return scaled, x * u * u, (None if y is None else y * u ** 3)


# -- certified drift constants -------------------------------------------------

_BOUNDS_CACHE = {}


def _iv_q(q):
    q = mpq(q)
    return iv.mpf(int(q.numerator)) / iv.mpf(int(q.denominator))


def _abs_embeds(c, kind, field):
    """Enclosing intervals of |sigma(c)| over every embedding sigma."""
    if kind == "rational":
        return [IntervalScalar(_iv_q(abs(mpq(c))))]
    if kind == "quad":
        # both embeddings are complex conjugates; |sigma(c)|^2 is the norm
        r = IntervalScalar(iv.sqrt(_iv_q(c.norm())))
        return [r, r]
    m = field.m
    out = []
    two_pi = 2 * iv.pi
    for u in range(1, max(m, 2)):
        if int_gcd(u, m) != 1:
            continue
        re = iv.mpf(0)
        im = iv.mpf(0)
        for i, q in enumerate(c.coords):
            if not q:
                continue
            ang = two_pi * iv.mpf((i * u) % m) / iv.mpf(m)
            cq = _iv_q(q)
            re += cq * iv.cos(ang)
            im += cq * iv.sin(ang)
        out.append(IntervalScalar(iv.sqrt(re * re + im * im)))
    return out


def _abs_sums(coeffs, d, kind, field):
    """Per-embedding sums of |sigma(coeff)| over a coefficient list."""
    sums = [IntervalScalar(iv.mpf(0)) for _ in range(d)]
    for c in coeffs:
        for i, r in enumerate(_abs_embeds(c, kind, field)):
            sums[i] = sums[i] + r
    return sums


def _duplication_coeffs(curve):
    a4, a6 = curve.a4, curve.a6
    ring = curve.ring
    f_cs = [a4 * a4, -8 * a6, -2 * a4, ring.zero, ring.one]
    g_cs = [4 * a6, 4 * a4, ring.zero, 4 * ring.one, ring.zero]
    return f_cs, g_cs


def height_difference_bound(curve):
    """Certified constants (c_low, c_up) for the doubling drift.

    For every point x of the projective line over the curve's base field,
    with (F, G) the duplication pair of the model,

        -c_low <= h((F(x) : G(x))) - 4 h(x) <= c_up,

    heights being absolute logarithmic Weil heights. The model must have
    integral coefficients (NonIntegral otherwise); canonical_height scales
    models into range before calling here. The finite contributions are
    controlled exactly, the archimedean ones by outward-rounded intervals,
    so the pair is safe to cite inside a proof.
    """
    kind, field = _ring_kind(curve.ring)
    key = (curve.ring, curve.a4, curve.a6)
    hit = _BOUNDS_CACHE.get(key)
    if hit is not None:
        return hit
    for c in (curve.a4, curve.a6):
        for den in _component_denoms(c, kind):
            if den != 1:
                raise NonIntegral("drift constants want an integral model; "
                                  "scale x by u^2 first")

    ring = curve.ring
    d = 1 if kind == "rational" else (2 if kind == "quad" else field.phi)
    f_cs, g_cs = _duplication_coeffs(curve)

    # Bezout cofactors on the chart |x| <= 1 and on the reversed chart;
    # a nonsingular model keeps F and G coprime, so the gcd is a unit.
    charts = []
    for a_cs, b_cs in ((f_cs, g_cs[:4]),
                       (list(reversed(f_cs)), list(reversed(g_cs)))):
        a = Poly(ring, a_cs, trusted=True)
        b = Poly(ring, b_cs, trusted=True)
        g, s, t = a.xgcd(b)
        if g.degree != 0:
            raise ValueError("duplication pair has a common root; "
                             "the model is singular")
        inv = ring.one / g.cs[0]
        charts.append((s * inv, t * inv))

    den = mpz(1)
    for s, t in charts:
        for p in (s, t):
            for c in p.cs:
                for q in _component_denoms(c, kind):
                    den = gmpy2.lcm(den, mpz(q))

    with iv_at(_BOUND_PREC):
        f_sum = _abs_sums(f_cs, d, kind, field)
        g_sum = _abs_sums(g_cs, d, kind, field)
        cof_sums = [_abs_sums(list(s.cs) + list(t.cs), d, kind, field)
                    for s, t in charts]
        arch_up = IntervalScalar(iv.mpf(0))
        arch_low = IntervalScalar(iv.mpf(0))
        for i in range(d):
            # max over the two values/charts is bounded by their sum
            arch_up = arch_up + (f_sum[i] + g_sum[i]).log()
            arch_low = arch_low + (cof_sums[0][i] + cof_sums[1][i] + 1).log()
        log_den = IntervalScalar(iv.log(iv.mpf(int(den))))
        c_up = mpmath.mpf((arch_up / d).hi)
        c_low = mpmath.mpf((log_den + arch_low / d).hi)
    out = (c_low, c_up)
    _BOUNDS_CACHE[key] = out
    return out


def _pick_terms(c_low, c_up, budget, cap):
    """Smallest n with (c_low + c_up) / (6 * 4^n) <= budget."""
    with mpmath.workprec(64):
        width = (mpmath.mpf(c_low) + mpmath.mpf(c_up)) / 6
        budget = mpmath.mpf(budget)
        n = 0
        while width > budget:
            width /= 4
            n += 1
            if n > cap:
                raise PrecisionUnreachable(
                    "tolerance needs more than %d doubling steps" % cap)
    return n


# -- the rational fast path -----------------------------------------------------

def _resultant_deg4(f_cs, g_cs):
    """Resultant of two degree-4 binary forms given by ascending integer
    coefficient lists of length 5 (Sylvester determinant)."""
    fd = [mpq(c) for c in reversed(f_cs)]
    gd = [mpq(c) for c in reversed(g_cs)]
    zero = mpq(0)
    rows = []
    for shift in range(4):
        rows.append([zero] * shift + fd + [zero] * (3 - shift))
    for shift in range(4):
        rows.append([zero] * shift + gd + [zero] * (3 - shift))
    det = det_field(rows, QQ)
    assert det.denominator == 1
    return mpz(det.numerator)


def _iv_abs_max(a, b):
    """max(|a|, |b|) of two intervals, as an interval."""
    aa, bb = abs(a), abs(b)
    return iv.mpf([max(aa.a, bb.a), max(aa.b, bb.b)])


def _iv_eval(cs, t):
    acc = iv.mpf(0)
    for c in reversed(cs):
        acc = acc * t + iv.mpf(int(c))
    return acc


def _canonical_rational(xq, a4n, a6n, c_low, c_up, tol, prec):
    """The telescope over Q: interval arithmetic for the archimedean part
    of each term, residues modulo a power of Res(F, G) for the exact
    gcd(F, G) of each step. Returns (value, error, terms) as mpf."""
    f_cs = [a4n * a4n, -8 * a6n, -2 * a4n, 0, 1]
    g_hom = [4 * a6n, 4 * a4n, 0, 4, 0]
    f_rev = list(reversed(f_cs))
    g_rev = list(reversed(g_hom))
    res = abs(_resultant_deg4(f_cs, g_hom))
    assert res, "nonsingular model has nonzero duplication resultant"

    n_terms = _pick_terms(c_low, c_up, mpmath.mpf(tol) / 2, _MAX_TERMS)
    x0 = mpz(xq.numerator)
    z0 = mpz(xq.denominator)

    # exact shadow of the first few doublings: a 2-power torsion x drives
    # the pair onto (1 : 0) within three steps over Q, and torsion x values
    # are small, so the shadow stays cheap; anything still finite here is
    # handled by the interval run below
    xe, ze = x0, z0
    for _ in range(4):
        if xe.bit_length() + ze.bit_length() > 4096:
            break
        ge = 4 * ze * (xe * xe * xe + a4n * xe * ze * ze
                       + a6n * ze * ze * ze)
        if ge == 0:
            return mpmath.mpf(0), mpmath.mpf(0), 0
        fe = (xe * xe * (xe * xe - 2 * a4n * ze * ze)
              - 8 * a6n * xe * ze * ze * ze
              + a4n * a4n * ze * ze * ze * ze)
        c = gmpy2.gcd(fe, ge)
        xe, ze = fe // c, ge // c

    prec_i = max(int(prec), 96)
    while prec_i <= MAX_PREC:
        with iv_at(prec_i):
            ok = True
            mod = res ** (n_terms + 2)
            xr, zr = x0 % mod, z0 % mod
            xi = iv.mpf(int(x0)) / iv.mpf(int(z0))
            acc = iv.mpf(0)
            scale = iv.mpf(1)
            for _ in range(n_terms):
                scale /= 4
                # archimedean drift of this step, scale invariantly: on the
                # affine chart when |x| stays small, on the reversed chart
                # when it stays large, with explicit normalization between
                axi = abs(xi)
                if axi.a >= 1:
                    w = 1 / xi
                    fv = _iv_eval(f_rev, w)
                    gv = _iv_eval(g_rev, w)
                    m = _iv_abs_max(fv, gv)
                else:
                    fv = _iv_eval(f_cs, xi)
                    gv = _iv_eval(g_hom, xi)
                    m = _iv_abs_max(fv, gv)
                    if axi.b > 1:
                        norm = iv.mpf([mpmath.mpf(1), axi.b])
                        m = m / norm ** 4
                if m.a <= 0 or gv.a <= 0 <= gv.b:
                    ok = False  # cancellation ate the enclosure; retry wider
                    break
                # exact gcd of the step from residues: gcd(F, G) | res
                fr = (xr * xr * ((xr * xr - 2 * a4n * zr * zr) % mod)
                      - 8 * a6n * xr * zr * zr * zr
                      + a4n * a4n * zr * zr * zr * zr) % mod
                gr = 4 * zr * (xr * xr * xr + a4n * xr * zr * zr
                               + a6n * zr * zr * zr) % mod
                g = gmpy2.gcd(gmpy2.gcd(fr % res, res), gmpy2.gcd(gr % res,
                                                                  res))
                acc += scale * (iv.log(m) - iv.log(iv.mpf(int(g))))
                mod //= g
                xr, zr = (fr // g) % mod, (gr // g) % mod
                xi = fv / gv
            if not ok:
                prec_i *= 2
                continue
            h0 = iv.log(iv.mpf(int(max(abs(x0), abs(z0)))))
            tail = iv.mpf([-mpmath.mpf(c_low), mpmath.mpf(c_up)]) \
                / (3 * iv.mpf(4) ** n_terms)
            total = h0 + acc + tail
            value = (mpmath.mpf(total.a) + mpmath.mpf(total.b)) / 2
            err = (mpmath.mpf(total.b) - mpmath.mpf(total.a)) / 2
        if err <= tol:
            return value, err, n_terms
        prec_i *= 2
    raise PrecisionUnreachable("height interval will not shrink to %s" % tol)


# -- the quadratic fast path ------------------------------------------------------
#
# Same telescope as over Q, with the maximal order of an imaginary
# quadratic field in place of Z. The step gcd becomes the content ideal of
# the value pair; the Sylvester identities A*F + B*G = Res * X^7 (and Z^7)
# still hold with coefficients in the order, so for a coprime pair that
# ideal divides (Res), and over a PID it has a generator that
# ideal_generator recovers by Lagrange reduction. Residues live in
# coordinates modulo an integer: (N(Res)^k) is contained in (Res), so
# coordinate pairs modulo a power of the norm determine every residue the
# extraction needs, and dividing the modulus by N(step gcd) keeps the
# representatives faithful after each division, exactly as over Q. The
# archimedean side tracks one embedding of the ratio as a complex
# rectangle; the conjugate embedding has the same absolute values.

_RES_CACHE = {}


def _quad_resultant(curve, field):
    key = (field.disc, curve.a4, curve.a6)
    hit = _RES_CACHE.get(key)
    if hit is not None:
        return hit
    f_cs, g_cs = _duplication_coeffs(curve)
    fd = [field.of(c) for c in reversed(f_cs)]
    gd = [field.of(c) for c in reversed(g_cs)]
    zero = field.zero
    rows = []
    for shift in range(4):
        rows.append([zero] * shift + fd + [zero] * (3 - shift))
    for shift in range(4):
        rows.append([zero] * shift + gd + [zero] * (3 - shift))
    det = det_field(rows, field)
    assert det.a.denominator == 1 and det.b.denominator == 1
    delta = QuadInt(int(det.a), int(det.b), field.disc)
    assert delta, "nonsingular model has nonzero duplication resultant"
    _RES_CACHE[key] = delta
    return delta


def _tau_mul_params(disc):
    """(t, n) with tau^2 = t*tau - n in the (1, tau) basis."""
    t = 1 if disc % 2 else 0
    return t, (t - disc) // 4


def _c_mul(u, v):
    return (u[0] * v[0] - u[1] * v[1], u[0] * v[1] + u[1] * v[0])


def _c_abs(u):
    re, im = abs(u[0]), abs(u[1])
    return iv.sqrt(re * re + im * im)


def _c_div(u, v):
    re, im = abs(v[0]), abs(v[1])
    den = re * re + im * im
    return ((u[0] * v[0] + u[1] * v[1]) / den,
            (u[1] * v[0] - u[0] * v[1]) / den)


def _c_horner(coeff_rects, w):
    acc = (iv.mpf(0), iv.mpf(0))
    for c in reversed(coeff_rects):
        acc = _c_mul(acc, w)
        acc = (acc[0] + c[0], acc[1] + c[1])
    return acc


def _canonical_quad(x, a4, a6, field, c_low, c_up, tol, prec):
    """The telescope over an imaginary quadratic PID; same architecture as
    _canonical_rational with ideal gcds for the finite parts and one
    complex rectangle for the archimedean ones. Returns (value, error,
    terms) as mpf."""
    disc = field.disc
    t, nt = _tau_mul_params(disc)
    a4p = (mpz(mpq(a4.a).numerator), mpz(mpq(a4.b).numerator))
    a6p = (mpz(mpq(a6.a).numerator), mpz(mpq(a6.b).numerator))

    def mul(u, v):
        bd = u[1] * v[1]
        return (u[0] * v[0] - nt * bd, u[0] * v[1] + u[1] * v[0] + t * bd)

    def modp(u, m):
        if m is None:
            return u
        return (u[0] % m, u[1] % m)

    def scale_int(u, k):
        return (k * u[0], k * u[1])

    def divexact(u, g, ng):
        gc = (g[0] + t * g[1], -g[1])
        w = mul(u, gc)
        return (w[0] // ng, w[1] // ng)

    def pair_values(xr, zr, m):
        x2 = modp(mul(xr, xr), m)
        z2 = modp(mul(zr, zr), m)
        z3 = modp(mul(z2, zr), m)
        a4z2 = modp(mul(a4p, z2), m)
        fr = mul(x2, (x2[0] - 2 * a4z2[0], x2[1] - 2 * a4z2[1]))
        t3 = mul(a6p, mul(xr, z3))
        t4 = mul(mul(a4p, a4p), mul(z2, z2))
        fr = (fr[0] - 8 * t3[0] + t4[0], fr[1] - 8 * t3[1] + t4[1])
        s = mul(x2, xr)
        s1 = mul(xr, a4z2)
        s2 = mul(a6p, z3)
        gr = mul(zr, (s[0] + s1[0] + s2[0], s[1] + s1[1] + s2[1]))
        return modp(fr, m), modp(scale_int(gr, 4), m)

    # integral primitive start: common denominator, then strip the content
    xa, xb = mpq(x.a), mpq(x.b)
    r = gmpy2.lcm(mpz(xa.denominator), mpz(xb.denominator))
    X = QuadInt(int(xa * r), int(xb * r), disc)
    Z = QuadInt(int(r), 0, disc)
    g0 = ideal_generator([X, Z])
    n0 = mpz(g0.norm())
    gp0 = (mpz(g0.a), mpz(g0.b))
    Xp = divexact((mpz(X.a), mpz(X.b)), gp0, n0)
    Zp = divexact((mpz(Z.a), mpz(Z.b)), gp0, n0)

    # exact shadow of the first doublings catches 2-power torsion x, whose
    # orbit reaches (1 : 0) exactly; torsion coordinates stay small under
    # full content stripping, so a bit cap cuts off every other orbit
    xe, ze = Xp, Zp
    for _ in range(5):
        if (xe[0].bit_length() + xe[1].bit_length()
                + ze[0].bit_length() + ze[1].bit_length()) > 65536:
            break
        fe, ge = pair_values(xe, ze, None)
        if not ge[0] and not ge[1]:
            return mpmath.mpf(0), mpmath.mpf(0), 0
        gs = ideal_generator([QuadInt(int(fe[0]), int(fe[1]), disc),
                              QuadInt(int(ge[0]), int(ge[1]), disc)])
        ns = mpz(gs.norm())
        gsp = (mpz(gs.a), mpz(gs.b))
        xe, ze = divexact(fe, gsp, ns), divexact(ge, gsp, ns)

    delta = _quad_resultant(WeierstrassCurve(a4, a6, field), field)
    nd = mpz(delta.norm())
    dpair = (mpz(delta.a), mpz(delta.b))
    n_terms = _pick_terms(c_low, c_up, mpmath.mpf(tol) / 2, _MAX_TERMS)

    f_coeffs = [mul(a4p, a4p), scale_int(a6p, -8), scale_int(a4p, -2),
                (mpz(0), mpz(0)), (mpz(1), mpz(0))]
    g_coeffs = [scale_int(a6p, 4), scale_int(a4p, 4), (mpz(0), mpz(0)),
                (mpz(4), mpz(0)), (mpz(0), mpz(0))]

    prec_i = max(int(prec), 96)
    while prec_i <= MAX_PREC:
        with iv_at(prec_i):
            ok = True
            # embeddings: tau and the duplication coefficients as rectangles
            sq = iv.sqrt(iv.mpf(-disc))
            tau_re = iv.mpf(1) / 2 if t else iv.mpf(0)
            tau_im = sq / 2
            def emb(u):
                bviv = _iv_q(u[1])
                return (_iv_q(u[0]) + bviv * tau_re, bviv * tau_im)
            f_emb = [emb(c) for c in f_coeffs]
            g_emb = [emb(c) for c in g_coeffs]
            f_emb_rev = list(reversed(f_emb))
            g_emb_rev = list(reversed(g_emb))

            mod = nd ** (n_terms + 2)
            xr, zr = modp(Xp, mod), modp(Zp, mod)
            Xs, Zs = emb(Xp), emb(Zp)
            xi = _c_div(Xs, Zs)
            acc = iv.mpf(0)
            scale = iv.mpf(1)
            for _ in range(n_terms):
                scale /= 4
                axi = _c_abs(xi)
                if axi.a >= 1:
                    w = _c_div(((iv.mpf(1), iv.mpf(0))), xi)
                    fv = _c_horner(f_emb_rev, w)
                    gv = _c_horner(g_emb_rev, w)
                    m_iv = _c_abs(fv)
                    gabs = _c_abs(gv)
                    m_iv = iv.mpf([max(m_iv.a, gabs.a), max(m_iv.b, gabs.b)])
                else:
                    fv = _c_horner(f_emb, xi)
                    gv = _c_horner(g_emb, xi)
                    m_iv = _c_abs(fv)
                    gabs = _c_abs(gv)
                    m_iv = iv.mpf([max(m_iv.a, gabs.a), max(m_iv.b, gabs.b)])
                    if axi.b > 1:
                        normv = iv.mpf([mpmath.mpf(1), axi.b])
                        m_iv = m_iv / normv ** 4
                if m_iv.a <= 0 or gabs.a <= 0:
                    ok = False
                    break
                fr, gr = pair_values(xr, zr, mod)
                gens = [delta]
                if fr[0] or fr[1]:
                    gens.append(QuadInt(int(fr[0]), int(fr[1]), disc))
                if gr[0] or gr[1]:
                    gens.append(QuadInt(int(gr[0]), int(gr[1]), disc))
                gq = ideal_generator(gens)
                ng = mpz(gq.norm())
                acc += scale * (iv.log(m_iv)
                                - iv.log(iv.mpf(int(ng))) / 2)
                assert mod % ng == 0, "step gcd norm must divide the modulus"
                mod //= ng
                gp = (mpz(gq.a), mpz(gq.b))
                xr = modp(divexact(fr, gp, ng), mod)
                zr = modp(divexact(gr, gp, ng), mod)
                xi = _c_div(fv, gv)
            if not ok:
                prec_i *= 2
                continue
            ax0 = _c_abs(Xs)
            az0 = _c_abs(Zs)
            h0 = iv.log(iv.mpf([max(ax0.a, az0.a), max(ax0.b, az0.b)]))
            tail = iv.mpf([-mpmath.mpf(c_low), mpmath.mpf(c_up)]) \
                / (3 * iv.mpf(4) ** n_terms)
            total = h0 + acc + tail
            value = (mpmath.mpf(total.a) + mpmath.mpf(total.b)) / 2
            err = (mpmath.mpf(total.b) - mpmath.mpf(total.a)) / 2
        if err <= tol:
            return value, err, n_terms
        prec_i *= 2
    raise PrecisionUnreachable("height interval will not shrink to %s" % tol)


# -- entry points ---------------------------------------------------------------

def _normalize_tolerances(kind, prec, tol):
    prec = int(prec) if prec else max(mpmath.mp.prec, 64)
    with mpmath.workprec(64):
        if tol is None:
            tol = mpmath.mpf("1e-9") if kind == "rational" \
                else mpmath.mpf("1e-6")
        else:
            tol = mpmath.mpf(tol)
        if tol <= 0:
            raise ValueError("tol must be positive")
        # keep rounding slack an order below the tolerance
        need = 24 + int(mpmath.ceil(-mpmath.log(tol) / mpmath.log(2)))
    return max(prec, need), tol


def _x_height(kind, field, cv, x, prec, tol):
    """Telescope dispatch once the base field is settled. x only; the
    doubling map never needs the y coordinate."""
    if kind == "cyclo" and field.phi == 2:
        # a degree-2 cyclotomic field is an imaginary quadratic PID
        # (m in {3, 4, 6}); reroute onto the quadratic fast path
        m = field.m
        qf = QuadField(-4 if m == 4 else -3)

        def conv(c):
            a, b = mpq(c.coords[0]), mpq(c.coords[1])
            if m == 3:
                # zeta_3 = tau - 1 in the (1, tau) basis of disc -3
                return QuadElt(a - b, b, -3)
            return QuadElt(a, b, qf.disc)

        cv = WeierstrassCurve(conv(field.of(cv.a4)), conv(field.of(cv.a6)),
                              qf)
        x = conv(field.of(x))
        kind, field = "quad", qf
    cvi, xi, _ = _integral_model(cv, x, None, kind)
    c_low, c_up = height_difference_bound(cvi)

    if kind == "rational":
        value, err, n = _canonical_rational(
            mpq(xi), mpz(mpq(cvi.a4).numerator), mpz(mpq(cvi.a6).numerator),
            c_low, c_up, tol, prec)
        return HeightEstimate(value, err, n)

    if kind == "quad" and field.disc in _CLASS_ONE_DISCS:
        value, err, n = _canonical_quad(xi, cvi.a4, cvi.a6, field,
                                        c_low, c_up, tol, prec)
        return HeightEstimate(value, err, n)

    n = _pick_terms(c_low, c_up, mpmath.mpf(tol) / 2, _MAX_DOUBLINGS_NF)
    a4, a6 = cvi.a4, cvi.a6
    zero = cvi.ring.zero
    w = xi
    for _ in range(n):
        gw = 4 * (w * w * w + a4 * w + a6)
        if gw == zero:
            return _exact_zero()   # the x orbit reached infinity exactly
        w2 = w * w
        w = (w2 * (w2 - 2 * a4) - 8 * a6 * w + a4 * a4) / gw
    h_n = proj_height((w, field.one), prec=prec + 64)
    with mpmath.workprec(prec + 32):
        q4 = mpmath.mpf(4) ** n
        cl, cu = mpmath.mpf(c_low), mpmath.mpf(c_up)
        value = h_n / q4 + (cu - cl) / (6 * q4)
        err = (cu + cl) / (6 * q4)
        err = err * (1 + mpmath.ldexp(1, -24)) + mpmath.ldexp(1, 16 - prec)
        if err > tol:
            raise PrecisionUnreachable("achieved %s, wanted %s" % (err, tol))
        return HeightEstimate(value, err, n)


def canonical_height(curve, point, prec=None, tol=None):
    """Canonical height of a point, certified to the requested tolerance.

    Returns a HeightEstimate whose interval [value - error_bound,
    value + error_bound] provably contains the canonical height, in the
    normalization hhat = lim h(x([2^n]P)) / 4^n. The point may sit on a
    rational model or carry coordinates in one imaginary quadratic field
    or one cyclotomic field of degree at most 8 (DegreeTooLarge above).
    Torsion is recognized exactly and reported as an exact zero. tol
    defaults to 1e-9 over the rationals, where series terms are cheap at
    any tolerance, and 1e-6 over a number field, where each doubling is a
    big exact field operation.
    """
    kind, field, cv, pt = _prepare(curve, point)
    if pt is None:
        return _exact_zero()
    prec, tol = _normalize_tolerances(kind, prec, tol)

    scan = cv.torsion_multiple_bound() if kind == "rational" else _TORSION_SCAN
    q = pt
    for _ in range(scan - 1):
        q = cv.add(q, pt)
        if q.is_infinity:
            return _exact_zero()
    return _x_height(kind, field, cv, pt.x, prec, tol)


def canonical_x_height(curve, x, prec=None, tol=None):
    """Canonical height through the x coordinate alone.

    The doubling telescope never looks at y: every point Q with x(Q) = x
    has the same canonical height, whatever extension its y lives in, and
    this entry point computes that number. It is the right tool for images
    under x-coordinate endomorphism maps, where constructing the image
    point would drag in an extra square root. There is no group law here,
    so torsion is not recognized symbolically: the x of a torsion point
    comes back as a tight interval around zero, except that an orbit
    reaching infinity exactly still short-circuits to an exact zero.
    """
    kind, field, cv = _coerce_field(curve, (x,))
    if field is not None:
        x = field.of(x)
    prec, tol = _normalize_tolerances(kind, prec, tol)
    return _x_height(kind, field, cv, x, prec, tol)


def is_torsion(curve, point):
    """Exact torsion test; True, False, or UNDECIDED.

    Over the rationals the answer is always definite: orders are bounded
    by the curve's torsion multiple bound, so a finite scan settles it.
    Over a quadratic or cyclotomic base a certified positive height gives
    a definite False and a vanishing multiple a definite True; a height
    interval straddling zero with no small vanishing multiple comes back
    UNDECIDED rather than guessed.
    """
    kind, field, cv, pt = _prepare(curve, point)
    if pt is None:
        return True
    if kind == "rational":
        q = pt
        for _ in range(cv.torsion_multiple_bound() - 1):
            q = cv.add(q, pt)
            if q.is_infinity:
                return True
        return False
    est = canonical_height(curve, point, tol=mpmath.mpf("1e-3"))
    if est.lower() > 0:
        return False
    q = pt
    for _ in range(_ORDER_CAP - 1):
        q = cv.add(q, pt)
        if q.is_infinity:
            return True
    return UNDECIDED
