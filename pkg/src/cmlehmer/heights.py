"""Absolute logarithmic heights on projective space and on subspaces.

The finite places are handled exactly: over Q by integer gcd normalization,
over an imaginary quadratic field or Q(zeta_m) through the norm of the
content ideal, computed as a lattice index in the ring of integers. Only the
archimedean contribution is floating point, evaluated with mpmath at a caller
controlled precision, so the error is a clean function of the working
precision rather than of coefficient size.

Two archimedean conventions are provided: the sup norm (plain h) and the
euclidean norm (h2, the one the subspace bounds want). They agree at the
finite places and differ by at most (1/2) log(n+1) on n-dimensional space.
"""

from __future__ import annotations

import mpmath
from gmpy2 import mpq, mpz

from ._linalg import kernel_field, lattice_index, minors_full, rank_field
from ._poly import QQ
from ._rat import rational
from .errors import RankDeficient, UnsupportedField
from .exactnum.algnum import AlgebraicNumber
from .exactnum.cyclo import CycloElt, CycloField
from .exactnum.quadint import QuadElt, QuadField, QuadInt, ideal_generator

_GUARD = 24  # extra working bits so the reported digits are honest


class ProjectivePoint:
    """Tuple of homogeneous coordinates; at least one must be nonzero."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        coords = tuple(coords)
        if not coords or not any(coords):
            raise ValueError("projective point needs a nonzero coordinate")
        self.coords = coords

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __repr__(self):
        return "ProjectivePoint(%r)" % (self.coords,)


def _as_coords(point):
    if isinstance(point, ProjectivePoint):
        return point.coords
    return ProjectivePoint(point).coords


def proj_height(point, l2=False, prec=None):
    """Absolute logarithmic Weil height of a projective point.

    Coordinates may be rational numbers, elements of one imaginary quadratic
    field, elements of one cyclotomic field, or a pair of AlgebraicNumbers.
    Returns an mpmath.mpf computed at `prec` bits (default: current mpmath
    precision).
    """
    coords = _as_coords(point)
    prec = prec or mpmath.mp.prec
    kinds = set()
    for c in coords:
        if isinstance(c, CycloElt):
            kinds.add("cyclo")
        elif isinstance(c, (QuadElt, QuadInt)):
            kinds.add("quad")
        elif isinstance(c, AlgebraicNumber):
            kinds.add("alg")
        else:
            try:
                rational(c)
            except (TypeError, ValueError):
                raise UnsupportedField(
                    "unsupported coordinate type %s" % type(c).__name__)
    if "alg" in kinds:
        if kinds != {"alg"} and kinds != {"alg", }:
            raise UnsupportedField("algebraic coordinates cannot be mixed")
        if len(coords) != 2:
            raise UnsupportedField(
                "algebraic-number heights are implemented for pairs only")
        return _alg_pair_height(coords, l2, prec)
    if "cyclo" in kinds and "quad" in kinds:
        raise UnsupportedField("mixed quadratic and cyclotomic coordinates")
    if "cyclo" in kinds:
        return _cyclo_height(coords, l2, prec)
    if "quad" in kinds:
        return _quad_height(coords, l2, prec)
    return _rational_height(coords, l2, prec)


def _rational_height(coords, l2, prec):
    qs = [rational(c) for c in coords]
    den = mpz(1)
    for q in qs:
        den = den // _gcd(den, q.denominator) * q.denominator
    ints = [mpz(q * den) for q in qs]
    g = mpz(0)
    for v in ints:
        g = _gcd(g, v)
    ints = [v // g for v in ints]
    with mpmath.workprec(prec + _GUARD):
        if l2:
            s = mpmath.mpf(0)
            for v in ints:
                s += mpmath.mpf(int(v)) ** 2
            out = mpmath.log(s) / 2
        else:
            out = mpmath.log(max(abs(int(v)) for v in ints))
        return +out


def _gcd(a, b):
    import gmpy2
    return gmpy2.gcd(mpz(a), mpz(b))


def _quad_height(coords, l2, prec):
    disc = None
    for c in coords:
        if isinstance(c, (QuadElt, QuadInt)):
            disc = c.disc
            break
    kf = QuadField(disc)
    elts = [_to_quadelt(c, kf) for c in coords]
    den = mpz(1)
    for e in elts:
        for q in (e.a, e.b):
            den = den // _gcd(den, q.denominator) * q.denominator
    ints = [QuadInt(e.a * den, e.b * den, disc) for e in elts]
    content = ideal_generator([v for v in ints if v])
    nrm = content.norm()
    with mpmath.workprec(prec + _GUARD):
        h_fin = mpmath.log(int(den)) - mpmath.log(int(nrm)) / 2
        # both archimedean embeddings are complex conjugates: equal weight 1
        vals = [abs(e.embed(prec + _GUARD)) for e in elts]
        if l2:
            h_arch = mpmath.log(sum(v ** 2 for v in vals)) / 2
        else:
            h_arch = mpmath.log(max(vals))
        return +(h_fin + h_arch)


def _to_quadelt(c, kf):
    if isinstance(c, QuadElt):
        if c.disc != kf.disc:
            raise UnsupportedField("mixed quadratic fields")
        return c
    if isinstance(c, QuadInt):
        if c.disc != kf.disc:
            raise UnsupportedField("mixed quadratic fields")
        return QuadElt(c.a, c.b, kf.disc)
    return QuadElt(rational(c), 0, kf.disc)


def _cyclo_height(coords, l2, prec):
    field = None
    for c in coords:
        if isinstance(c, CycloElt):
            field = c.field
            break
    elts = []
    for c in coords:
        if isinstance(c, CycloElt):
            if c.field.m != field.m:
                raise UnsupportedField("mixed cyclotomic fields")
            elts.append(c)
        else:
            q = rational(c)
            cs = [mpq(0)] * field.phi
            cs[0] = q
            elts.append(CycloElt(field, cs))
    d = field.phi
    if d == 1:
        return _rational_height([e.coords[0] for e in elts], l2, prec)
    den = mpz(1)
    for e in elts:
        for q in e.coords:
            den = den // _gcd(den, q.denominator) * q.denominator
    # rows: power-basis coordinates of den * x_i * zeta^j; their Z-span is
    # the content ideal as a sublattice of Z[zeta]
    zeta = CycloElt(field, [mpq(0), mpq(1)] + [mpq(0)] * (d - 2))
    rows = []
    for e in elts:
        cur = e * den
        for _ in range(d):
            rows.append([mpz(q) for q in cur.coords])
            cur = cur * zeta
    try:
        index = lattice_index(rows)
    except Exception:
        raise RankDeficient("content lattice is not full rank")
    with mpmath.workprec(prec + _GUARD):
        h_fin = mpmath.log(int(den)) - mpmath.log(int(index)) / d
        total = mpmath.mpf(0)
        for u in range(1, field.m):
            if _gcd(u, field.m) != 1:
                continue
            vals = [abs(e.embed(u, prec + _GUARD)) for e in elts]
            if l2:
                total += mpmath.log(sum(v ** 2 for v in vals)) / 2
            else:
                total += mpmath.log(max(vals))
        return +(h_fin + total / d)


def _alg_pair_height(coords, l2, prec):
    a, b = coords
    if not isinstance(a, AlgebraicNumber):
        a = AlgebraicNumber.from_rational(rational(a))
    if not isinstance(b, AlgebraicNumber):
        b = AlgebraicNumber.from_rational(rational(b))
    if b.is_rational() and not b.rational_value():
        a, b = b, a
    if l2:
        raise UnsupportedField("l2 height is not defined on algebraic pairs")
    ratio = a / b
    return mahler_height(ratio, prec=prec)


def height_l2(point, prec=None):
    """Euclidean-at-infinity variant of proj_height."""
    return proj_height(point, l2=True, prec=prec)


# -- heights of single numbers ------------------------------------------------


def mahler_height(x, prec=None):
    """Height of an algebraic number: (1/deg) log M(minimal polynomial),
    the minimal polynomial taken primitive with integer coefficients."""
    prec = prec or mpmath.mp.prec
    if isinstance(x, AlgebraicNumber):
        return log_mahler_measure(x.minpoly_int(), prec=prec) / x.degree
    if isinstance(x, (QuadElt, QuadInt)):
        return proj_height((x, 1), prec=prec)
    if isinstance(x, CycloElt):
        one = CycloElt(x.field, [mpq(1)] + [mpq(0)] * (x.field.phi - 1))
        return proj_height((x, one), prec=prec)
    q = rational(x)
    with mpmath.workprec(prec + _GUARD):
        return +mpmath.log(max(abs(int(q.numerator)), int(q.denominator)))


def log_mahler_measure(coeffs, prec=None):
    """log M(p) = log|lead| + sum of log|root| over roots outside the unit
    circle, for a polynomial given by its coefficient list (constant first).

    The roots come from mpmath's polynomial solver run with a healthy
    precision surplus; near-unit roots are where the log+ could flip, and
    the surplus makes that region numerically safe for the integer
    polynomials this workbench feeds in.
    """
    prec = prec or mpmath.mp.prec
    cs = [rational(c) for c in coeffs]
    while cs and not cs[-1]:
        cs.pop()
    if not cs:
        raise ValueError("zero polynomial has no Mahler measure")
    if len(cs) == 1:
        with mpmath.workprec(prec + _GUARD):
            return +abs(mpmath.log(abs(mpmath.mpf(int(cs[0].numerator))
                                       / int(cs[0].denominator))))
    work = max(prec + _GUARD, 2 * prec)
    with mpmath.workprec(work):
        poly = [mpmath.mpf(int(c.numerator)) / int(c.denominator)
                for c in reversed(cs)]
        roots = mpmath.polyroots(poly, maxsteps=200, extraprec=work)
        acc = mpmath.log(abs(poly[0]))
        for r in roots:
            a = abs(r)
            if a > 1:
                acc += mpmath.log(a)
        with mpmath.workprec(prec + _GUARD):
            return +acc


# -- subspace heights ---------------------------------------------------------


class SubspaceBasis:
    """Rational basis of a linear subspace of Q^n, rows independent."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = [tuple(rational(c) for c in r) for r in rows]
        if not rows:
            raise ValueError("empty basis")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise ValueError("ragged basis rows")
        if rank_field(rows, QQ) != len(rows):
            raise RankDeficient("basis rows are dependent")
        self.rows = rows

    @property
    def dim(self):
        return len(self.rows)

    @property
    def ambient(self):
        return len(self.rows[0])

    def plucker(self):
        """Grassmann coordinates: the maximal minors in lexicographic order."""
        return minors_full(self.rows, QQ)

    def orthogonal_complement(self):
        """Basis of the perp space under the standard bilinear form."""
        comp = kernel_field(self.rows, QQ, ncols=self.ambient)
        return SubspaceBasis(comp)


def subspace_height(basis, prec=None):
    """Height of a subspace: the l2 projective height of its Grassmann
    coordinate vector. Invariant under change of basis and equal to the
    height of the orthogonal complement."""
    if not isinstance(basis, SubspaceBasis):
        basis = SubspaceBasis(basis)
    return proj_height(basis.plucker(), l2=True, prec=prec)
