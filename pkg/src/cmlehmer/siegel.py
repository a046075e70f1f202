"""Auxiliary functions vanishing to high order at a set of curve points.

The object built here is

    phi(z) = sum_{l1, l2 <= L} p(l1, l2) * x(z)^l1 * x(nz)^l2

with integer coefficients p, chosen so that phi and its first T derivatives
along the group flow vanish at every supplied point. The pipeline is exact
end to end: derivative rows are Taylor jets of the x-coordinate (the
symbolic recursion behind them is exposed separately and used as an oracle
in tests), the solution lattice is the saturated integer kernel, and LLL
reduction plays the role of an absolute Siegel lemma. The achieved height
is compared against the nonconstructive bound and asserted, in exact
integer arithmetic, to stay below a relaxed version of it whose slack is
the classical LLL approximation factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial, isqrt

import mpmath
from gmpy2 import lcm, mpq, mpz
from sympy import isprime, nextprime

from ._linalg import (det_field, hnf_with_transform, integer_kernel,
                      lll_reduce, norm_sq, rank_field)
from ._poly import QQ, MPoly4, Poly, RatFunc
from .errors import (DegenerateParameters, DegreeTooLarge, EmptyKernel,
                     UnsupportedField)
from .heights import SubspaceBasis, height_l2, subspace_height
from .neron_tate import _coerce_field
from .weierstrass.curve import CurvePoint
from .weierstrass.divpoly import mult_map

_REPORT_PREC = 128
_MINOR_BUDGET = 50000  # largest minor count worth evaluating directly


# -- symbolic derivative recursion ------------------------------------------

def _derivation(a4, n):
    """One z-derivative as an operator on polynomials in the four slots
    (x(z), x'(z), x(nz), x'(nz)), using x'' = 6x^2 + 2a4."""
    m1 = MPoly4.var(1)
    m2 = MPoly4({(2, 0, 0, 0): 6, (0, 0, 0, 0): 2 * a4})
    m3 = MPoly4({(0, 0, 0, 1): n})
    m4 = MPoly4({(0, 0, 2, 0): 6 * n, (0, 0, 0, 0): 2 * a4 * n})

    def step(q):
        return (q.partial(0) * m1 + q.partial(1) * m2 +
                q.partial(2) * m3 + q.partial(3) * m4)

    return step


@dataclass(frozen=True)
class DerivativePoly:
    """t-th derivative of x(z)^lambda1 * x(nz)^lambda2 written as a
    polynomial in (x(z), x'(z), x(nz), x'(nz))."""

    lambda1: int
    lambda2: int
    order: int
    poly: MPoly4

    def partial_degrees(self):
        degs = [0, 0, 0, 0]
        for e in self.poly.terms:
            for i in range(4):
                if e[i] > degs[i]:
                    degs[i] = e[i]
        return tuple(degs)

    def max_coeff_abs(self):
        """Largest absolute coefficient; the growth rate in the order is
        audited empirically, never assumed."""
        return max((abs(c) for c in self.poly.terms.values()),
                   default=mpq(0))

    def eval_at(self, vals):
        return self.poly.eval4(vals)


_Q_CACHE = {}


def derivative_poly(lambda1, lambda2, order, curve, n):
    """The symbolic form of (d/dz)^order (x(z)^lambda1 * x(nz)^lambda2).

    Kept over a rational model: the recursion's coefficients live in
    Z[a4, n], and every catalog curve is defined over Q. Each computed
    ladder is cached per (a4, n, lambda1, lambda2).
    """
    if curve.ring != QQ:
        raise UnsupportedField("derivative recursion needs a rational model")
    if min(lambda1, lambda2, order) < 0:
        raise ValueError("negative exponent or order")
    a4 = mpq(curve.a4)
    key = (a4, int(n), lambda1, lambda2)
    ladder = _Q_CACHE.setdefault(key, [])
    if not ladder:
        e0 = (lambda1, 0, lambda2, 0)
        ladder.append(MPoly4({e0: 1}))
    step = None
    while len(ladder) <= order:
        if step is None:
            step = _derivation(a4, int(n))
        ladder.append(step(ladder[-1]))
    q = ladder[order]
    dp = DerivativePoly(lambda1, lambda2, order, q)
    base = max(lambda1, lambda2)
    assert all(d <= base + 2 * order for d in dp.partial_degrees())
    return dp


# -- jets of the x-coordinate along the flow ---------------------------------

def _x_jet(x0, w0, a4, length):
    """Taylor coefficients of the x-coordinate: x(u+z) = sum c_k z^k with
    c0 the x-value and c1 the derivative 2y; higher terms follow from
    x'' = 6x^2 + 2a4."""
    c = [x0, w0]
    a4_2 = a4 + a4
    for k in range(length - 2):
        conv = c[0] * c[k]
        for j in range(1, k + 1):
            conv = conv + c[j] * c[k - j]
        term = 6 * conv
        if k == 0:
            term = term + a4_2
        c.append(mpq(1, (k + 2) * (k + 1)) * term)
    return c[:length]


def _series_mul(a, b, length, zero):
    out = [zero] * length
    for i, ai in enumerate(a):
        if not ai:
            continue
        for j in range(length - i):
            bj = b[j]
            if bj:
                out[i + j] = out[i + j] + ai * bj
    return out


def _pow_table(series, top, length, one, zero):
    tab = [[one] + [zero] * (length - 1)]
    for _ in range(top):
        tab.append(_series_mul(tab[-1], series, length, zero))
    return tab


def _flow_series(curve, pt, n, length):
    """Jets of x(u+z) and x(n(u+z)) at an affine point, plus the 4-tuple of
    exact slot values the symbolic recursion evaluates at."""
    q = curve.scalar_mul(n, pt)
    if q.is_infinity:
        raise DegenerateParameters(
            "point has order dividing %d; the scaled jet degenerates" % n)
    w = pt.y + pt.y
    wq = q.y + q.y
    xj = _x_jet(pt.x, w, curve.a4, length)
    base = _x_jet(q.x, wq, curve.a4, length)
    xnj = []
    scale = 1
    for c in base:
        xnj.append(c * scale if scale != 1 else c)
        scale *= n
    return xj, xnj, (pt.x, w, q.x, wq)


def _settle(curve, points):
    """Move the curve and every point onto one base field."""
    coords = []
    raw = []
    for p in points:
        if isinstance(p, CurvePoint):
            if p.is_infinity:
                raise DegenerateParameters(
                    "cannot impose vanishing at the group origin")
            x, y = p.x, p.y
        else:
            x, y = p
        raw.append((x, y))
        coords.extend((x, y))
    kind, fld, cv = _coerce_field(curve, tuple(coords))
    pts = [cv.point(x, y) for x, y in raw]
    return kind, fld, cv, pts


def column_index(l1, l2, width):
    """Column of the exponent pair; the first exponent varies fastest."""
    return l1 + width * l2


def column_pair(col, width):
    return col % width, col // width


# -- the linear system --------------------------------------------------------

@dataclass
class VanishingSystem:
    """Rows expressing phi^(t)(u_i) = 0 for t < T over the point set.

    Row (i, t), column (l1, l2): the t-th derivative of
    x(z)^l1 * x(nz)^l2 evaluated at u_i, an exact element of the base
    field. Column order puts l1 fastest; `index` lists (i, t) per row.
    """

    curve: object
    points: list
    L: int
    T: int
    n: int
    kind: str
    field: object
    rows: list
    index: list
    evaluations: list

    @property
    def ambient(self):
        return (self.L + 1) ** 2

    @property
    def k(self):
        return len(self.points)

    def column_of(self, l1, l2):
        return column_index(l1, l2, self.L + 1)

    def rank(self):
        return rank_field(self.rows, self.field if self.field is not None
                          else QQ)

    def integer_rows(self):
        """Restriction of scalars to Q followed by denominator clearing;
        all-zero component rows are dropped."""
        return _restrict_rows(self)


def build_system(curve, conjugate_points, L, T, n):
    """Assemble the vanishing conditions for the given exponent cap L,
    derivative order T, and prime multiplier n.

    The points should form complete conjugate orbits over Q: the later
    kernel step works over the integers, and splitting an algebraic row
    into rational coordinates is faithful exactly when the coordinate
    rows it adds are the rows of the conjugate points, already present.
    """
    L, T, n = int(L), int(T), int(n)
    if L < 1 or T < 1:
        raise DegenerateParameters("L and T must be positive")
    if not conjugate_points:
        raise DegenerateParameters("empty point set")
    if not isprime(n):
        raise DegenerateParameters("multiplier %d is not prime" % n)
    k = len(conjugate_points)
    if (L + 1) ** 2 <= k * T:
        raise DegenerateParameters(
            "(L+1)^2 = %d rows of conditions = %d: no kernel is guaranteed"
            % ((L + 1) ** 2, k * T))
    kind, fld, cv, pts = _settle(curve, conjugate_points)
    if len(set(pts)) != len(pts):
        raise DegenerateParameters("points are not pairwise distinct")
    ring = fld if fld is not None else QQ
    zero, one = ring.zero, ring.one
    width = L + 1
    rows, index, evals = [], [], []
    for i, pt in enumerate(pts):
        xj, xnj, vals = _flow_series(cv, pt, n, T)
        evals.append(vals)
        xp = _pow_table(xj, L, T, one, zero)
        xnp = _pow_table(xnj, L, T, one, zero)
        for t in range(T):
            fact = mpq(factorial(t))
            row = [zero] * (width * width)
            for l2 in range(width):
                xnrow = xnp[l2]
                for l1 in range(width):
                    xrow = xp[l1]
                    s = xrow[0] * xnrow[t]
                    for j in range(1, t + 1):
                        s = s + xrow[j] * xnrow[t - j]
                    row[l1 + width * l2] = fact * s if t > 1 else s
            rows.append(tuple(row))
            index.append((i, t))
    return VanishingSystem(curve=cv, points=pts, L=L, T=T, n=n, kind=kind,
                           field=fld, rows=rows, index=index,
                           evaluations=evals)


def _restrict_rows(system):
    if system.kind == "cyclo" and system.field.phi > 4:
        raise DegreeTooLarge(
            "restriction of scalars supports degree <= 4, got %d"
            % system.field.phi)
    out = []
    for row in system.rows:
        if system.kind == "rational":
            comps = [[mpq(e) for e in row]]
        elif system.kind == "quad":
            comps = [[e.a for e in row], [e.b for e in row]]
        else:
            phi = system.field.phi
            comps = [[e.coords[j] for e in row] for j in range(phi)]
        out.extend(_clear_denominators(c) for c in comps if any(c))
    return out


def _clear_denominators(comp):
    den = mpz(1)
    for q in comp:
        den = lcm(den, q.denominator)
    return [mpz(q * den) for q in comp]


# -- small solutions ----------------------------------------------------------

def small_lattice_solution(rows, ambient):
    """Shortest LLL-basis vector of the integer solution lattice of a
    rational homogeneous system, with a height report.

    The relaxed bound h2(S)/d + (log d)/2 + (d-1)/4 * log 2 is asserted in
    exact integer arithmetic: with G the Gram determinant of the kernel
    lattice and v the solution, the claim reads
    |v|^(2d) <= G * d^d * 2^(d(d-1)/2). The pure LLL guarantee (the same
    without the d^d factor) is recorded as a boolean, not asserted.
    """
    int_rows = [r for r in (_clear_denominators([mpq(c) for c in row])
                            for row in rows) if any(r)]
    if int_rows:
        kernel = integer_kernel(int_rows)
    else:
        kernel = [[mpz(1 if i == j else 0) for j in range(ambient)]
                  for i in range(ambient)]
    if not kernel:
        raise EmptyKernel("the system has full column rank")
    reduced = lll_reduce(kernel)
    v = min(reduced, key=norm_sq)
    for c in v:
        if c:
            if c < 0:
                v = [-x for x in v]
            break
    d = len(reduced)
    v2 = norm_sq(v)
    gram = [[sum(a * b for a, b in zip(r1, r2)) for r2 in reduced]
            for r1 in reduced]
    gdet = det_field(gram, QQ)
    assert gdet.denominator == 1 and gdet > 0
    g_int = mpz(gdet)
    # exact form of the relaxed height bound
    assert v2 ** d <= g_int * mpz(d) ** d * mpz(2) ** (d * (d - 1) // 2), \
        "lattice reduction failed its own guarantee"
    lll_ok = bool(v2 ** d <= g_int * mpz(2) ** (d * (d - 1) // 2))

    with mpmath.workprec(_REPORT_PREC):
        h2x = height_l2(tuple(v), prec=_REPORT_PREC)
        h2s = mpmath.log(mpmath.mpf(int(g_int))) / 2
        log2 = mpmath.log(2)
        slack = (d - 1) * log2 / 4
        relaxed = h2s / d + mpmath.log(d) / 2 + slack
        if int_rows:
            h, _ = hnf_with_transform(int_rows)
            basis = [r for r in h if any(r)]
            h2perp = subspace_height(SubspaceBasis(basis),
                                     prec=_REPORT_PREC)
            duality_checked = comb(ambient, d) <= _MINOR_BUDGET
            if duality_checked:
                h2ker = subspace_height(SubspaceBasis(kernel),
                                        prec=_REPORT_PREC)
            else:
                h2ker = h2perp
        else:
            # zero system: the kernel is everything, its complement nothing
            h2perp = mpmath.mpf(0)
            h2ker = subspace_height(SubspaceBasis(kernel),
                                    prec=_REPORT_PREC)
            duality_checked = True
    report = {
        "ambient": ambient,
        "rows": len(int_rows),
        "kernel_dim": d,
        "solution_norm_sq": int(v2),
        "h2_solution": float(h2x),
        "h2_kernel": float(h2ker),
        "h2_row_space": float(h2perp),
        "duality_checked": duality_checked,
        "lll_slack": float(slack),
        "relaxed_bound": float(relaxed),
        "within_relaxed": True,
        "lll_guarantee_ok": lll_ok,
    }
    return [mpz(c) for c in v], report


@dataclass
class AuxFunction:
    """Coefficients of phi, sparse over the exponent grid [0,L]^2."""

    coeffs: dict
    L: int
    n: int

    def __post_init__(self):
        self.coeffs = {k: mpz(c) for k, c in self.coeffs.items() if c}
        if not self.coeffs:
            raise ValueError("auxiliary function with all-zero coefficients")

    def coefficient(self, l1, l2):
        return self.coeffs.get((l1, l2), mpz(0))

    def vector(self):
        width = self.L + 1
        out = [mpz(0)] * (width * width)
        for (l1, l2), c in self.coeffs.items():
            out[column_index(l1, l2, width)] = c
        return out


def small_kernel_vector(system):
    """Auxiliary function from the vanishing system, plus the height report.

    On top of the lattice report this adds the nonconstructive target
    bound h2(S)/d + (log d)/2 + eps with
    eps = (1/2) log((L+1)^2 / ((L+1)^2 - kT)), the signed gap of the
    achieved height to it, and the sum of the row heights (an upper bound
    for h2 of the row space, recorded for the audit). The returned
    coefficients are re-verified against the exact vanishing conditions.
    """
    int_rows = system.integer_rows()
    width = system.L + 1
    v, report = small_lattice_solution(int_rows, system.ambient)
    coeffs = {}
    for col, c in enumerate(v):
        if c:
            coeffs[column_pair(col, width)] = c
    phi = AuxFunction(coeffs, system.L, system.n)
    kt = system.k * system.T
    with mpmath.workprec(_REPORT_PREC):
        amb = mpmath.mpf(system.ambient)
        eps = mpmath.log(amb / (amb - kt)) / 2
        d = report["kernel_dim"]
        absolute = (mpmath.mpf(report["h2_kernel"]) / d +
                    mpmath.log(d) / 2 + eps)
        rowsum = mpmath.mpf(0)
        for row in system.rows:
            rowsum += height_l2(row, prec=_REPORT_PREC)
    report.update({
        "L": system.L,
        "T": system.T,
        "n": system.n,
        "k": system.k,
        "epsilon": float(eps),
        "absolute_bound": float(absolute),
        "gap_to_absolute": float(mpmath.mpf(report["h2_solution"]) -
                                 absolute),
        "row_height_sum": float(rowsum),
    })
    ok = verify_vanishing(phi, system.points, system.T, curve=system.curve)
    assert ok, "kernel vector fails the exact vanishing recheck"
    report["verified_vanishing"] = True
    return phi, report


# -- verification -------------------------------------------------------------

def _phi_series(phi, curve, pt, length):
    """Truncated Taylor expansion of phi(u + z) at the point, exact."""
    max1 = max(l1 for l1, _ in phi.coeffs)
    max2 = max(l2 for _, l2 in phi.coeffs)
    ring = curve.ring
    zero, one = ring.zero, ring.one
    xj, xnj, _ = _flow_series(curve, pt, phi.n, length)
    xp = _pow_table(xj, max1, length, one, zero)
    xnp = _pow_table(xnj, max2, length, one, zero)
    out = [zero] * length
    for (l1, l2), c in phi.coeffs.items():
        a, b = xp[l1], xnp[l2]
        cq = mpq(c)
        for t in range(length):
            s = a[0] * b[t]
            for j in range(1, t + 1):
                s = s + a[j] * b[t - j]
            out[t] = out[t] + cq * s
    return out


def phi_derivative_values(phi, curve, point, order):
    """phi^(t) at the point for t < order, as exact field elements; the
    extrapolation step consumes these."""
    kind, fld, cv, pts = _settle(curve, [point])
    series = _phi_series(phi, cv, pts[0], order)
    return [mpq(factorial(t)) * series[t] for t in range(order)]


def verify_vanishing(phi, points, order, curve=None):
    """Exact check that phi vanishes to the given order at every point."""
    if curve is None:
        if not points or not isinstance(points[0], CurvePoint):
            raise ValueError("pass curve= when points are bare pairs")
        curve = points[0].curve
    kind, fld, cv, pts = _settle(curve, points)
    for pt in pts:
        series = _phi_series(phi, cv, pt, order)
        if any(series[t] for t in range(order)):
            return False
    return True


def vanishing_order(phi, curve, point, cap):
    """Smallest derivative order with a nonzero value at the point, or
    None if everything below the cap vanishes."""
    kind, fld, cv, pts = _settle(curve, [point])
    series = _phi_series(phi, cv, pts[0], cap)
    for t, val in enumerate(series):
        if val:
            return t
    return None


# -- phi as a rational function of x ------------------------------------------

@dataclass
class PhiRational:
    """phi written over the common denominator s(x)^L, where
    x(nz) = r(x)/s(x) is the x-map of multiplication by n."""

    numerator: Poly
    denominator: Poly
    fraction: RatFunc
    degree: int
    degree_bound: int


def _eval_poly(poly, x):
    acc = None
    for c in reversed(poly.cs):
        acc = c if acc is None else acc * x + c
    return acc if acc is not None else x * 0


def phi_as_rational_function(phi, curve):
    """Collapse phi to a one-variable rational function of x.

    The numerator keeps integer coefficients; the reduced fraction and its
    degree come back alongside, with the degree checked against
    (n^2 + 1) L. A cancellation to zero would mean the auxiliary function
    was trivial and raises instead of returning.
    """
    if curve.ring != QQ:
        raise UnsupportedField("needs the rational model")
    n, L = phi.n, phi.L
    r_poly, s_poly = mult_map(curve, n).integer_pair()
    rp = [Poly(QQ, [mpq(1)], trusted=True)]
    sp = [Poly(QQ, [mpq(1)], trusted=True)]
    for _ in range(L):
        rp.append(rp[-1] * r_poly)
        sp.append(sp[-1] * s_poly)
    total = None
    width = L + 1
    for l2 in range(width):
        col = [mpq(phi.coefficient(l1, l2)) for l1 in range(width)]
        if not any(col):
            continue
        part = Poly(QQ, col) * rp[l2] * sp[L - l2]
        total = part if total is None else total + part
    if total is None or total.is_zero():
        raise DegenerateParameters("coefficients cancel to the zero function")
    den = sp[L]
    frac = RatFunc(total, den)
    degree = max(frac.num.degree, frac.den.degree)
    bound = (n * n + 1) * L
    assert total.degree <= bound and degree <= bound
    return PhiRational(numerator=total, denominator=den, fraction=frac,
                       degree=degree, degree_bound=bound)


def zero_count_report(phi, curve, points, cap=None):
    """Vanishing orders at the points against the degree of phi's
    rational function: the total, multiplicity included, can never exceed
    the degree of the numerator.

    Requires every point to have y != 0 and x off the zero set of the
    denominator, and the x-values pairwise distinct; under these the
    order of phi along the flow equals the root order of the numerator at
    the point's x.
    """
    rat = phi_as_rational_function(phi, curve)
    deg = rat.numerator.degree
    if cap is None:
        cap = deg + 1
    kind, fld, cv, pts = _settle(curve, points)
    seen = set()
    orders = []
    for pt in pts:
        if not pt.y:
            raise DegenerateParameters("two-torsion point: the flow "
                                       "parameter ramifies over x")
        if pt.x in seen:
            raise DegenerateParameters("repeated x-coordinate")
        seen.add(pt.x)
        if not _eval_poly(rat.denominator, pt.x):
            raise DegenerateParameters("x lies in the denominator's zero set")
        series = _phi_series(phi, cv, pt, cap)
        order = next((t for t, val in enumerate(series) if val), None)
        assert order is not None, "vanishing beyond the numerator degree"
        orders.append(order)
    total = sum(orders)
    return {
        "orders": orders,
        "total": total,
        "degree": deg,
        "bounded": total <= deg,
    }


# -- multiplier selection ------------------------------------------------------

@dataclass(frozen=True)
class MultiplierChoice:
    n: int
    in_window: bool
    in_low_window: bool


def multiplier_choice(L):
    """Smallest prime whose square exceeds L.

    Two published windows for the multiplier contradict each other: the
    open one asks sqrt(L) < n < 2 sqrt(L), the low one sqrt(L)/2 <= n <=
    sqrt(L), and no prime can satisfy both. The default targets the open
    window and the flags record where the choice actually landed, so a
    report can surface the discrepancy instead of hiding it.
    """
    L = int(L)
    if L < 1:
        raise DegenerateParameters("exponent cap must be positive")
    n = int(nextprime(isqrt(L)))
    n2 = n * n
    return MultiplierChoice(n=n, in_window=(L < n2 < 4 * L),
                            in_low_window=(L <= 4 * n2 and n2 <= L))
