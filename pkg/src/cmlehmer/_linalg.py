"""Exact linear algebra: field RREF/kernels, integer HNF, LLL, enumeration.

Field routines are generic over any exact field elements with operator
arithmetic. Integer routines work on lists of lists of mpz and are only used
at the small dimensions this package produces (tens, not thousands), so the
classical algorithms are the right tool; no floating point anywhere.
"""

from __future__ import annotations

from itertools import combinations

from gmpy2 import mpq, mpz


# ---------------------------------------------------------------------------
# generic field routines


def rref_field(rows, ring):
    """Reduced row echelon form. Returns (rref, pivot_columns)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for j in range(ncols):
        pr = None
        for i in range(r, len(m)):
            if m[i][j]:
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = ring.one / m[r][j]
        m[r] = [c * inv for c in m[r]]
        for i in range(len(m)):
            if i != r and m[i][j]:
                f = m[i][j]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(j)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank_field(rows, ring):
    return len(rref_field(rows, ring)[1])


def kernel_field(rows, ring, ncols=None):
    """Basis of the right kernel {x : rows @ x = 0} over the field."""
    if not rows:
        if ncols is None:
            raise ValueError("need ncols for empty system")
        basis = []
        for j in range(ncols):
            v = [ring.zero] * ncols
            v[j] = ring.one
            basis.append(v)
        return basis
    ncols = len(rows[0])
    rr, pivots = rref_field(rows, ring)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for fj in free:
        v = [ring.zero] * ncols
        v[fj] = ring.one
        for i, pj in enumerate(pivots):
            v[pj] = -rr[i][fj]
        basis.append(v)
    return basis


def det_field(rows, ring):
    """Determinant by fraction-full Gaussian elimination."""
    n = len(rows)
    m = [list(r) for r in rows]
    det = ring.one
    for j in range(n):
        pr = None
        for i in range(j, n):
            if m[i][j]:
                pr = i
                break
        if pr is None:
            return ring.zero
        if pr != j:
            m[j], m[pr] = m[pr], m[j]
            det = -det
        det = det * m[j][j]
        inv = ring.one / m[j][j]
        for i in range(j + 1, n):
            if m[i][j]:
                f = m[i][j] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[j])]
    return det


def minors_full(rows, ring):
    """All maximal minors of an r x n matrix (r <= n), in lexicographic
    column-subset order. These are the Grassmann coordinates of the row span."""
    r = len(rows)
    n = len(rows[0])
    if r > n:
        raise ValueError("more rows than columns")
    out = []
    for cols in combinations(range(n), r):
        sub = [[row[c] for c in cols] for row in rows]
        out.append(det_field(sub, ring))
    return out


# ---------------------------------------------------------------------------
# integer lattice routines (mpz)


def _as_mpz_matrix(rows):
    return [[mpz(c) for c in row] for row in rows]


def hnf_with_transform(rows):
    """Row-style Hermite normal form.

    Returns (H, U) with U unimodular, U @ M = H, H in row echelon form with
    positive pivots and entries above each pivot reduced to [0, pivot).
    """
    m = _as_mpz_matrix(rows)
    nr = len(m)
    nc = len(m[0]) if nr else 0
    u = [[mpz(1 if i == j else 0) for j in range(nr)] for i in range(nr)]
    r = 0
    for j in range(nc):
        if r == nr:
            break
        # clear column j below row r by gcd descent
        while True:
            nz = [i for i in range(r, nr) if m[i][j]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(m[i][j]))
            if piv != r:
                m[r], m[piv] = m[piv], m[r]
                u[r], u[piv] = u[piv], u[r]
            done = True
            for i in range(r + 1, nr):
                if m[i][j]:
                    q = m[i][j] // m[r][j]  # floor division
                    if q:
                        m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                        u[i] = [a - q * b for a, b in zip(u[i], u[r])]
                    if m[i][j]:
                        done = False
            if done:
                break
        if m[r][j]:
            if m[r][j] < 0:
                m[r] = [-a for a in m[r]]
                u[r] = [-a for a in u[r]]
            for i in range(r):
                q = m[i][j] // m[r][j]
                if q:
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    u[i] = [a - q * b for a, b in zip(u[i], u[r])]
            r += 1
    return m, u


def integer_kernel(rows):
    """Saturated basis of {x in Z^n : rows @ x = 0}.

    The returned vectors generate the full lattice of integer solutions (not
    a finite-index sublattice), which the short-vector step relies on.
    """
    a = _as_mpz_matrix(rows)
    if not a:
        raise ValueError("empty system")
    n = len(a[0])
    at = [[a[i][j] for i in range(len(a))] for j in range(n)]
    h, u = hnf_with_transform(at)
    ker = [u[i] for i in range(n) if not any(h[i])]
    return ker


def lattice_index(rows):
    """Index in Z^n of the lattice generated by the rows (must be full rank).

    Returns the positive determinant of the row HNF; raises if rank < n.
    """
    h, _ = hnf_with_transform(rows)
    n = len(rows[0])
    nonzero = [r for r in h if any(r)]
    if len(nonzero) < n:
        raise ValueError("lattice is not full rank")
    # pivots sit on distinct columns; for a full-rank lattice the first n
    # nonzero rows form an upper triangular square matrix under their pivots
    idx = mpz(1)
    col = 0
    for r in nonzero[:n]:
        while not r[col]:
            col += 1
        idx *= r[col]
        col += 1
    return idx


def _gso(b):
    """Rational Gram-Schmidt data for integer rows b: (mu, bstar_sq)."""
    n = len(b)
    mu = [[mpq(0)] * n for _ in range(n)]
    bstar = []
    bstar_sq = []
    for i in range(n):
        v = [mpq(x) for x in b[i]]
        for j in range(i):
            if bstar_sq[j]:
                mu[i][j] = sum((mpq(x) * y for x, y in zip(b[i], bstar[j])),
                               mpq(0)) / bstar_sq[j]
                v = [a - mu[i][j] * c for a, c in zip(v, bstar[j])]
        bstar.append(v)
        bstar_sq.append(sum((x * x for x in v), mpq(0)))
    return mu, bstar_sq


def lll_reduce(rows, delta=mpq(3, 4)):
    """Exact LLL reduction of linearly independent integer rows.

    Classical rational-arithmetic LLL; returns a new list of reduced rows
    spanning the same lattice. delta is the Lovasz parameter.
    """
    b = _as_mpz_matrix(rows)
    n = len(b)
    if n <= 1:
        return b
    mu, bsq = _gso(b)
    k = 1
    while k < n:
        # size reduction of b_k against b_{k-1..0}; mu updates in place,
        # the orthogonalization itself is unchanged by these row operations
        for j in range(k - 1, -1, -1):
            q = mu[k][j]
            if q * 2 > 1 or q * 2 < -1:
                r = _round_q(q)
                b[k] = [a - r * c for a, c in zip(b[k], b[j])]
                for l in range(j):
                    mu[k][l] = mu[k][l] - r * mu[j][l]
                mu[k][j] = mu[k][j] - r
        if bsq[k] >= (delta - mu[k][k - 1] ** 2) * bsq[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            mu, bsq = _gso(b)
            k = max(k - 1, 1)
    return b


def _round_q(q):
    """Nearest integer to mpq (ties toward even via floor of q + 1/2)."""
    return (2 * q.numerator + q.denominator) // (2 * q.denominator)


def norm_sq(v):
    return sum((mpz(x) * x for x in v), mpz(0))


def shortest_vector_exhaustive(rows):
    """Certified shortest nonzero vector of the lattice spanned by the rows.

    Kannan-Fincke-Pohst enumeration with exact rational bookkeeping; intended
    as an oracle at small dimension (say < 15), not for production sizes.
    Returns (vector, norm_sq).
    """
    b = lll_reduce(rows)
    n = len(b)
    mu, bsq = _gso(b)
    if any(s == 0 for s in bsq):
        raise ValueError("rows are dependent")
    best = list(b[0])
    best_sq = norm_sq(b[0])
    for row in b:
        s = norm_sq(row)
        if s < best_sq:
            best, best_sq = list(row), s

    coords = [0] * n

    def recurse(i, center_rest, partial_sq):
        nonlocal best, best_sq
        # enumerate x_i with partial_sq + (x_i - center)^2 * bsq[i] < best_sq
        if partial_sq >= best_sq:
            return
        center = center_rest[i]
        # integer window around center
        radius_sq = (mpq(best_sq) - partial_sq) / bsq[i]
        step = 0
        c_floor = _round_q(center)
        # zig-zag outward from the rounded center
        order = [c_floor]
        for d in range(1, 2 + int(_isqrt_q(radius_sq)) + 1):
            order.append(c_floor + d)
            order.append(c_floor - d)
        for xi in order:
            dist = (mpq(xi) - center)
            add = dist * dist * bsq[i]
            if partial_sq + add >= best_sq:
                continue
            coords[i] = xi
            if i == 0:
                v = [mpz(0)] * len(b[0])
                for t in range(n):
                    if coords[t]:
                        v = [a + coords[t] * c for a, c in zip(v, b[t])]
                s = norm_sq(v)
                if s and s < best_sq:
                    best, best_sq = v, s
            else:
                nc = list(center_rest)
                for j in range(i):
                    nc[j] = nc[j] - mpq(xi) * mu[i][j]
                recurse(i - 1, nc, partial_sq + add)
        coords[i] = 0

    recurse(n - 1, [mpq(0)] * n, mpq(0))
    return best, best_sq


def _isqrt_q(q):
    import gmpy2
    if q < 0:
        return 0
    return int(gmpy2.isqrt(mpz(q.numerator // q.denominator)))
