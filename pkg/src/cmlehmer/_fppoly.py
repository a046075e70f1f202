"""Dense polynomials over F_p as plain int lists.

Multiplication goes through Kronecker substitution (pack into one big
integer, multiply with gmpy2, unpack), which keeps degree-1000 work fast
without any compiled dependency. Coefficients are ints in [0, p); the zero
polynomial is the empty list.
"""

from __future__ import annotations

from gmpy2 import mpz


def fp_trim(a):
    n = len(a)
    while n and a[n - 1] == 0:
        n -= 1
    del a[n:]
    return a


def fp_from_rationals(cs, p):
    """Reduce a list of mpq coefficients mod p; denominators are inverted.

    Raises ZeroDivisionError if a denominator vanishes mod p.
    """
    out = []
    for c in cs:
        num = int(c.numerator) % p
        den = int(c.denominator) % p
        if den == 0:
            raise ZeroDivisionError("denominator divisible by %d" % p)
        out.append(num * pow(den, -1, p) % p)
    return fp_trim(out)

def fp_add(a, b, p):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % p
    return fp_trim(out)


def fp_sub(a, b, p):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else 0
        y = b[i] if i < len(b) else 0
        out.append((x - y) % p)
    return fp_trim(out)


def fp_scale(a, c, p):
    c %= p
    return fp_trim([v * c % p for v in a])


def fp_mul(a, b, p):
    if not a or not b:
        return []
    if len(a) < 16 or len(b) < 16:
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] = (out[i + j] + ai * bj)
        return fp_trim([v % p for v in out])
    # Kronecker: evaluate both at 2^bits and multiply as integers.
    bits = (2 * (p - 1).bit_length() + (min(len(a), len(b))).bit_length() + 1)
    za = _pack(a, bits)
    zb = _pack(b, bits)
    return _unpack(za * zb, bits, len(a) + len(b) - 1, p)


def _pack(a, bits):
    z = mpz(0)
    for c in reversed(a):
        z = (z << bits) | c
    return z


def _unpack(z, bits, n, p):
    mask = (mpz(1) << bits) - 1
    out = []
    for _ in range(n):
        out.append(int(z & mask) % p)
        z >>= bits
    return fp_trim(out)


def fp_divmod(a, b, p):
    if not b:
        raise ZeroDivisionError("poly division by zero mod p")
    r = list(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    if len(r) <= db:
        return [], fp_trim(r)
    q = [0] * (len(r) - db)
    for i in range(len(r) - db - 1, -1, -1):
        c = r[i + db] * inv % p
        if c:
            q[i] = c
            for j, bc in enumerate(b):
                r[i + j] = (r[i + j] - c * bc) % p
    return fp_trim(q), fp_trim(r[:db])


def fp_rem(a, b, p):
    return fp_divmod(a, b, p)[1]


def fp_gcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        a, b = b, fp_rem(a, b, p)
    if a:
        a = fp_scale(a, pow(a[-1], -1, p), p)
    return a


def fp_monic(a, p):
    if not a:
        return a
    return fp_scale(a, pow(a[-1], -1, p), p)


def fp_powmod(base, e, modulus, p):
    """base**e mod modulus over F_p, square and multiply via fp_mul."""
    r = [1]
    b = fp_rem(base, modulus, p)
    while e:
        if e & 1:
            r = fp_rem(fp_mul(r, b, p), modulus, p)
        b = fp_rem(fp_mul(b, b, p), modulus, p)
        e >>= 1
    return r


def fp_x_power_mod(e, modulus, p):
    return fp_powmod([0, 1], e, modulus, p)


def fp_derivative(a, p):
    return fp_trim([i * c % p for i, c in enumerate(a)][1:])


def fp_is_squarefree(a, p):
    g = fp_gcd(a, fp_derivative(a, p), p)
    return len(g) == 1


def fp_eval(a, x, p):
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc
