"""Places of cyclotomic fields: archimedean embeddings and primes over p."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from gmpy2 import mpq

from .cyclo import euler_phi, ramification_data


@dataclass(frozen=True)
class Place:
    """One place of Q(zeta_m), with its local degree weight d_v / d.

    kind 'arch': data is the embedding exponent u (zeta -> exp(2 pi i u/m)),
    one representative per conjugate pair, local degree 2 (or 1 over Q).
    kind 'finite': data is the rational prime p; e and f are the ramification
    index and residue degree of each (conjugate) prime above p.
    """
    kind: str
    m: int
    data: int
    e: int = 1
    f: int = 1

    @property
    def local_degree(self):
        if self.kind == "arch":
            return 1 if self.m <= 2 else 2
        return self.e * self.f

    @property
    def weight(self):
        return mpq(self.local_degree, euler_phi(self.m))


def archimedean_places(m):
    """One representative embedding per complex-conjugate pair."""
    if m <= 2:
        return [Place("arch", m, 1)]
    out = []
    seen = set()
    for u in range(1, m):
        if gcd(u, m) != 1 or u in seen:
            continue
        seen.add(u)
        seen.add((m - u) % m)
        out.append(Place("arch", m, u))
    return out


def places_over(p, m):
    """The places of Q(zeta_m) above the rational prime p.

    All g primes above p share one (e, f); they are listed with distinct
    indices 0..g-1 for identification. Sum of e*f over the list is phi(m).
    """
    _, e, f, g = ramification_data(p, m)
    return [Place("finite", m, p, e=e, f=f) for _ in range(g)]
