"""Shipped curve catalog: a small library of short Weierstrass models the
scan and the CLI draw from.

Every complex-multiplication class with class number one gets at least one
model, alongside a couple of curves with no extra endomorphisms that act
as controls (the height lower bounds under study say nothing about them,
and their rows are flagged so reports cannot quietly mix the populations).
Entries carry known rational points; richer point families (multiples,
translates, quadratic sections, automorphism images) are generated at scan
time rather than stored.
"""

import json
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Tuple

from gmpy2 import mpq

from .errors import IOFailure
from .weierstrass.curve import WeierstrassCurve

__all__ = ["CurveEntry", "load_catalog", "shipped_catalog_text"]


@dataclass(frozen=True)
class CurveEntry:
    label: str
    a4: object
    a6: object
    cm_disc: Optional[int]
    good_primes: Tuple[int, ...]
    points: Tuple[Tuple[object, object], ...]

    def curve(self):
        return WeierstrassCurve(mpq(self.a4), mpq(self.a6))

    @property
    def is_cm(self):
        return self.cm_disc is not None


def shipped_catalog_text():
    return resources.files("cmlehmer.data").joinpath(
        "catalog.json").read_text()


def load_catalog(path=None):
    """Parse and validate a catalog file; the shipped one by default.

    Validation is structural and exact: every listed point must satisfy
    the curve equation, and a declared CM discriminant must match the
    j-invariant. A catalog that lies about either is refused outright
    rather than producing rows that would poison a scan.
    """
    try:
        if path is None:
            text = shipped_catalog_text()
        else:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise IOFailure("cannot read catalog: %s" % exc)
    raw = json.loads(text)
    entries = []
    seen = set()
    for item in raw["curves"]:
        label = item["label"]
        if label in seen:
            raise ValueError("duplicate catalog label %r" % label)
        seen.add(label)
        a4, a6 = mpq(str(item["a4"])), mpq(str(item["a6"]))
        curve = WeierstrassCurve(a4, a6)
        disc = item.get("cm_disc")
        if disc is not None and curve.cm_discriminant() != disc:
            raise ValueError("catalog %s declares cm_disc=%s but j=%s"
                             % (label, disc, curve.j_invariant()))
        pts = []
        for px, py in item.get("points", ()):
            x, y = mpq(str(px)), mpq(str(py))
            if not curve.contains(x, y):
                raise ValueError("catalog %s lists (%s, %s), not on the "
                                 "curve" % (label, x, y))
            pts.append((x, y))
        entries.append(CurveEntry(
            label=label, a4=a4, a6=a6, cm_disc=disc,
            good_primes=tuple(int(p) for p in item.get("good_primes", ())),
            points=tuple(pts)))
    return entries
