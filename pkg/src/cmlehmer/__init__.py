"""Exact-arithmetic workbench for canonical heights of CM elliptic curves
over abelian fields: heights, CM Frobenius lifts, auxiliary-function
construction, Galois congruence checks, parameter audits, and a catalog
scan harness for effective height lower bounds.
"""

__version__ = "0.1.0"
