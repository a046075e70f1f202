"""Weierstrass curves, division polynomials, CM endomorphisms, formal groups."""

from .curve import CM_J_INVARIANTS, CurvePoint, WeierstrassCurve
from .divpoly import RationalMap, division_poly, mult_map, x_only_mult
from .endo import SymMap, endo_map, tau_map, velu_from_kernel
from .formal import (Biv, FormalSeries, Laurent, formal_add, formal_endo,
                     formal_group_law, formal_mul, formal_w, formal_xy)

__all__ = [
    "CM_J_INVARIANTS", "CurvePoint", "WeierstrassCurve",
    "RationalMap", "division_poly", "mult_map", "x_only_mult",
    "SymMap", "endo_map", "tau_map", "velu_from_kernel",
    "Biv", "FormalSeries", "Laurent", "formal_add", "formal_endo",
    "formal_group_law", "formal_mul", "formal_w", "formal_xy",
]
