"""Exception types shared across the package.

Every failure mode that callers are expected to branch on gets its own class;
plain ValueError/TypeError are reserved for programming errors (bad argument
shapes, wrong types) that no caller should catch.
"""


class CMLehmerError(Exception):
    """Base class for all domain errors raised by this package."""


class NotSplit(CMLehmerError):
    """The rational prime does not split in the requested imaginary
    quadratic order, so the norm equation has no primitive solution."""


class DegreeOverflow(CMLehmerError):
    """An algebraic-number construction would exceed the supported degree."""


class NonIntegral(CMLehmerError):
    """An element expected to be an algebraic integer is not one."""


class RankDeficient(CMLehmerError):
    """A matrix whose rows were promised independent is rank deficient."""


class UnsupportedCM(CMLehmerError):
    """The discriminant is outside the supported class-number-one list."""


class BadReduction(CMLehmerError):
    """The curve has bad reduction at the requested prime."""


class AmbiguousUnit(CMLehmerError):
    """More than one unit-normalized Frobenius lift passed every test;
    the curve/prime pair cannot be disambiguated by point sampling."""


class ShapeViolation(CMLehmerError):
    """The rational map does not admit the unit-plus-uniformizer shape."""


class PrecisionUnreachable(CMLehmerError):
    """The requested error bound cannot be certified within the iteration
    and precision limits this implementation enforces."""


class DegenerateParameters(CMLehmerError):
    """A parameter plan violates a structural precondition (empty ranges,
    zero sizes) and no audit verdict would be meaningful."""


class EmptyKernel(CMLehmerError):
    """The homogeneous system admits only the zero solution, so no
    auxiliary function can be built from it."""


class NotInInertia(CMLehmerError):
    """The supplied automorphism lies outside the inertia subgroup that the
    congruence test requires."""


class NonIntegralPoint(CMLehmerError):
    """A point expected to have integral (at the working prime) coordinates
    does not."""


class DegreeTooLarge(CMLehmerError):
    """The exact number-field height path only supports small degrees."""


class UnsupportedField(CMLehmerError):
    """Coordinates live in a field this routine does not handle."""


class IOFailure(CMLehmerError):
    """A report could not be written or read back."""
