"""Exceptions raised by the wallcross library.

The CLI maps these onto exit codes; library code never calls sys.exit.
"""


class WallcrossError(Exception):
    """Base class for every error the library raises."""


class InputError(WallcrossError, ValueError):
    """Malformed input: bad stability strings, files, maps or classes."""


class NotInConeError(InputError):
    """A class outside the positive cone C(A)."""


class NotATreeError(InputError):
    """Edge list is not a spanning tree on the index set."""


class NotDominantError(InputError):
    """Map phi: I -> K is not dominant for the given order on I."""


class ArithmeticDomainError(WallcrossError, ArithmeticError):
    """Operation undefined in the current ring."""


class PoleError(ArithmeticDomainError):
    """Evaluation or projection at a pole, or division by zero."""


class NotSeriesRepresentableError(ArithmeticDomainError):
    """Denominator is not a product of (l^k - 1) factors."""


class MissingInvariantError(WallcrossError, KeyError):
    def __init__(self, klass, flavor=None):
        self.klass = klass
        self.flavor = flavor
        super().__init__(klass)

    def __str__(self):
        where = f" in {self.flavor} table" if self.flavor else ""
        return f"no invariant for class {self.klass}{where}"


class EnumerationError(WallcrossError):
    """Enumeration outside the supported range."""


class OracleGuardError(WallcrossError):
    """Finite-field count would exceed the configured dimension or field size."""


class PrecisionError(WallcrossError):
    """Truncated series did not certify an exact result."""
