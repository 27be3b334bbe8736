"""Exception types shared across the package."""


class WpsdError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(WpsdError):
    """Malformed or inconsistent input data (files, tables, shapes)."""


class NotHermitianError(WpsdError):
    """A kernel required to be Hermitian is not, beyond tolerance."""


class WeakPositivityError(WpsdError):
    """A probed quadratic form fell below the negativity threshold.

    Carries the witness coefficient vector and the offending value.
    """

    def __init__(self, message, witness=None, value=None):
        super().__init__(message)
        self.witness = witness
        self.value = value


class NotInvariantError(WpsdError):
    """Kernel is not invariant under the given semigroup action."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class IllDefinedError(WpsdError):
    """Two representatives of the same element map to different results."""


class NoIsometryError(WpsdError):
    """No gram-preserving correspondence exists between two decompositions."""

    def __init__(self, message, isometry_defect=None, intertwine_defect=None):
        super().__init__(message)
        self.isometry_defect = isometry_defect
        self.intertwine_defect = intertwine_defect


class HypothesisFailsError(WpsdError):
    """The kernel identity assumed by a check does not hold."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotAdjointableError(WpsdError):
    """The adjoint linear system for an operator is inconsistent."""


class HermitianMismatchError(WpsdError):
    """An operator-valued table violates l(x, y)* = l(y, x)."""


class NoUnitError(WpsdError):
    """Operation requires a unital *-semigroup."""


class ZeroDenominatorError(WpsdError):
    """All quadratic forms of the kernel vanish; no ratio is defined."""


class InjectivityFailureError(WpsdError):
    """Realized functions collapse; the source decomposition was not minimal."""
