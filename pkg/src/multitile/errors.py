"""Exception and warning types shared across the package."""


class MultitileError(Exception):
    """Base class for all errors raised by this package."""


class SingularBasis(MultitileError):
    """Lattice basis matrix is singular or numerically rank deficient."""


class DimensionMismatch(MultitileError):
    """Inputs disagree on the ambient dimension."""


class NotATiling(MultitileError):
    """Cell boxes fail to partition the unit cube up to measure zero."""


class InconsistentK(MultitileError):
    """Cells carry offset lists of different lengths."""


class DuplicateOffset(MultitileError):
    """A cell lists the same lattice offset twice."""


class PointOnGap(MultitileError):
    """Point falls in a measure-zero crack between cell boxes."""


class OutOfDomain(MultitileError):
    """Point does not belong to the domain."""


class NonUniformShifts(MultitileError):
    """Operation requires every cell to share one shift index set."""


class SingularCell(MultitileError):
    """A cell's exponential system matrix is numerically singular."""


class DuplicateNodes(MultitileError):
    """Vandermonde nodes coincide within tolerance."""


class SingularMatrix(MultitileError):
    """Dense linear solve hit a numerically singular matrix."""


class NoPairFound(MultitileError):
    """Admissibility search exhausted its bounds without a certificate."""


class SpecFormatError(MultitileError):
    """Domain or data file violates the documented schema."""


class IllConditionedWarning(UserWarning):
    """Vandermonde system condition number exceeds the safe threshold."""
