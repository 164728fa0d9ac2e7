"""Exception types shared across the package."""


class DeltainvError(Exception):
    """Base class for every error raised by this package."""


class UnsupportedDimension(DeltainvError):
    """Tensor dimension outside the supported range 2..12."""


class IndexOutOfRange(DeltainvError):
    """A 1-based index lies outside 1..n."""


class ConflictingEntry(DeltainvError):
    """Permutation-equivalent triples carry different values, or a duplicate
    triple appeared where the input format forbids it."""


class DimensionMismatch(DeltainvError):
    """Operands have incompatible dimensions."""


class EqualIndices(DeltainvError):
    """A sectional curvature was requested for a degenerate plane (i == j)."""


class RankDeficientFrame(DeltainvError):
    """Frame rows are numerically rank deficient and cannot be orthonormalized."""


class InadmissiblePartition(DeltainvError):
    """Block sizes violate 2 <= n_1 <= ... <= n_k <= n-1, sum(n_i) <= n."""


class NotApplicable(DeltainvError):
    """The requested bound is not defined for this partition type."""


class EmptyList(DeltainvError):
    """A determinant of an empty matrix was requested."""


class BadBlockIndex(DeltainvError):
    """Block index ell outside 1..k."""


class CaseMismatch(DeltainvError):
    """Partition does not fit the requested quadratic-form case."""


class SingularMetric(DeltainvError):
    """Induced metric is singular or too ill-conditioned at the given point."""


class InvariantViolation(DeltainvError):
    """Supplied parameters break a documented structural invariant."""


class FormatError(DeltainvError):
    """Malformed input file or unparsable value."""
