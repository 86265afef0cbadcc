"""Exception hierarchy shared by all modules."""


class ECSError(Exception):
    """Base class for errors raised by this package."""


class CutoffTooSmall(ECSError):
    """A Fock cutoff cannot hold a coherent amplitude to the required accuracy."""


class DimensionMismatch(ECSError):
    pass


class NonHermitian(ECSError):
    pass


class NormDrift(ECSError):
    """Time evolution failed its norm-preservation post-check."""


class BasisFlagMismatch(ECSError):
    pass


class DegenerateBranch(ECSError):
    """The requested ECS branch has (numerically) zero weight, e.g. the minus branch at t=0."""


class TPrimeMismatch(ECSError):
    pass


class ZeroState(ECSError):
    pass


class InvalidDensityMatrix(ECSError):
    pass


class ConcurrenceOutOfRange(ECSError):
    """A concurrence evaluated outside [0, 1] by more than roundoff."""
