"""Exception hierarchy."""


class VarLpError(Exception):
    """Base class for all library errors."""


class InvalidExponent(VarLpError, ValueError):
    pass


class TailBoundMissing(VarLpError):
    """An infinitely supported vector was given without a tail certificate."""


class InvalidTailCertificate(VarLpError, ValueError):
    """A tail certificate's ``pmin`` exceeds an exponent used past ``k0``."""


class HorizonExceeded(VarLpError):
    """Norm enclosure did not reach the requested width within the depth horizon."""

    def __init__(self, message, enclosure=None):
        super().__init__(message)
        self.enclosure = enclosure


class SearchHorizonExceeded(VarLpError):
    """No admissible host index below the search horizon."""

    def __init__(self, message, selected=(), step=None):
        super().__init__(message)
        self.selected = tuple(selected)
        self.step = step


class DimensionTooLarge(VarLpError, ValueError):
    pass


class NonIncreasingIndices(VarLpError, ValueError):
    pass


class InvalidRateSide(VarLpError, ValueError):
    pass


class NotDisjoint(VarLpError, ValueError):
    pass


class TailMetadataMissing(VarLpError):
    """liminf/limsup of an enumerated tail are not declared."""


class BudgetOutOfRange(VarLpError, ValueError):
    pass
