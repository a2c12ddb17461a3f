"""Exception hierarchy shared by all uctkit modules."""


class UctkitError(Exception):
    """Base class for every error raised by uctkit."""


class InputError(UctkitError):
    """Malformed or out-of-range input data."""


class DimensionMismatch(InputError):
    pass


class NotComposable(InputError):
    pass


class CategoryMismatch(InputError):
    pass


class NonzeroComposite(UctkitError):
    """A sequence that should be a complex has a nonzero composite."""

    def __init__(self, message, junction=None):
        super().__init__(message)
        self.junction = junction


class RankNotStabilized(UctkitError):
    pass


class InconsistentRelations(UctkitError):
    pass


class NotGorensteinProjective(UctkitError):
    pass


class InternalInvariantViolation(UctkitError):
    """Raised when a computation contradicts a theorem it relies on."""
