"""Exception hierarchy for upblab."""


class UPBLabError(ValueError):
    """Base class for all errors raised by upblab."""


class InvalidState(UPBLabError):
    pass


class InvalidOperator(UPBLabError):
    pass


class InvalidBipartition(UPBLabError):
    pass


class EmptyComplement(UPBLabError):
    pass


class InvalidTileParams(UPBLabError):
    pass


class NotOrthogonal(UPBLabError):
    pass


class TooLargeForExactCheck(UPBLabError):
    pass


class CompletionFailed(UPBLabError):
    """Greedy completion stalled before reaching the full dimension."""

    def __init__(self, message, span=None):
        super().__init__(message)
        self.span = span


class NoStopper(UPBLabError):
    pass


class SupportOverlap(UPBLabError):
    pass


class BadComplement(UPBLabError):
    pass


class InvalidMeasurement(UPBLabError):
    pass
