"""Exception hierarchy shared by every resmex module."""


class ResmexError(ValueError):
    """Base class for all validation and computation errors raised by resmex."""


class NotHermitian(ResmexError):
    pass


class NotPositive(ResmexError):
    pass


class BadTrace(ResmexError):
    pass


class ZeroState(ResmexError):
    pass


class DimMismatch(ResmexError):
    pass


class DimCap(ResmexError):
    pass


class BadShape(ResmexError):
    pass


class AlphaOutOfRange(ResmexError):
    pass


class BadPovm(ResmexError):
    pass


class BadEpsilon(ResmexError):
    pass


class SupportViolation(ResmexError):
    pass


class IndeterminateValue(ResmexError):
    """Raised for ``inf - inf`` in extended-real arithmetic."""


class BadCut(ResmexError):
    pass


class UnsupportedCut(ResmexError):
    pass


class BadEnsembleSize(ResmexError):
    pass


class UnknownSuite(ResmexError):
    pass


class BadConfig(ResmexError):
    pass


class ParseError(ResmexError):
    pass
