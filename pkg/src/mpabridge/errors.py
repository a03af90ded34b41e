"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class MpaBridgeError(Exception):
    """Base class for all errors raised by mpabridge."""


class NotIrreducible(MpaBridgeError, ValueError):
    pass


class NoConvergence(MpaBridgeError, RuntimeError):
    """Power iteration did not reach the requested tolerance.

    The last iterate is kept on ``pair`` so callers can inspect how far it got.
    """

    def __init__(self, message: str, pair=None):
        super().__init__(message)
        self.pair = pair


class NotAnEigenpair(MpaBridgeError, ValueError):
    pass


class LengthMismatch(MpaBridgeError, ValueError):
    pass


class DegenerateNormalization(MpaBridgeError, ValueError):
    pass


class IndexOutOfRange(MpaBridgeError, IndexError):
    pass


class UnreachableState(MpaBridgeError, ValueError):
    pass


class TooLarge(MpaBridgeError, ValueError):
    pass


class ShapeMismatch(MpaBridgeError, ValueError):
    pass


class TailNotSummable(MpaBridgeError, ValueError):
    pass


class TruncationNotConverged(MpaBridgeError, RuntimeError):
    pass


class DegenerateParams(MpaBridgeError, ValueError):
    pass


class EmptySector(MpaBridgeError, ValueError):
    pass


class InvalidCounts(MpaBridgeError, ValueError):
    pass
