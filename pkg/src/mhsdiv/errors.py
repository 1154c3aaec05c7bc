"""Exception hierarchy shared by all modules."""


class MHSError(Exception):
    """Base class for every error raised by :mod:`mhsdiv`."""


class NotInvertible(MHSError, ValueError):
    pass


class ZeroInput(MHSError, ValueError):
    pass


class ZeroDenominator(MHSError, ZeroDivisionError):
    pass


class ModulusTooLarge(MHSError):
    """Raised when a modulus exceeds the fast path and the fallback is disabled."""


class SegmentExhausted(MHSError):
    """The stream would step past the last index its scale supports."""


class PrecisionLoss(MHSError):
    pass


class DepthUnsupported(MHSError):
    pass


class AsymmetricSet(MHSError):
    """A depth-1 first-segment set is not closed under n -> p-1-n."""


class RuleUnavailable(MHSError):
    pass


class BudgetExceeded(MHSError):
    pass


class StoreCorrupt(MHSError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
