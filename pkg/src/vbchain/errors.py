"""Exception hierarchy shared by all vbchain modules."""


class VBChainError(ValueError):
    """Base class for every error raised by vbchain."""


class KernelError(VBChainError):
    pass


class NonStochasticError(KernelError):
    pass


class NotReversibleError(KernelError):
    pass


class NonPositivePiError(KernelError):
    pass


class NonUniqueStationaryError(KernelError):
    pass


class BadMixtureWeightError(KernelError):
    pass


class WindowTooSmallError(KernelError):
    pass


class DegenerateMarginalError(KernelError):
    pass


class ZeroPiEntryError(KernelError):
    pass


class NoConvergenceError(VBChainError):
    pass


class DimensionMismatchError(VBChainError):
    pass


class LambdaAtOneError(VBChainError):
    pass


class MismatchedStationaryError(VBChainError):
    pass


class OrderingViolationError(VBChainError):
    """Domination holds but a spectral or variance comparison went the wrong way."""


class NonPositiveTargetError(VBChainError):
    pass


class RowSumExceedsOneError(VBChainError):
    pass


class BadScaleError(VBChainError):
    pass


class InvalidStateError(VBChainError):
    pass


class NonPositiveStateError(VBChainError):
    pass


class DomainError(VBChainError):
    pass


class BadGridError(VBChainError):
    pass


class TraceTooShortError(VBChainError):
    pass


class TooFewReplicatesError(VBChainError):
    pass


class MissingReferenceError(VBChainError):
    pass


class InvalidStartError(VBChainError):
    pass


class FormatError(VBChainError):
    """Malformed VBK1 / VBQ1 / functional file."""
