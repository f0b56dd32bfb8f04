"""Exception types. Each one names the contract that was violated."""


class BlottoError(ValueError):
    """Base class for every error raised by this package."""


class ValidationError(BlottoError):
    pass


class ParseError(BlottoError):
    pass


class SpaceMismatch(BlottoError):
    pass


class ProfileLengthMismatch(BlottoError):
    pass


class EmptyValues(BlottoError):
    pass


class NonPositiveShape(BlottoError):
    pass


class PlayerCountTooSmall(BlottoError):
    pass


class NotEquipartitionable(BlottoError):
    pass


class AsymmetricGame(BlottoError):
    pass


class BadPartition(BlottoError):
    pass


class SinglePlayer(BlottoError):
    pass


class AtomicOpponentMarginal(BlottoError):
    pass


class OffBudgetMean(BlottoError):
    pass


class InfeasibleProbe(BlottoError):
    pass


class DeltaOutOfRange(BlottoError):
    pass


class NotFlatOnGap(BlottoError):
    pass


class NoFeasibleEpsilon(BlottoError):
    pass


class DegenerateInterval(BlottoError):
    pass
