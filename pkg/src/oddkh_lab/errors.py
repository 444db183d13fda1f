"""Exception hierarchy shared by all modules."""


class OddKhLabError(Exception):
    """Base class for every error raised by this package."""


class DiagramError(OddKhLabError):
    pass


class MalformedToken(DiagramError):
    pass


class EdgeCountError(DiagramError):
    pass


class OrientationError(DiagramError):
    pass


class DisconnectedDiagram(DiagramError):
    pass


class NotAComplex(OddKhLabError):
    """Raised when consecutive differentials do not compose to zero."""

    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree


class NonPrimeCharacteristic(OddKhLabError, ValueError):
    pass


class InconsistentSystem(OddKhLabError):
    pass


class GradingNotIntegral(OddKhLabError, ValueError):
    pass


class NotFiltered(OddKhLabError):
    pass


class DimensionMismatch(OddKhLabError, ValueError):
    pass
