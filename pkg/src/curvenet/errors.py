"""Exception hierarchy shared by all curvenet modules."""


class CurvenetError(Exception):
    """Base class for every error raised by this package."""


class DegenerateCurve(CurvenetError):
    """A finite-difference tangent vanished, so the curve is not regular."""


class OpenLoop(CurvenetError):
    """The concatenated loop polyline does not close."""


class TopologyError(CurvenetError):
    """Curve ends are referenced inconsistently by junctions and endpoints."""


class NotGeometricallyAdmissible(CurvenetError):
    """Junction curvatures or endpoint curvatures violate the compatibility requirements."""


class NonMonotoneReparam(CurvenetError):
    """No blend in the allowed degree range produced an increasing reparametrization."""


class NewtonDivergence(CurvenetError):
    """The junction angle solve did not converge."""


class SingularityDetected(CurvenetError):
    """Raised by ``step`` when the monitor thresholds are crossed."""

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


class TooFewSnapshots(CurvenetError):
    pass


class LoopLost(CurvenetError):
    pass


class NotShrinkingRegion(CurvenetError):
    pass


class InsufficientWindow(CurvenetError):
    pass


class BadTimeOrder(CurvenetError):
    pass


class InsufficientTail(CurvenetError):
    pass


class RangeOutOfDomain(CurvenetError):
    pass


class NoClosureInWindow(CurvenetError):
    pass


class ShootingFailed(CurvenetError):
    pass


class ParseError(CurvenetError):
    pass


class IntegrityError(CurvenetError):
    pass


class MissingSnapshots(CurvenetError):
    pass
