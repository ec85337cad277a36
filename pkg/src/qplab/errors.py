"""Exception hierarchy shared by all qplab modules."""


class QPLabError(Exception):
    """Base class for every error raised by qplab."""


class RationalDetected(QPLabError):
    pass


class FrequencyOverflow(QPLabError, OverflowError):
    """Convergent denominators left the signed 64-bit range."""


class SingularSample(QPLabError):
    pass


class StripExceeded(QPLabError):
    pass


class NotHomotopicToIdentity(QPLabError):
    def __init__(self, msg, winding=0):
        super().__init__(msg)
        self.winding = winding


class NonRealSampler(QPLabError):
    pass


class SnapFailure(QPLabError):
    def __init__(self, msg, slopes=None):
        super().__init__(msg)
        self.slopes = slopes


class GridTooShort(QPLabError):
    pass


class DegenerateWindow(QPLabError):
    pass


class DegenerateLeadingCoefficient(QPLabError):
    pass


class PairingViolation(QPLabError):
    pass


class SplittingDegenerate(QPLabError):
    def __init__(self, msg, theta=None, angles=None):
        super().__init__(msg)
        self.theta = theta
        self.angles = angles


class CenterDegenerate(QPLabError):
    pass


class BranchDiscontinuity(QPLabError):
    pass


class WindowViolation(QPLabError):
    pass


class FrameAlignmentFailure(QPLabError):
    pass


class SmallDivisorOverflow(QPLabError):
    pass


class ConjugationStalled(QPLabError):
    """Reducing conjugation did not reach the requested residual.

    The partially reduced result is attached so callers can still report
    the achieved residuals.
    """

    def __init__(self, msg, residual=None, result=None):
        super().__init__(msg)
        self.residual = residual
        self.result = result


class WindowRejected(QPLabError):
    pass


class ConfigError(QPLabError):
    pass


class TaskError(QPLabError):
    pass
