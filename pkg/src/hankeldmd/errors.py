"""Exception hierarchy shared by every module of the package."""


class HankelDMDError(Exception):
    """Base class for all errors raised by hankeldmd."""


# embedding
class BufferNotFull(HankelDMDError):
    pass


class WindowTooLong(HankelDMDError, ValueError):
    pass


class NotDivisible(HankelDMDError, ValueError):
    pass


class ShapeMismatch(HankelDMDError, ValueError):
    pass


class NotConsistent(HankelDMDError, ValueError):
    """Matrix is not Hankel within tolerance, so no signal can be read off it."""


class DimensionMismatch(HankelDMDError, ValueError):
    pass


# spectrum / linear algebra
class OutOfRange(HankelDMDError, ValueError):
    pass


class ConvergenceFailure(HankelDMDError, ArithmeticError):
    pass


class AspectRatioInvalid(HankelDMDError, ValueError):
    pass


class SvdFailure(HankelDMDError, ArithmeticError):
    pass


class KrylovDeficient(HankelDMDError):
    """The Krylov span of the initial state does not fill the state space."""


class TooFewColumns(HankelDMDError, ValueError):
    pass


class DecompositionFailure(HankelDMDError, ArithmeticError):
    pass


# pipeline / simulation / scoring
class PipelineStepError(HankelDMDError):
    """A numeric failure inside one pipeline step, tagged with the sample index."""

    def __init__(self, t, cause):
        super().__init__(f"step t={t}: {type(cause).__name__}: {cause}")
        self.t = t
        self.cause = cause


class InvalidConfig(HankelDMDError, ValueError):
    pass


class InvalidProfile(HankelDMDError, ValueError):
    pass


class LengthMismatch(HankelDMDError, ValueError):
    pass


class MalformedRow(HankelDMDError, ValueError):
    def __init__(self, path, row, reason):
        super().__init__(f"{path}: row {row}: {reason}")
        self.path = path
        self.row = row


class IndexMismatch(HankelDMDError, ValueError):
    pass
