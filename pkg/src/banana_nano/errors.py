"""Exception hierarchy shared by every module."""


class BananaError(Exception):
    """Base class for all errors raised by this package."""


class VarMismatch(BananaError):
    pass


class NotAUnit(BananaError):
    pass


class ConstantTermPresent(BananaError):
    pass


class OutsideWindow(BananaError):
    pass


class DenomOverflow(BananaError):
    pass


class InconsistentDiscriminant(BananaError):
    pass


class FractionalLeadingExponent(BananaError):
    pass


class CalibrationFailure(BananaError):
    pass


class TableWindowExceeded(BananaError):
    pass


class NonTriangular(BananaError):
    pass


class NotFiberIntegral(BananaError):
    pass


class IrrationalConjugate(BananaError):
    pass


class BadReduction(BananaError):
    pass


class DegenerateSample(BananaError):
    pass


class ReconstructionFailure(BananaError):
    pass


class WrongFiberCount(BananaError):
    pass


class SingularQuartic(BananaError):
    pass
