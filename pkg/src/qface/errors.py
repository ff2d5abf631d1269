"""Exception hierarchy. Each CLI-visible error carries its own exit code."""


class QFaceError(Exception):
    exit_code = 1


class NotHermitianError(QFaceError, ValueError):
    pass


class SingularMatrixError(QFaceError, ValueError):
    pass


class DimensionMismatchError(QFaceError, ValueError):
    pass


class NonUnitaryError(QFaceError, ValueError):
    pass


class UnknownRegisterError(QFaceError, KeyError):
    pass


class AdderOverflowError(QFaceError, OverflowError):
    pass


class SpectrumRangeError(QFaceError, ValueError):
    """Eigenvalues fall outside the window the phase register can encode."""


class PhaseWrapError(SpectrumRangeError):
    pass


class DegenerateSolveError(QFaceError, ArithmeticError):
    pass


class DeterminantUnderflowError(QFaceError, ArithmeticError):
    pass


class EmptyInputError(QFaceError, ValueError):
    pass


class ImageReadError(QFaceError, OSError):
    exit_code = 3


class ConfigError(QFaceError, ValueError):
    exit_code = 4


class QubitBudgetError(QFaceError, ValueError):
    exit_code = 5
