"""Exception hierarchy.

Validation errors signal bad inputs (CLI exit status 1); numerical errors
signal a computation that could not be completed (CLI exit status 2).
"""


class ZerocurvError(Exception):
    pass


class ValidationError(ZerocurvError, ValueError):
    pass


class NumericalError(ZerocurvError, ArithmeticError):
    pass


class DimensionLimitError(ValidationError):
    pass


class InvalidModelError(ValidationError):
    pass


class NotHermitianError(ValidationError):
    def __init__(self, residual, message=None):
        self.residual = float(residual)
        super().__init__(message or f"matrix is not Hermitian (residual {self.residual:.3e})")


class DimensionMismatchError(ValidationError):
    pass


class NonCommutingError(ValidationError):
    def __init__(self, violation, message=None):
        self.violation = float(violation)
        super().__init__(message or f"operators do not commute (max violation {self.violation:.3e})")


class ConvergenceError(NumericalError):
    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class UndefinedCurvatureError(NumericalError):
    pass


class ImaginaryExpectationError(NumericalError):
    pass


class IllConditionedError(NumericalError):
    def __init__(self, condition_number, limit):
        self.condition_number = float(condition_number)
        super().__init__(
            f"joint eigenvalue matrix is singular or ill-conditioned "
            f"(condition number {self.condition_number:.3e} >= {limit:.0e})"
        )
