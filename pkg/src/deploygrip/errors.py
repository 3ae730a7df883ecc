"""Exception hierarchy shared by the model modules and the CLI."""


class GripperError(Exception):
    """Base class for every error raised by deploygrip."""


class DomainError(GripperError, ValueError):
    """Inputs lie outside the region where a model is defined."""


class DegenerateDesignError(DomainError):
    """The design cannot deploy (line losses eat the whole stroke)."""


class NumericError(GripperError, ArithmeticError):
    """An iteration failed to converge or produced non-finite values."""

    def __init__(self, message, residual=None, step=None):
        super().__init__(message)
        self.residual = residual
        self.step = step


class InfeasibleError(GripperError):
    """No candidate in a design search satisfies the constraints."""

    def __init__(self, message, binding=None):
        super().__init__(message)
        self.binding = binding
