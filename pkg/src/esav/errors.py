"""Exception types raised by the package."""


class InvalidArgumentError(ValueError):
    """Bad shapes, parameters or configuration values."""


class ReformulationInfeasibleError(ArithmeticError):
    """The SAV radicand H2(z) + C0 is not positive."""


class AuxiliaryOverflowError(OverflowError):
    """Exponent of the ESAV auxiliary variable is out of the representable range."""


class SingularOperatorError(ArithmeticError):
    """A Fourier mode block of a linear system is singular."""

    def __init__(self, message, mode=None):
        super().__init__(message)
        self.mode = mode


class DegenerateStepError(ArithmeticError):
    """The scalar denominator of the SAV rank-one solve vanished."""


class NonConvergenceError(RuntimeError):
    """A fixed-point iteration did not reach tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
