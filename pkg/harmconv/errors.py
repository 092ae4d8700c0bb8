class HarmconvError(Exception):
    """Base class for every error raised by harmconv."""


class ParameterError(HarmconvError, ValueError):
    """A parameter lies outside the range an operation accepts."""


class DomainError(HarmconvError, ValueError):
    """A point lies outside the open unit disk or on a pole band of a closed form."""


class StructuralError(HarmconvError, AssertionError):
    """An algebraic identity that must hold exactly failed (signals an algebra bug)."""


class EvaluationError(HarmconvError, ArithmeticError):
    """Pointwise evaluation hit a vanishing denominator."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class ConvergenceError(HarmconvError, RuntimeError):
    """A root iteration did not reach its residual target within the budget."""

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class OutputError(HarmconvError, OSError):
    """Writing a report or figure failed."""

    def __init__(self, path, reason):
        super().__init__(f"cannot write {path}: {reason}")
        self.path = path
