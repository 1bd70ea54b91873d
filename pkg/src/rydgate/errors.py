"""Exception types. Anything derived from NumericalError maps to CLI exit code 3."""


class NumericalError(RuntimeError):
    pass


class ConvergenceError(NumericalError):
    pass


class SingularGeometryError(NumericalError, ValueError):
    def __init__(self, message, pair=None, condition=None):
        super().__init__(message)
        self.pair = pair
        self.condition = condition
