"""Exception types shared across the package."""


class PoleError(ValueError):
    """Evaluation requested at (or numerically on top of) a pole."""


class DomainError(ValueError):
    """Argument outside the documented domain of an operation."""


class NonConvergenceError(RuntimeError):
    """An iterative or adaptive procedure exhausted its budget."""


class ParseError(ValueError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IllConditionedError(ArithmeticError):
    """Linear system too poorly conditioned to trust in double precision."""

    def __init__(self, message, condition=None):
        self.condition = condition
        super().__init__(message)
