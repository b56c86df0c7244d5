"""Exception classes shared across the package.

The CLI maps each class to its own exit code, so keep the taxonomy small:
parse problems, semantic validation problems, iteration that did not
converge, and geometric constructions that failed.
"""


class GraphFormatError(ValueError):
    """A graph text file could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(ValueError):
    """Input data is well-formed but violates a documented precondition."""


class ConvergenceError(RuntimeError):
    """An iterative solver ran out of iterations (or a resource guard fired).

    ``best`` carries the most recent estimate, when one exists.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class GeometryError(RuntimeError):
    """A geometric construction failed (containment, branch point, modulus)."""
