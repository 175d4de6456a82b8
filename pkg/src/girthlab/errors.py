"""Exception types shared across the library."""


class GirthlabError(Exception):
    """Base class for all library-specific errors."""


class RejectedInputError(GirthlabError, ValueError):
    """Input data fails a structural requirement (symmetry, definiteness, ...)."""


class PreconditionError(GirthlabError, ValueError):
    """A documented precondition of an operation is violated."""


class UnsupportedInputError(GirthlabError, ValueError):
    """The operation is only defined for a restricted class of inputs."""


class IllConditionedInputError(GirthlabError, ValueError):
    """Input sits in a numerically meaningless regime for this operation."""


class NoIntersectionError(GirthlabError, ValueError):
    """A line/surface intersection that the operation requires does not exist."""


class NumericalFailureError(GirthlabError, RuntimeError):
    """An iterative solver failed to converge.

    ``best_bound`` carries the best value found before giving up, when one
    is meaningful.
    """

    def __init__(self, message, best_bound=None):
        super().__init__(message)
        self.best_bound = best_bound


class ConfigError(GirthlabError, ValueError):
    """An experiment configuration document violates the schema."""
