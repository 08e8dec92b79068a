"""Exception types raised by ndlt.

Invalid arguments raise plain ``ValueError`` subclasses so callers can keep
using ordinary ``except ValueError`` handling.
"""


class NdltError(Exception):
    """Base class for package-specific errors."""


class PreconditionError(NdltError, ValueError):
    """A numerical precondition failed, e.g. insufficient quadrature exactness."""


class DegenerateGeometryError(NdltError, ValueError):
    """An atom lies on the sampling sphere so the potential is singular."""


class InvalidPipelineError(NdltError, ValueError):
    """A pipeline under test produced output of the wrong shape or type."""


class ContainerParseError(NdltError):
    """The container manifest could not be parsed."""


class ContainerCorruptError(NdltError):
    """The container payload does not match its manifest."""


class ConvergenceError(NdltError, RuntimeError):
    """An iterative routine did not converge."""
