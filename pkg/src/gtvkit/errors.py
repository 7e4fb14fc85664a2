"""Exception hierarchy shared by all gtvkit modules."""


class GTVError(Exception):
    """Base class for every error raised by gtvkit."""


class InvalidStateError(GTVError, ValueError):
    """A state vector or cell field contains non-finite entries."""


class DomainError(GTVError, ValueError):
    """A state lies outside the model's admissible set (e.g. vacuum)."""


class HyperbolicityLossError(GTVError, ValueError):
    """Eigenvalues of the averaged matrix collide or become complex."""


class DegenerateJumpError(GTVError, ValueError):
    """A tracked jump has (numerically) zero strength."""


class InadmissibleShockError(GTVError, ValueError):
    """Requested shock state is on the wrong Hugoniot branch."""


class StepRejectedError(GTVError, ValueError):
    """Time step violates the CFL bound."""


class OutOfRangeError(GTVError, IndexError):
    """A stencil offset leaves the grid."""


class InteractionError(GTVError, ValueError):
    """Two tracked shocks came too close to be handled independently."""


class PartitionError(GTVError, RuntimeError):
    """Inconsistent multi-shock domain partition."""


class NotApplicableError(GTVError, ValueError):
    """Operation is undefined for the given model (e.g. scalar law)."""


class ShapeMismatchError(GTVError, ValueError):
    """Array shapes disagree."""
