"""Exception types raised across the package."""


class InvalidParameterError(ValueError):
    """A physical or numerical parameter lies outside its valid domain."""


class ShapeError(ValueError):
    """Two kets (or a ket and an operator) live on incompatible spaces."""


class DegenerateStateError(ValueError):
    """The two branches of an entangled superposition cancel.

    This happens when both squeezing parameters coincide and the relative
    phase is pi, so the unnormalized state has (numerically) zero norm.
    """

    def __init__(self, message, norm_squared=0.0):
        super().__init__(message)
        self.norm_squared = norm_squared


class TruncationError(RuntimeError):
    """The requested Fock cutoff leaves too much probability mass outside."""

    def __init__(self, message, tail_mass, cutoff):
        super().__init__(message)
        self.tail_mass = tail_mass
        self.cutoff = cutoff


class UnsupportedError(ValueError):
    """The request is well-formed but beyond what the enumeration supports."""


class ConsistencyError(RuntimeError):
    """A numerical result violated a property it must satisfy by construction."""
