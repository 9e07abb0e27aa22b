"""Exception types shared across the package."""


class VassLabError(Exception):
    pass


class StructuralError(VassLabError):
    """An object references nodes, edges, letters or counters it does not own."""


class ArgumentError(VassLabError):
    """A caller violated a documented precondition."""


class ResourceExhausted(VassLabError):
    """A configured cap was hit; the computation was aborted, never answered wrongly.

    Carries optional partial data in .partial for diagnosis.
    """

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class InvariantViolation(VassLabError):
    """An internal consistency check failed; indicates a bug or bad input object."""
