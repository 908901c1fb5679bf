"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid or out-of-range input (bad prime, bad precision, bad config)."""


class IntegrityError(RuntimeError):
    """An exact mathematical identity that must hold failed to hold.

    Raised when a computed object contradicts a certified invariant, e.g.
    a residual valuation coming out wrong or a genus failing integrality.
    These are never expected on valid inputs; they signal a transcription
    error or an internal bug and must not be silenced.
    """


class UnsupportedError(NotImplementedError):
    """The request is well-formed but outside the implemented scope."""
