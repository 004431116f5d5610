"""Exception types shared across the toolkit."""


class MinksurfError(Exception):
    """Base class for all toolkit errors."""


class ParseError(MinksurfError, ValueError):
    """Malformed expression text; ``offset`` is the byte position of the problem."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (offset {offset})")


class DomainError(MinksurfError, ValueError):
    """An expression was evaluated outside its mathematical domain."""

    def __init__(self, message: str, at=None):
        self.at = at
        if at is not None:
            message = f"{message} at (u, v) = ({at[0]:.17g}, {at[1]:.17g})"
        super().__init__(message)


class NotSpacelikeError(MinksurfError, ValueError):
    """The induced metric is not positive definite at the requested point."""


class FrameError(MinksurfError, ValueError):
    """A geometric frame is undefined here (degenerate normal space,
    minimal point, or lightlike mean curvature)."""


class ReconstructionError(MinksurfError, RuntimeError):
    """Frame integration failed (inconsistent fields or too-coarse grid)."""
