class TheoryFusionError(Exception):
    """Base class for every error raised by this package."""


class ParseError(TheoryFusionError):
    """Syntax error, unresolved reference or duplicate definition in a workspace."""

    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


class WellFormednessError(TheoryFusionError):
    """An entity violates a structural invariant (unknown symbol, arity, free variable)."""


class MorphismError(TheoryFusionError):
    """Endpoint mismatch, non-total map or arity violation in a morphism."""


class DiagramError(TheoryFusionError):
    pass


class ResourceLimitError(TheoryFusionError):
    """A bounded search exceeded its configured cap."""
