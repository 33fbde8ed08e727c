"""Exceptions raised by the search library."""


class HypersieveError(Exception):
    """Base class for search errors."""


class BadArgsError(HypersieveError, ValueError):
    """Invalid search arguments (nonpositive degree or height, too large degree, ...)."""


class NonSquarefreeError(HypersieveError):
    """The binary form attached to the curve is not squarefree."""


class SessionError(HypersieveError, RuntimeError):
    """A search session was used after it had been cleared."""
