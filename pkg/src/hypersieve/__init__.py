"""Rational points of bounded height on hyperelliptic curves y^2 = f(x)."""

from .api import Session, find_points, find_points_clear, find_points_init, find_points_work
from .engine import QuitFlag, RationalPoint, SearchStats
from .errors import BadArgsError, NonSquarefreeError, HypersieveError, SessionError
from .params import MAX_DEGREE, Flags, SearchArgs

__all__ = [
    "BadArgsError",
    "Flags",
    "HypersieveError",
    "MAX_DEGREE",
    "NonSquarefreeError",
    "QuitFlag",
    "RationalPoint",
    "SearchArgs",
    "SearchStats",
    "Session",
    "SessionError",
    "find_points",
    "find_points_clear",
    "find_points_init",
    "find_points_work",
]

__version__ = "0.1.0"
