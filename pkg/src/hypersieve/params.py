"""Search parameters, flags and default constants."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

MAX_DEGREE = 10

DEFAULT_SP1 = 9
DEFAULT_SP2 = 16
DEFAULT_NUM_PRIMES = 28
DEFAULT_MAX_FORBIDDEN = 30
DEFAULT_STURM = 32
DEFAULT_ARRAY_SIZE = 1024  # words per stage-1 chunk
DEFAULT_PRIME_BITS = 7


class Flags(enum.IntFlag):
    NONE = 0
    NO_CHECK = 1
    NO_Y = 2
    NO_REVERSE = 4
    NO_JACOBI = 8
    VERBOSE = 16
    REVERSED = 32  # output only
    NO_INFINITY = 64


Interval = tuple[float, float]


@dataclass
class SearchArgs:
    """Everything a point search needs.

    Negative (or, for ``array_size``, non-positive) counts select the
    defaults above.  ``b_low``/``b_high`` <= 0 mean 1 and ``height``.
    ``sturm < 0`` skips the real-root computation.  ``domain`` lists closed
    intervals for the x-coordinate; an empty list means the whole line.
    ``prime_bits`` picks the candidate sieving primes p < 2**prime_bits.
    ``pack_parity`` lets the sieve store only numerators of the one parity
    the 2-adic analysis allows, where that applies.
    """

    coefficients: list[int]
    height: int
    degree: int | None = None
    domain: list[Interval] = field(default_factory=list)
    b_low: int = 0
    b_high: int = 0
    sp1: int = -1
    sp2: int = -1
    array_size: int = 0
    sturm: int = DEFAULT_STURM
    num_primes: int = -1
    max_forbidden: int = -1
    prime_bits: int = DEFAULT_PRIME_BITS
    flags: Flags = Flags.NONE
    pack_parity: bool = True

    @property
    def num_inter(self) -> int:
        return len(self.domain)
