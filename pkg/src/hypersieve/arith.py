"""Small-integer number theory that avoids division in the inner loops.

Everything here works on Python ints; "machine integer" arguments are just
ints that are expected to stay small.
"""

from __future__ import annotations

import math

__all__ = [
    "ResidueTracker",
    "binary_gcd",
    "is_perfect_square",
    "jacobi",
    "trailing_zeros",
]


def _residue_mask(m: int) -> int:
    mask = 0
    for s in range(m):
        mask |= 1 << (s * s % m)
    return mask


_SQ64 = _residue_mask(64)
_SQ63 = _residue_mask(63)
_SQ65 = _residue_mask(65)
_SQ11 = _residue_mask(11)
_FILTER_MOD = 63 * 65 * 11


def trailing_zeros(n: int) -> int:
    """Number of trailing zero bits of a nonzero int."""
    return (n & -n).bit_length() - 1


def is_perfect_square(n: int) -> int | None:
    """Return the nonnegative square root of ``n`` if it is a square, else None.

    Residue tables mod 64, 63, 65 and 11 reject most non-squares before the
    integer square root is taken.
    """
    if n < 0:
        return None
    if not (_SQ64 >> (n & 63)) & 1:
        return None
    if n >= _FILTER_MOD:
        r = n % _FILTER_MOD
        if not ((_SQ63 >> (r % 63)) & (_SQ65 >> (r % 65)) & (_SQ11 >> (r % 11)) & 1):
            return None
    root = math.isqrt(n)
    return root if root * root == n else None


def binary_gcd(a: int, b: int) -> int:
    """gcd(|a|, b) using shifts and subtractions only; gcd(0, 0) == 0."""
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    if a == 0:
        return b
    if b == 0:
        return a
    shift = ((a | b) & -(a | b)).bit_length() - 1
    a >>= (a & -a).bit_length() - 1
    while b:
        b >>= (b & -b).bit_length() - 1
        if a > b:
            a, b = b, a
        b -= a
    return a << shift


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 1, computed with the binary algorithm."""
    if n <= 0 or not n & 1:
        raise ValueError(f"Jacobi symbol needs an odd positive modulus, got {n}")
    t = 1
    if a < 0:
        a = -a
        if n & 3 == 3:
            t = -t
    while a:
        tz = (a & -a).bit_length() - 1
        a >>= tz
        # (2/n) = -1 exactly when n = 3, 5 (mod 8)
        if tz & 1 and (n & 7) in (3, 5):
            t = -t
        if a < n:
            a, n = n, a
            if a & n & 2:
                t = -t
        a -= n
    return t if n == 1 else 0


class ResidueTracker:
    """Keeps ``current == x mod p`` while x only ever grows by small steps."""

    __slots__ = ("modulus", "current")

    def __init__(self, modulus: int, current: int = 0):
        if not 0 <= current < modulus:
            raise ValueError(f"residue {current} out of range for modulus {modulus}")
        self.modulus = modulus
        self.current = current

    def advance(self, delta: int) -> int:
        # delta is expected to be a small multiple of the modulus at most
        c = self.current + delta
        p = self.modulus
        while c >= p:
            c -= p
        self.current = c
        return c

    def __repr__(self) -> str:
        return f"ResidueTracker(modulus={self.modulus}, current={self.current})"
