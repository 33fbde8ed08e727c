"""Integer polynomials and the even-degree binary form of a curve.

Polynomials are lists of ints, constant term first.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .arith import is_perfect_square
from .errors import BadArgsError
from .params import MAX_DEGREE

__all__ = [
    "BinaryForm",
    "DenominatorClass",
    "classify",
    "eval_form",
    "is_squarefree",
    "new_form",
    "reverse_form",
    "should_reverse",
]


# -- plain polynomial helpers -------------------------------------------------


def trim(p: Sequence[int]) -> list[int]:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p: Sequence[int]) -> int:
    """Degree of a trimmed polynomial; -1 for the zero polynomial."""
    return len(p) - 1


def derivative(p: Sequence[int]) -> list[int]:
    return trim([i * c for i, c in enumerate(p)][1:])


def content(p: Sequence[int]) -> int:
    g = 0
    for c in p:
        g = math.gcd(g, c)
    return g


def primitive(p: Sequence[int]) -> list[int]:
    """Divide out the (positive) content; signs are preserved."""
    g = content(p)
    if g <= 1:
        return list(p)
    return [c // g for c in p]


def pseudo_remainder(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """A positive multiple of the remainder of a by b.

    Every reduction step scales by |lc(b)|, never by a negative number, so
    signs at any point agree with those of the true remainder.
    """
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = trim(a)
    db = len(b) - 1
    lb = b[-1]
    scale, sign = abs(lb), (1 if lb > 0 else -1)
    while len(r) - 1 >= db:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [scale * c for c in r]
        for i, c in enumerate(b):
            r[i + shift] -= sign * lr * c
        r = trim(r)
    return r


def poly_gcd(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Primitive gcd over Q (up to sign) via the primitive remainder sequence."""
    a, b = primitive(trim(a)), primitive(trim(b))
    if len(a) < len(b):
        a, b = b, a
    while b:
        a, b = b, primitive(pseudo_remainder(a, b))
    return a


def evaluate(p: Sequence[int], x: int) -> int:
    v = 0
    for c in reversed(p):
        v = v * x + c
    return v


# -- binary forms --------------------------------------------------------------


@dataclass(frozen=True)
class BinaryForm:
    """f(x) = sum coeffs[i] x^i viewed as F(x, z) of even degree ``even_degree``.

    ``coeffs`` always has ``even_degree + 1`` entries; ``degree_n`` is the
    index of the highest nonzero one.
    """

    coeffs: tuple[int, ...]
    degree_n: int
    even_degree: int

    @property
    def weight(self) -> int:
        return self.even_degree // 2

    @property
    def leading(self) -> int:
        return self.coeffs[self.degree_n]

    def poly(self) -> list[int]:
        """The univariate polynomial f, trimmed."""
        return list(self.coeffs[: self.degree_n + 1])


def new_form(coeffs: Sequence[int], max_degree: int = MAX_DEGREE) -> BinaryForm:
    coeffs = [int(c) for c in coeffs]
    declared = len(coeffs) - 1
    if declared <= 0:
        raise BadArgsError(f"degree must be positive, got {declared}")
    if declared > max_degree:
        raise BadArgsError(f"degree {declared} exceeds the maximum {max_degree}")
    f = trim(coeffs)
    if not f:
        raise BadArgsError("all coefficients are zero")
    even = declared + (declared & 1)
    padded = coeffs + [0] * (even + 1 - len(coeffs))
    return BinaryForm(tuple(padded), len(f) - 1, even)


def eval_form(F: BinaryForm, a: int, b: int) -> int:
    """F(a, b) = sum c_i a^i b^(2m - i)."""
    c = F.coeffs
    v = c[-1]
    bp = 1
    for i in range(F.even_degree - 1, -1, -1):
        bp *= b
        v = v * a + c[i] * bp
    return v


def reverse_form(F: BinaryForm) -> BinaryForm:
    """The form F(z, x); points map back via (x : y : z) -> (z : y : x)."""
    rc = F.coeffs[::-1]
    n = max(i for i, c in enumerate(rc) if c)
    return BinaryForm(rc, n, F.even_degree)


def is_squarefree(F: BinaryForm) -> bool:
    if F.even_degree - F.degree_n > 1:
        return False
    f = F.poly()
    if len(f) <= 1:
        return True
    return len(poly_gcd(f, derivative(f))) == 1


class DenominatorClass(enum.IntEnum):
    """Ordered so that a larger value means stronger denominator filtering."""

    EVEN_GENERAL = 0
    EVEN_NON_SQUARE_LC = 1
    ODD_GENERAL = 2
    ODD_MONIC = 3


def classify(F: BinaryForm) -> DenominatorClass:
    lc = F.leading
    if F.degree_n & 1:
        return DenominatorClass.ODD_MONIC if abs(lc) == 1 else DenominatorClass.ODD_GENERAL
    if is_perfect_square(lc) is None:
        return DenominatorClass.EVEN_NON_SQUARE_LC
    return DenominatorClass.EVEN_GENERAL


def should_reverse(F: BinaryForm) -> bool:
    return classify(reverse_form(F)) > classify(F)
