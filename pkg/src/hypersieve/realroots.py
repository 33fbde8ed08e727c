"""Sturm sequences and a cover of the region where a polynomial is >= 0."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .poly import derivative, pseudo_remainder, primitive, trim

__all__ = [
    "IntervalSet",
    "SturmChain",
    "count_real_roots",
    "intersect_domains",
    "positivity_intervals",
    "sign_changes",
    "sturm_chain",
]

Point = Union[int, Fraction, float]

INF = math.inf


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, pairwise disjoint closed intervals with float (or infinite) ends."""

    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        prev = -INF
        for i, (lo, up) in enumerate(self.intervals):
            if not lo <= up:
                raise ValueError(f"interval with low {lo} > up {up}")
            if i and not prev < lo:
                raise ValueError("intervals must be sorted and disjoint")
            prev = up

    @classmethod
    def full(cls) -> IntervalSet:
        return cls(((-INF, INF),))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> IntervalSet:
        """Sort and merge arbitrary (possibly overlapping) closed intervals."""
        merged: list[list[float]] = []
        for lo, up in sorted((float(lo), float(up)) for lo, up in pairs):
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], up)
            else:
                merged.append([lo, up])
        return cls(tuple((lo, up) for lo, up in merged))

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def contains(self, x: Point) -> bool:
        """Exact membership test (floats convert exactly to rationals)."""
        return any(lo <= x <= up for lo, up in self.intervals)

    def measure(self) -> float:
        return sum(up - lo for lo, up in self.intervals)


@dataclass(frozen=True)
class SturmChain:
    polys: tuple[tuple[int, ...], ...]


def sturm_chain(f: Sequence[int]) -> SturmChain:
    """f, f', then negated remainders, each scaled by a positive rational.

    The scaling keeps every sign pattern of the rational chain intact.
    """
    f = trim(f)
    if not f:
        raise ValueError("Sturm chain of the zero polynomial")
    chain = [f]
    d = derivative(f)
    while d:
        chain.append(d)
        r = pseudo_remainder(chain[-2], chain[-1])
        d = primitive([-c for c in r])
    return SturmChain(tuple(tuple(p) for p in chain))


def _sign_at(p: Sequence[int], num: int, den: int) -> int:
    # sign of p(num/den) for den > 0, homogenised to stay in the integers
    v = 0
    dp = 1
    for c in reversed(p):
        v = v * num + c * dp
        dp *= den
    # v = sum c_i num^i den^(deg - i)
    return (v > 0) - (v < 0)


def _signs(chain: SturmChain, x: Point) -> list[int]:
    if isinstance(x, float) and math.isinf(x):
        if x > 0:
            return [(p[-1] > 0) - (p[-1] < 0) for p in chain.polys]
        return [((p[-1] > 0) - (p[-1] < 0)) * (-1 if (len(p) - 1) & 1 else 1) for p in chain.polys]
    q = Fraction(x)
    return [_sign_at(p, q.numerator, q.denominator) for p in chain.polys]


def _count_changes(signs: Iterable[int]) -> int:
    changes = 0
    last = 0
    for s in signs:
        if s:
            if last and s != last:
                changes += 1
            last = s
    return changes


def sign_changes(chain: SturmChain, point: Point) -> int:
    return _count_changes(_signs(chain, point))


def count_real_roots(chain: SturmChain, low: Point, up: Point) -> int:
    """Number of distinct real roots in (low, up]."""
    if low > up:
        raise ValueError("empty interval")
    return sign_changes(chain, low) - sign_changes(chain, up)


def _round_down(q: Fraction | float) -> float:
    if isinstance(q, float):
        return q
    try:
        x = float(q)
    except OverflowError:
        return -INF if q < 0 else sys.float_info.max
    if Fraction(x) > q:
        x = math.nextafter(x, -INF)
    return x


def _round_up(q: Fraction | float) -> float:
    if isinstance(q, float):
        return q
    try:
        x = float(q)
    except OverflowError:
        return INF if q > 0 else -sys.float_info.max
    if Fraction(x) < q:
        x = math.nextafter(x, INF)
    return x


def _root_bound(f: Sequence[int]) -> int:
    """A power of two strictly exceeding the absolute value of every root."""
    lead = abs(f[-1])
    m = max((abs(c) for c in f[:-1]), default=0)
    bound = 1 + -(-m // lead)
    k = 0
    while (1 << k) < bound:
        k += 1
    return 1 << k


def positivity_intervals(f: Sequence[int], depth: int) -> IntervalSet:
    """Intervals covering every x with f(x) >= 0.

    Starts from [-B, B] (B bounds all real roots), bisects root-containing
    pieces at most ``depth`` times and drops pieces on which f is provably
    negative.  Empty exactly when f is negative definite.  ``depth < 0``
    skips all of this and returns the whole line.
    """
    if depth < 0:
        return IntervalSet.full()
    f = trim(f)
    if len(f) <= 1:
        return IntervalSet.full() if not f or f[0] >= 0 else IntervalSet()
    chain = sturm_chain(f)
    s_minus = _signs(chain, -INF)
    s_plus = _signs(chain, INF)
    if _count_changes(s_minus) == _count_changes(s_plus):
        # no real roots: constant sign
        return IntervalSet.full() if s_plus[0] > 0 else IntervalSet()

    B = _root_bound(f)
    pieces: list[tuple[Fraction | float, Fraction | float]] = []
    if s_minus[0] > 0:
        pieces.append((-INF, Fraction(-B)))

    def info(x: Fraction) -> tuple[int, int]:
        s = _signs(chain, x)
        return _count_changes(s), s[0]

    lo, up = Fraction(-B), Fraction(B)
    stack = [(lo, up, info(lo)[0], info(up), depth)]
    while stack:
        lo, up, v_lo, (v_up, f_up), d = stack.pop()
        if v_lo == v_up:
            # no root in (lo, up]; a root at lo is covered by the left neighbour
            if f_up > 0:
                pieces.append((lo, up))
        elif d == 0:
            pieces.append((lo, up))
        else:
            mid = (lo + up) / 2
            v_mid, f_mid = info(mid)
            stack.append((mid, up, v_mid, (v_up, f_up), d - 1))
            stack.append((lo, mid, v_lo, (v_mid, f_mid), d - 1))

    if s_plus[0] > 0:
        pieces.append((Fraction(B), INF))

    merged: list[list] = []
    for lo, up in pieces:
        if merged and merged[-1][1] == lo:
            merged[-1][1] = up
        else:
            merged.append([lo, up])
    # outward rounding may make neighbours touch; from_pairs re-merges them
    return IntervalSet.from_pairs((_round_down(lo), _round_up(up)) for lo, up in merged)


def intersect_domains(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    out = []
    i = j = 0
    ia, ib = a.intervals, b.intervals
    while i < len(ia) and j < len(ib):
        lo = max(ia[i][0], ib[j][0])
        up = min(ia[i][1], ib[j][1])
        if lo <= up:
            out.append((lo, up))
        if ia[i][1] < ib[j][1]:
            i += 1
        else:
            j += 1
    # touching intervals from different inputs can repeat an endpoint
    return IntervalSet.from_pairs(out)
