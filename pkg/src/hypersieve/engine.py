"""The search loop: admissible denominators, two-stage word sieve, exact check.

For a denominator b the candidate numerators a in [-H, H] are bits of an
array of 64-bit words, with a = 0 (or, in packed layouts, the first
numerator of the right parity) at bit 0 of a word.  Consecutive
denominators sharing a bit layout are sieved together as the rows of one
2-D array, which keeps the per-denominator interpreter overhead low.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .arith import ResidueTracker, is_perfect_square, jacobi, trailing_zeros
from .params import Flags
from .poly import BinaryForm, DenominatorClass, eval_form, reverse_form
from .realroots import IntervalSet
from .sieveprep import Mod16Table, PrimeSelection, PrimeSieveTable

__all__ = [
    "QuitFlag",
    "RationalPoint",
    "SearchPlan",
    "SearchStats",
    "denominators",
    "exact_check",
    "infinity_points",
    "search",
    "sieve_denominator",
]

log = logging.getLogger("hypersieve")

WORD_BITS = 64
# one batch holds at most this many words (rows x columns)
BATCH_WORDS = 1 << 17
MAX_BATCH = 256
SEGMENT = 1 << 15

_ONES = np.array([(1 << k) - 1 for k in range(WORD_BITS)] + [(1 << WORD_BITS) - 1], dtype=np.uint64)
_ALL = _ONES[WORD_BITS]

Callback = Callable[[int, int, int, object, "QuitFlag"], int]


class RationalPoint(NamedTuple):
    x: int
    y: int
    z: int


class QuitFlag:
    """Handed to the point callback; calling ``set()`` stops the search."""

    __slots__ = ("value",)

    def __init__(self):
        self.value = False

    def set(self) -> None:
        self.value = True

    def __bool__(self) -> bool:
        return self.value


@dataclass
class SearchStats:
    denominators: int = 0
    survivors: int = 0
    exact_checks: int = 0
    callbacks: int = 0


@dataclass
class SearchPlan:
    """Everything the engine needs, computed by the api layer."""

    form: BinaryForm
    height: int
    b_low: int
    b_high: int
    domain: IntervalSet
    selection: PrimeSelection
    mod16: Mod16Table
    dclass: DenominatorClass
    forbidden: list[int] = field(default_factory=list)
    flags: Flags = Flags.NONE
    array_size: int = 1024
    reversed: bool = False
    obstructed: bool = False
    pack_parity: bool = True


# -- denominators --------------------------------------------------------------


def _squarefree_divisors(n: int, limit: int) -> list[int] | None:
    """Squarefree divisors d <= limit of n > 0, or None if n cannot be split far enough."""
    primes = []
    p = 2
    trial = min(limit, 1 << 20)
    while p <= trial and p * p <= n:
        if n % p == 0:
            primes.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        if p * p > n:
            primes.append(n)  # n is prime
        elif n > limit:
            from sympy import isprime

            if not isprime(n):
                return None  # composite cofactor might hide a factor <= limit
            primes.append(n)
        else:
            return None
    divs = [1]
    for q in primes:
        divs += [d * q for d in divs if d * q <= limit]
    return sorted(divs)


def _coprime_part(b: int, l: int) -> int:
    """The part of b coprime to 2*l."""
    b >>= trailing_zeros(b)
    g = math.gcd(b, l)
    while g > 1:
        b //= g
        g = math.gcd(b, g)
    return b


def denominators(
    b_low: int,
    b_high: int,
    dclass: DenominatorClass,
    lc: int,
    forbidden: Sequence[int] = (),
    mod16: Mod16Table | None = None,
    use_jacobi: bool = True,
) -> Iterator[int]:
    """Denominators in [b_low, b_high] that survive the applicable filters, ascending."""
    allowed = mod16.allowed if mod16 is not None else (1,) * 16
    b_low = max(b_low, 1)
    if b_low > b_high:
        return

    if dclass is DenominatorClass.ODD_MONIC:
        e = math.isqrt(b_low - 1) + 1
        while e * e <= b_high:
            b = e * e
            if allowed[b & 15]:
                yield b
            e += 1
        return

    if dclass is DenominatorClass.ODD_GENERAL:
        divs = _squarefree_divisors(abs(lc), b_high)
        if divs is not None:
            def multiples(d):
                e = math.isqrt((b_low - 1) // d) + 1
                while d * e * e <= b_high:
                    yield d * e * e
                    e += 1

            for b in heapq.merge(*(multiples(d) for d in divs)):
                if allowed[b & 15]:
                    yield b
            return
        # fall back to testing every b: its part coprime to lc must be a square
        for b in range(b_low, b_high + 1):
            if allowed[b & 15]:
                u = b
                g = math.gcd(u, lc)
                while g > 1:
                    u //= g
                    g = math.gcd(u, g)
                if is_perfect_square(u) is not None:
                    yield b
        return

    jacobi_lc = use_jacobi and dclass is DenominatorClass.EVEN_NON_SQUARE_LC
    big_lc = abs(lc).bit_length() > 62
    for start in range(b_low, b_high + 1, SEGMENT):
        stop = min(b_high + 1, start + SEGMENT)
        keep = np.ones(stop - start, dtype=bool)
        for r in range(16):
            if not allowed[r]:
                keep[(r - start) % 16 :: 16] = False
        for d in forbidden:
            keep[(-start) % d :: d] = False
        for b in (np.flatnonzero(keep) + start).tolist():
            if jacobi_lc:
                bp = _coprime_part(b, lc)
                if bp > 1 and jacobi(lc % bp if big_lc else lc, bp) == -1:
                    continue
            yield b


# -- exact checks ----------------------------------------------------------------


def exact_check(F: BinaryForm, a: int, b: int, flags: Flags = Flags.NONE) -> list[RationalPoint]:
    """Points (a : y : b) on y^2 = F(x, z); empty unless gcd(a, b) == 1."""
    if math.gcd(a, b) != 1:
        return []
    return _points_over(F, a, b, flags)


def _points_over(F: BinaryForm, a: int, b: int, flags: Flags) -> list[RationalPoint]:
    if flags & Flags.NO_CHECK:
        return [RationalPoint(a, 0, b)]
    r = is_perfect_square(eval_form(F, a, b))
    if r is None:
        return []
    if r == 0 or flags & Flags.NO_Y:
        return [RationalPoint(a, r, b)]
    return [RationalPoint(a, r, b), RationalPoint(a, -r, b)]


def infinity_points(F: BinaryForm, flags: Flags = Flags.NONE) -> list[RationalPoint]:
    """Points with z = 0 of the searched form (before any coordinate swap)."""
    if flags & Flags.NO_INFINITY:
        return []
    s = is_perfect_square(F.coeffs[-1])
    if s is None:
        return []
    if s == 0 or flags & (Flags.NO_Y | Flags.NO_CHECK):
        return [RationalPoint(1, s if not flags & Flags.NO_CHECK else 0, 0)]
    return [RationalPoint(1, s, 0), RationalPoint(1, -s, 0)]


# -- the word sieve -------------------------------------------------------------


class NumeratorSieve:
    """Sieves numerators for batches of denominators of one curve."""

    def __init__(self, plan: SearchPlan):
        self.plan = plan
        self.height = plan.height
        self.tables = plan.selection.tables
        self.stage1 = plan.selection.stage1
        self.array_size = max(1, plan.array_size)
        self.allowed = plan.mod16.allowed
        self.bounds = [
            (None if math.isinf(lo) else lo.as_integer_ratio(), None if math.isinf(up) else up.as_integer_ratio())
            for lo, up in plan.domain
        ]
        self.chunk_cap = max(self.array_size, BATCH_WORDS)
        self._ext: dict = {}
        self._m16: dict = {}

    # layout: bit j of the array stands for numerator step * j + offset
    def layout(self, b: int) -> tuple[int, int]:
        if self.plan.pack_parity:
            parity = self.plan.mod16.parity(b)
            if parity == "even":
                return 2, 0
            if parity == "odd":
                return 2, 1
        return 1, 0

    def numerator_ranges(self, b: int) -> list[tuple[int, int]]:
        """Integer ranges of a with a/b in the domain and |a| <= H."""
        H = self.height
        out = []
        for lo, up in self.bounds:
            a_lo = -H if lo is None else max(-H, -((-b * lo[0]) // lo[1]))
            a_hi = H if up is None else min(H, (b * up[0]) // up[1])
            if a_lo <= a_hi:
                out.append((a_lo, a_hi))
        return out

    def _mod16_word(self, b: int, step: int, offset: int) -> int:
        key = (self.allowed[b & 15], step, offset)
        w = self._m16.get(key)
        if w is None:
            m = key[0]
            w = sum(1 << i for i in range(WORD_BITS) if (m >> ((step * i + offset) & 15)) & 1)
            self._m16[key] = w
        return w

    def _extended(self, t: PrimeSieveTable, step: int, offset: int, width: int) -> np.ndarray:
        """Word rows repeated out to length p + width, so any window of width words is a slice."""
        key = (t.p, step, offset)
        ext = self._ext.get(key)
        if ext is None or ext.shape[1] < t.p + width:
            words = t.words(step, offset)
            ext = np.take(words, np.arange(t.p + max(width, self.array_size)) % t.p, axis=1)
            self._ext[key] = ext
        return ext

    def sieve(self, bs, residues, step: int, offset: int, ranges) -> tuple[np.ndarray, np.ndarray]:
        """Two-stage sieve for denominators ``bs`` sharing one layout.

        ``residues[i, k]`` is bs[i] mod (k-th selected prime); ``ranges[i]``
        are the numerator ranges of bs[i].  Returns (row index, numerator)
        arrays ordered by row, then numerator.
        """
        B = len(bs)
        # bit range j with a_lo <= step * j + offset <= a_hi
        jr = [[(-((offset - a_lo) // step), (a_hi - offset) // step) for a_lo, a_hi in rs] for rs in ranges]
        K = max(len(r) for r in jr)
        JL = np.ones((B, K), dtype=np.int64)
        JH = np.zeros((B, K), dtype=np.int64)
        for i, r in enumerate(jr):
            for k, (jl, jh) in enumerate(r):
                JL[i, k] = jl
                JH[i, k] = jh
        valid = JL <= JH
        g0 = int(JL[valid].min()) >> 6
        g1 = int(JH[valid].max()) >> 6
        n = g1 - g0 + 1

        arr = np.zeros((B, n), dtype=np.uint64)
        if B * K <= 16:
            # few long rows: set whole words by slicing, patch the two ends
            for i in range(B):
                for k in range(K):
                    jl, jh = int(JL[i, k]), int(JH[i, k])
                    if jl > jh:
                        continue
                    wl, wh = (jl >> 6) - g0, (jh >> 6) - g0
                    lo_mask = ~_ONES[jl & 63]
                    hi_mask = _ONES[(jh & 63) + 1]
                    if wl == wh:
                        arr[i, wl] |= lo_mask & hi_mask
                    else:
                        arr[i, wl] |= lo_mask
                        arr[i, wl + 1 : wh] = _ALL
                        arr[i, wh] |= hi_mask
        else:
            base = np.arange(g0, g1 + 1, dtype=np.int64) << 6
            for k in range(K):
                lo_bit = np.clip(JL[:, k, None] - base, 0, WORD_BITS)
                hi_bit = np.clip(JH[:, k, None] - base + 1, 0, WORD_BITS)
                arr |= _ONES[hi_bit] & ~_ONES[lo_bit]
        m16 = np.array([self._mod16_word(b, step, offset) for b in bs], dtype=np.uint64)
        arr &= m16[:, None]

        # stage 1: whole array, chunk by chunk
        # a batch of few rows gets wider chunks so that the numpy call
        # overhead does not dominate
        L = max(self.array_size, min(self.chunk_cap, BATCH_WORDS // B))
        width = min(L, n)
        stage1 = [
            (self._extended(t, step, offset, width), t.p, residues[:, k]) for k, t in enumerate(self.tables[: self.stage1])
        ]
        if stage1:
            for s in range(0, n, L):
                e = min(n, s + L)
                chunk = arr[:, s:e]
                for ext, p, rows in stage1:
                    off = (g0 + s) % p
                    chunk &= ext[rows, off : off + (e - s)]

        # stage 2: surviving words only
        bi, wi = np.nonzero(arr)
        vals = arr[bi, wi]
        gw = wi.astype(np.int64) + g0
        for k in range(self.stage1, len(self.tables)):
            if not len(vals):
                break
            t = self.tables[k]
            vals &= t.words(step, offset)[residues[bi, k], gw % t.p]
            live = vals != 0
            if not live.all():
                bi, gw, vals = bi[live], gw[live], vals[live]

        bits = np.unpackbits(vals.astype("<u8").view(np.uint8).reshape(-1, 8), axis=1, bitorder="little")
        ki, bit = np.nonzero(bits)
        a = step * (gw[ki] * WORD_BITS + bit) + offset
        return bi[ki], a


def _numerator_batches(sieve: NumeratorSieve, dens: Iterable[int], primes: Sequence[int]):
    """Group denominators into batches; yields (bs, residues, ranges, layouts)."""
    trackers = [ResidueTracker(p) for p in primes]
    prev = 0
    batch, res, rngs, lays = [], [], [], []
    lo_min = hi_max = 0
    for b in dens:
        ranges = sieve.numerator_ranges(b)
        if not ranges:
            continue
        delta = b - prev
        if prev == 0 or delta >= 64 * WORD_BITS:
            for t in trackers:
                t.current = b % t.modulus
        else:
            for t in trackers:
                t.advance(delta)
        prev = b
        if batch:
            lo_min = min(lo_min, ranges[0][0])
            hi_max = max(hi_max, ranges[-1][1])
        else:
            lo_min, hi_max = ranges[0][0], ranges[-1][1]
        batch.append(b)
        res.append([t.current for t in trackers])
        rngs.append(ranges)
        lays.append(sieve.layout(b))
        if len(batch) >= MAX_BATCH or len(batch) * ((hi_max - lo_min) // WORD_BITS + 1) >= BATCH_WORDS:
            yield batch, res, rngs, lays
            batch, res, rngs, lays = [], [], [], []
    if batch:
        yield batch, res, rngs, lays


def _survivors(sieve: NumeratorSieve, batch, res, rngs, lays) -> list[list[int]]:
    out: list[list[int]] = [[] for _ in batch]
    residues = np.array(res, dtype=np.int64).reshape(len(batch), -1)
    for layout in sorted(set(lays)):
        idx = [i for i, l in enumerate(lays) if l == layout]
        rows, a = sieve.sieve(
            [batch[i] for i in idx], residues[idx], layout[0], layout[1], [rngs[i] for i in idx]
        )
        a = a.tolist()
        for r, av in zip(rows.tolist(), a):
            out[idx[r]].append(av)
    return out


def sieve_denominator(b: int, plan: SearchPlan) -> list[int]:
    """Numerators a surviving both sieving stages for the single denominator b."""
    sieve = NumeratorSieve(plan)
    primes = [t.p for t in plan.selection.tables]
    for batch in _numerator_batches(sieve, [b], primes):
        return _survivors(sieve, *batch)[0]
    return []


# -- search ------------------------------------------------------------------------


def search(plan: SearchPlan, callback: Callback, context=None, stats: SearchStats | None = None) -> int:
    """Run the search; returns the sum of the callback's return values."""
    if stats is None:
        stats = SearchStats()
    quit_flag = QuitFlag()
    total = 0
    F = plan.form
    flags = plan.flags

    def emit(pt: RationalPoint, swap: bool = plan.reversed) -> bool:
        nonlocal total
        x, y, z = pt
        if swap:
            x, z = z, x
            if z < 0:
                x, z = -x, -z
        if z == 0 and flags & Flags.NO_INFINITY:
            return False
        stats.callbacks += 1
        w = callback(x, z, y, context, quit_flag)
        if w:
            total += w
        return bool(quit_flag)

    skip_origin = False
    if plan.reversed:
        # the original curve's points at infinity are (0 : y : 1) here;
        # report them first, in original coordinates, as in the plain case
        original = reverse_form(F)
        skip_origin = plan.b_low == 1
        if skip_origin:
            for pt in infinity_points(original, flags):
                if emit(pt, swap=False):
                    return total
    for pt in infinity_points(F, flags & ~Flags.NO_INFINITY):
        if emit(pt):
            return total

    if plan.obstructed or not plan.domain:
        log.debug("no finite points possible; sieve skipped")
        return total

    sieve = NumeratorSieve(plan)
    dens = denominators(
        plan.b_low,
        plan.b_high,
        plan.dclass,
        F.leading,
        plan.forbidden,
        plan.mod16,
        use_jacobi=not flags & Flags.NO_JACOBI,
    )
    primes = [t.p for t in plan.selection.tables]
    counting = not flags & Flags.NO_CHECK
    for batch in _numerator_batches(sieve, dens, primes):
        stats.denominators += len(batch[0])
        for b, cands in zip(batch[0], _survivors(sieve, *batch)):
            stats.survivors += len(cands)
            for a in cands:
                if math.gcd(a, b) != 1 or (skip_origin and a == 0 and b == 1):
                    continue
                if counting:
                    stats.exact_checks += 1
                for pt in _points_over(F, a, b, flags):
                    if emit(pt):
                        return total
    if flags & Flags.VERBOSE:
        log.info(
            "sieved %d denominators, %d survivors, %d exact checks, %d points",
            stats.denominators, stats.survivors, stats.exact_checks, stats.callbacks,
        )
    return total
