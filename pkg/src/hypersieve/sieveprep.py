"""Precomputed modular data for the sieve.

For each odd prime p we tabulate which (a mod p, b mod p) make F(a, b) a
square mod p, and expand each row into words whose bit patterns repeat with
period p words.  Odd primes are ranked by how few residue pairs survive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith import jacobi
from .poly import BinaryForm, DenominatorClass, classify

__all__ = [
    "Mod16Table",
    "PrimeSelection",
    "PrimeSieveTable",
    "build_prime_table",
    "expand_row",
    "expand_rows",
    "forbidden_divisors",
    "mod16_analysis",
    "odd_primes_below",
    "select_primes",
    "squares_mod",
]

SQUARES_MOD16 = frozenset({0, 1, 4, 9})

_WORD_DTYPES = {32: np.uint32, 64: np.uint64}


@lru_cache(maxsize=None)
def odd_primes_below(bound: int) -> tuple[int, ...]:
    sieve = bytearray([1]) * bound
    sieve[:2] = b"\x00\x00"
    for i in range(2, int(bound**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytes(len(range(i * i, bound, i)))
    return tuple(i for i in range(3, bound) if sieve[i])


def squares_mod(p: int) -> int:
    """Bit mask with bit r set iff r is a square mod p (0 included)."""
    mask = 0
    for s in range(p):
        mask |= 1 << (s * s % p)
    return mask


def expand_rows(rows: np.ndarray, step: int = 1, offset: int = 0, word_bits: int = 64) -> np.ndarray:
    """Spread each length-p bit row over p words.

    Bit i of word k of row r is ``rows[r, (step * (k * word_bits + i) + offset) % p]``,
    so word k serves every array word whose index is congruent to k mod p
    when bit j of the array stands for the numerator ``step * j + offset``.
    """
    rows = np.atleast_2d(rows)
    p = rows.shape[1]
    # the bit sequence j -> row[(step * j + offset) % p] has period p, and
    # p words hold exactly word_bits periods of it
    seq = rows[:, (step * np.arange(p) + offset) % p].astype(np.uint8)
    packed = np.packbits(np.tile(seq, (1, word_bits)), axis=1, bitorder="little")
    return packed.view("<u%d" % (word_bits // 8)).astype(_WORD_DTYPES[word_bits])


def expand_row(row: np.ndarray, step: int = 1, offset: int = 0, word_bits: int = 64) -> np.ndarray:
    return expand_rows(row[None, :], step, offset, word_bits)[0]


@dataclass
class PrimeSieveTable:
    p: int
    square_mask: int
    rows: np.ndarray  # bool, rows[b, j] <=> F(j, b) is a square mod p
    score: float
    word_bits: int = 64
    _words: dict = field(default_factory=dict, repr=False)

    def row_mask(self, b: int) -> int:
        return sum(1 << int(j) for j in np.flatnonzero(self.rows[b % self.p]))

    def words(self, step: int = 1, offset: int = 0) -> np.ndarray:
        """(p, p) array; entry [r, k] is word k of the expansion of row r."""
        key = (step, offset)
        w = self._words.get(key)
        if w is None:
            w = expand_rows(self.rows, step, offset, self.word_bits)
            self._words[key] = w
        return w

    @property
    def word_rows(self) -> np.ndarray:
        return self.words(1, 0)

    def excludes_everything(self) -> bool:
        """True if no coprime pair survives, i.e. the curve has no p-adic points."""
        return int(self.rows.sum()) - int(self.rows[0, 0]) == 0


def _form_values_mod(F: BinaryForm, p: int) -> np.ndarray:
    """vals[b, j] = F(j, b) mod p."""
    r = np.arange(p, dtype=np.int64)
    deg = F.even_degree
    powers = np.ones((deg + 1, p), dtype=np.int64)
    for k in range(1, deg + 1):
        powers[k] = powers[k - 1] * r % p
    vals = np.zeros((p, p), dtype=np.int64)
    for i, c in enumerate(F.coeffs):
        c %= p
        if c:
            vals = (vals + c * np.outer(powers[deg - i], powers[i])) % p
    return vals


def build_prime_table(F: BinaryForm, p: int, word_bits: int = 64) -> PrimeSieveTable:
    mask = squares_mod(p)
    is_sq = np.array([(mask >> r) & 1 for r in range(p)], dtype=bool)
    rows = is_sq[_form_values_mod(F, p)]
    score = float(rows.sum()) / (p * p)
    return PrimeSieveTable(p, mask, rows, score, word_bits)


@dataclass(frozen=True)
class PrimeSelection:
    tables: tuple[PrimeSieveTable, ...]
    stage1: int
    num_primes: int

    @property
    def stage1_tables(self) -> tuple[PrimeSieveTable, ...]:
        return self.tables[: self.stage1]

    @property
    def stage2_tables(self) -> tuple[PrimeSieveTable, ...]:
        return self.tables[self.stage1 :]


def clamp_counts(num_primes: int, sp2: int, sp1: int, available: int) -> tuple[int, int, int]:
    """Reduce M, N, n in that order until n <= N <= M <= available."""
    m = max(0, min(num_primes, available))
    n2 = max(0, min(sp2, m))
    n1 = max(0, min(sp1, n2))
    return m, n2, n1


def select_primes(tables, num_primes: int, sp2: int, sp1: int, available: int | None = None) -> PrimeSelection:
    """Keep the sp2 lowest-scoring of the first num_primes tables; the first sp1 form stage 1."""
    tables = list(tables)
    if available is None:
        available = len(tables)
    m, n2, n1 = clamp_counts(num_primes, sp2, sp1, available)
    ranked = sorted(tables[:m], key=lambda t: (t.score, t.p))
    return PrimeSelection(tuple(ranked[:n2]), n1, m)


def _valuation(n: int, p: int) -> tuple[int, int]:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def forbidden_divisors(F: BinaryForm, max_forbidden: int, primes) -> list[int]:
    """Primes / prime powers that cannot divide the denominator of any point.

    Only meaningful for even degree with non-square leading coefficient l:
    p is forbidden if l is a non-residue mod p, and p^(v+1) if p^v || l with
    l not a p-adic square.
    """
    if classify(F) is not DenominatorClass.EVEN_NON_SQUARE_LC or max_forbidden <= 0:
        return []
    lc = F.leading
    out = []
    for p in primes:
        if lc % p:
            if jacobi(lc, p) == -1:
                out.append(p)
        else:
            v, u = _valuation(lc, p)
            if v & 1 or jacobi(u, p) == -1:
                out.append(p ** (v + 1))
        if len(out) >= max_forbidden:
            break
    return out


@dataclass(frozen=True)
class Mod16Table:
    """allowed[b] is a 16-bit mask of numerators a mod 16 compatible with b."""

    allowed: tuple[int, ...]

    def parity(self, b: int) -> str | None:
        """'even', 'odd' or 'mixed' for the allowed numerators; None if there are none."""
        m = self.allowed[b & 15]
        if not m:
            return None
        if not m & 0xAAAA:
            return "even"
        if not m & 0x5555:
            return "odd"
        return "mixed"


def mod16_analysis(F: BinaryForm) -> Mod16Table:
    allowed = []
    for b in range(16):
        mask = 0
        for a in range(16):
            if not (b | a) & 1:
                continue  # both even: not coprime
            v = sum(c * a**i * b ** (F.even_degree - i) for i, c in enumerate(F.coeffs))
            if v % 16 in SQUARES_MOD16:
                mask |= 1 << a
        allowed.append(mask)
    return Mod16Table(tuple(allowed))
