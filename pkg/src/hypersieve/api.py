"""Public entry points: validate arguments, precompute, run the engine.

Typical use::

    args = SearchArgs([0, -2, 0, 1], height=100)
    total = find_points(args, lambda x, z, y, ctx, quit: 1)

or, for many curves, ``find_points_init`` / ``find_points_work`` /
``find_points_clear`` so that prime tables can be reused between calls.
"""

from __future__ import annotations

import logging
import math

from . import engine
from .engine import Callback, SearchPlan, SearchStats
from .errors import BadArgsError, NonSquarefreeError, SessionError
from .params import (
    DEFAULT_ARRAY_SIZE,
    DEFAULT_MAX_FORBIDDEN,
    DEFAULT_NUM_PRIMES,
    DEFAULT_PRIME_BITS,
    DEFAULT_SP1,
    DEFAULT_SP2,
    MAX_DEGREE,
    Flags,
    SearchArgs,
)
from .poly import BinaryForm, classify, is_squarefree, new_form, reverse_form, should_reverse
from .realroots import IntervalSet, intersect_domains, positivity_intervals
from .sieveprep import (
    PrimeSieveTable,
    build_prime_table,
    clamp_counts,
    forbidden_divisors,
    mod16_analysis,
    odd_primes_below,
    select_primes,
)

__all__ = [
    "Session",
    "find_points",
    "find_points_clear",
    "find_points_init",
    "find_points_work",
    "prepare",
]

log = logging.getLogger("hypersieve")

_TABLE_CACHE_LIMIT = 4096


class Session:
    """Working storage shared by consecutive searches."""

    def __init__(self, array_size: int = 0):
        self.array_size = array_size if array_size > 0 else DEFAULT_ARRAY_SIZE
        self.stats = SearchStats()
        self.searches = 0
        self._tables: dict[tuple, PrimeSieveTable] = {}
        self._open = True

    @property
    def is_open(self) -> bool:
        return self._open

    def table(self, F: BinaryForm, p: int) -> PrimeSieveTable:
        # the table only depends on the coefficients mod p
        key = (p, tuple(c % p for c in F.coeffs))
        t = self._tables.get(key)
        if t is None:
            if len(self._tables) >= _TABLE_CACHE_LIMIT:
                self._tables.clear()
            t = self._tables[key] = build_prime_table(F, p)
        return t

    def allocated_bytes(self) -> int:
        total = 0
        for t in self._tables.values():
            total += t.rows.nbytes + sum(w.nbytes for w in t._words.values())
        return total

    def close(self) -> None:
        if not self._open:
            raise SessionError("session already cleared")
        self._tables = {}
        self._open = False


def _normalized_domain(args: SearchArgs) -> IntervalSet:
    if len(args.domain) > MAX_DEGREE:
        raise BadArgsError(f"at most {MAX_DEGREE} intervals allowed, got {len(args.domain)}")
    if not args.domain:
        return IntervalSet.full()
    for lo, up in args.domain:
        if math.isnan(lo) or math.isnan(up) or lo > up:
            raise BadArgsError(f"bad interval [{lo}, {up}]")
    return IntervalSet.from_pairs(args.domain)


def prepare(session: Session, args: SearchArgs) -> SearchPlan:
    """Validate ``args`` and compute everything the engine needs.

    Sets or clears ``Flags.REVERSED`` in ``args.flags``.
    """
    coeffs = list(args.coefficients)
    degree = len(coeffs) - 1 if args.degree is None else args.degree
    if degree <= 0:
        raise BadArgsError(f"degree must be positive, got {degree}")
    if args.height <= 0:
        raise BadArgsError(f"height bound must be positive, got {args.height}")
    if len(coeffs) != degree + 1:
        raise BadArgsError(f"expected {degree + 1} coefficients, got {len(coeffs)}")
    F = new_form(coeffs)
    user_domain = _normalized_domain(args)

    flags = Flags(args.flags) & ~Flags.REVERSED
    verbose = bool(flags & Flags.VERBOSE)
    if args.sturm >= 0:
        if not is_squarefree(F):
            raise NonSquarefreeError("the polynomial is not squarefree")
    elif F.even_degree - F.degree_n > 1:
        raise NonSquarefreeError("the polynomial is not squarefree (two leading zero coefficients)")

    H = args.height
    b_low = args.b_low if args.b_low > 0 else 1
    b_high = min(args.b_high if args.b_high > 0 else H, H)

    # reversal swaps x and z, so it is only transparent for the default x- and z-ranges
    reversed_ = (
        not flags & Flags.NO_REVERSE
        and not args.domain
        and b_low == 1
        and b_high == H
        and should_reverse(F)
    )
    if reversed_:
        F = reverse_form(F)
        flags |= Flags.REVERSED
    args.flags = flags
    dclass = classify(F)
    if verbose:
        log.info("searching y^2 = F(x, z) with coefficients %s%s", list(F.coeffs), " (reversed)" if reversed_ else "")
        log.info("denominator class %s, denominators %d..%d, height %d", dclass.name, b_low, b_high, H)

    positive = positivity_intervals(F.poly(), args.sturm)
    domain = intersect_domains(user_domain, positive)
    if verbose:
        log.info("search domain %s", list(domain) or "empty")

    bits = args.prime_bits if 5 <= args.prime_bits <= 10 else DEFAULT_PRIME_BITS
    primes = odd_primes_below(1 << bits)
    num_primes = args.num_primes if args.num_primes >= 0 else DEFAULT_NUM_PRIMES
    sp2 = args.sp2 if args.sp2 >= 0 else DEFAULT_SP2
    sp1 = args.sp1 if args.sp1 >= 0 else DEFAULT_SP1
    max_forbidden = args.max_forbidden if args.max_forbidden >= 0 else DEFAULT_MAX_FORBIDDEN
    m, _, _ = clamp_counts(num_primes, sp2, sp1, len(primes))

    plan = SearchPlan(
        form=F,
        height=H,
        b_low=b_low,
        b_high=b_high,
        domain=domain,
        selection=select_primes([], 0, 0, 0),
        mod16=mod16_analysis(F),
        dclass=dclass,
        flags=flags,
        array_size=args.array_size if args.array_size > 0 else session.array_size,
        reversed=reversed_,
        pack_parity=args.pack_parity,
    )
    if not domain:
        return plan

    tables = [session.table(F, p) for p in primes[:m]]
    plan.obstructed = any(t.excludes_everything() for t in tables)
    plan.selection = select_primes(tables, num_primes, sp2, sp1, len(primes))
    plan.forbidden = forbidden_divisors(F, max_forbidden, primes)
    if verbose:
        sel = plan.selection
        log.info(
            "sieving primes %s (first %d in stage 1)%s",
            [t.p for t in sel.tables], sel.stage1, "; no p-adic points" if plan.obstructed else "",
        )
        if plan.forbidden:
            log.info("forbidden divisors %s", plan.forbidden)
    return plan


def find_points_init(args: SearchArgs) -> Session:
    return Session(args.array_size)


def find_points_work(session: Session, args: SearchArgs, callback: Callback, context=None) -> int:
    """Search on one curve; returns the sum of the callback's return values."""
    if not session.is_open:
        raise SessionError("session has been cleared")
    plan = prepare(session, args)
    session.stats = SearchStats()
    session.searches += 1
    return engine.search(plan, callback, context, session.stats)


def find_points_clear(session: Session) -> None:
    session.close()


def find_points(args: SearchArgs, callback: Callback, context=None) -> int:
    session = find_points_init(args)
    try:
        return find_points_work(session, args, callback, context)
    finally:
        find_points_clear(session)
