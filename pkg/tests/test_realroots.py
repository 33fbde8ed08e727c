import math
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from hypersieve.realroots import (
    IntervalSet,
    count_real_roots,
    intersect_domains,
    positivity_intervals,
    sign_changes,
    sturm_chain,
)

INF = math.inf
X = sympy.Symbol("x")


def value(f, x):
    return sum(c * x**i for i, c in enumerate(f))


def random_squarefree(rng, max_deg=10, bound=50):
    while True:
        d = rng.randint(1, max_deg)
        f = [rng.randint(-bound, bound) for _ in range(d)] + [rng.choice([c for c in range(-bound, bound + 1) if c])]
        p = sympy.Poly(list(reversed(f)), X)
        if d == 1 or sympy.discriminant(p) != 0:
            return f


def test_sturm_chain_examples():
    assert sturm_chain([-1, 0, 1]).polys == ((-1, 0, 1), (0, 2), (1,))
    assert sturm_chain([1, 0, 1]).polys == ((1, 0, 1), (0, 2), (-1,))
    assert sturm_chain([0, 0, 0, 1]).polys == ((0, 0, 0, 1), (0, 0, 3))


def test_sign_changes_examples():
    chain = sturm_chain([-1, 0, 1])
    assert sign_changes(chain, -INF) == 2
    assert sign_changes(chain, INF) == 0
    assert sign_changes(chain, 0) == 1


def test_count_real_roots_examples():
    assert count_real_roots(sturm_chain([-1, 0, 1]), -INF, INF) == 2
    assert count_real_roots(sturm_chain([1, 0, 1]), -INF, INF) == 0
    assert count_real_roots(sturm_chain([-1, 0, 1]), 0, INF) == 1
    # half-open: (-1, 1] contains only the root at 1
    assert count_real_roots(sturm_chain([-1, 0, 1]), -1, 1) == 1


@pytest.mark.parametrize(
    "f, roots",
    [
        ([-2, 0, 1], 2),
        ([1, 0, 0, 0, 1], 0),
        ([0, -1, 0, 1], 3),
        ([-6, 11, -6, 1], 3),  # (x-1)(x-2)(x-3)
        ([1, -2, 0, 1], 3),
        ([-1, 0, 0, 0, 1], 2),
        ([1, 1, 1], 0),
    ],
)
def test_count_roots_matches_sympy(f, roots):
    chain = sturm_chain(f)
    assert len(chain.polys) <= len(f)
    assert count_real_roots(chain, -INF, INF) == roots
    assert len(sympy.real_roots(sympy.Poly(list(reversed(f)), X))) == roots


def test_count_roots_random_against_sympy():
    rng = random.Random(5)
    for _ in range(40):
        f = random_squarefree(rng, max_deg=6, bound=20)
        roots = sympy.real_roots(sympy.Poly(list(reversed(f)), X))
        lo, up = Fraction(rng.randint(-30, 30), rng.randint(1, 7)), Fraction(rng.randint(-30, 30), rng.randint(1, 7))
        lo, up = min(lo, up), max(lo, up)
        inside = sum(1 for r in roots if lo < r <= up)
        assert count_real_roots(sturm_chain(f), lo, up) == inside


def test_positivity_examples():
    assert not positivity_intervals([-1, 0, -1], 32)
    assert not positivity_intervals([-1, 0, -1], 0)
    assert list(positivity_intervals([1, 0, 1], 5)) == [(-INF, INF)]
    assert list(positivity_intervals([-1, 0, -1], -1)) == [(-INF, INF)]
    dom = positivity_intervals([-1, 0, 1], 40)
    assert len(dom) == 2
    (l1, u1), (l2, u2) = dom
    assert l1 == -INF and u2 == INF
    assert -1 <= u1 < -1 + 1e-9 and 1 - 1e-9 < l2 <= 1


def test_positivity_constant_and_linear():
    assert list(positivity_intervals([5], 3)) == [(-INF, INF)]
    assert not positivity_intervals([-5], 3)
    dom = positivity_intervals([-3, 2], 20)  # 2x - 3 >= 0 for x >= 1.5
    assert dom.contains(Fraction(3, 2)) and dom.contains(10**9)
    assert not dom.contains(-1)


def test_positivity_soundness_random():
    rng = random.Random(11)
    for _ in range(500):
        f = random_squarefree(rng)
        doms = {S: positivity_intervals(f, S) for S in (0, 3, 10, 32)}
        for _ in range(20):
            x = Fraction(rng.randint(-10**4, 10**4), rng.randint(1, 10**3))
            if value(f, x) >= 0:
                for S, dom in doms.items():
                    assert dom.contains(x), (f, x, S)


def test_positivity_covers_exact_roots():
    rng = random.Random(13)
    for _ in range(60):
        f = random_squarefree(rng, max_deg=6, bound=30)
        dom = positivity_intervals(f, 32)
        poly = sympy.Poly(list(reversed(f)), X)
        # tiny rational isolating intervals: f >= 0 somewhere in each one
        for (lo, up), _ in poly.intervals(eps=Fraction(1, 10**18)):
            lo, up = Fraction(int(lo.p), int(lo.q)), Fraction(int(up.p), int(up.q))
            for x in (lo, up):
                if value(f, x) >= 0:
                    assert dom.contains(x), (f, x)


def test_positivity_monotone_in_depth():
    rng = random.Random(17)
    for _ in range(100):
        f = random_squarefree(rng, max_deg=8)
        prev = None
        for S in range(0, 40, 3):
            dom = positivity_intervals(f, S)
            finite = [(lo, up) for lo, up in dom]
            if prev is not None:
                # every interval of the finer cover lies inside the coarser one
                for lo, up in finite:
                    assert any(plo <= lo and up <= pup for plo, pup in prev)
            prev = finite


def test_outward_rounding():
    # roots +-sqrt(2) are irrational; the float ends must lie outside them
    dom = positivity_intervals([-2, 0, 1], 60)
    (l1, u1), (l2, u2) = dom
    assert u1 < 0 and Fraction(u1) ** 2 <= 2
    assert l2 > 0 and Fraction(l2) ** 2 <= 2


def test_interval_set_validation():
    with pytest.raises(ValueError):
        IntervalSet(((2.0, 1.0),))
    with pytest.raises(ValueError):
        IntervalSet(((0.0, 2.0), (1.0, 3.0)))
    s = IntervalSet.from_pairs([(3, 4), (0, 1), (0.5, 2)])
    assert list(s) == [(0.0, 2.0), (3.0, 4.0)]
    assert s.measure() == 3.0


def test_intersect_examples():
    full = IntervalSet.full()
    assert list(intersect_domains(full, IntervalSet(((1.0, 2.0),)))) == [(1.0, 2.0)]
    assert list(intersect_domains(IntervalSet(((0.0, 5.0),)), IntervalSet(((3.0, 9.0),)))) == [(3.0, 5.0)]
    assert not intersect_domains(IntervalSet(((0.0, 1.0),)), IntervalSet(((2.0, 3.0),)))


interval_lists = st.lists(
    st.tuples(st.integers(-50, 50), st.integers(0, 20)).map(lambda t: (float(t[0]), float(t[0] + t[1]))), max_size=6
)


@settings(max_examples=200)
@given(interval_lists, interval_lists, st.integers(-60, 80))
def test_intersection_membership(a, b, x):
    A, B = IntervalSet.from_pairs(a), IntervalSet.from_pairs(b)
    C = intersect_domains(A, B)
    assert C.contains(x) == (A.contains(x) and B.contains(x))
    assert C.contains(x + 0.5) == (A.contains(x + 0.5) and B.contains(x + 0.5))
