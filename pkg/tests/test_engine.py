import math
import random

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from hypersieve import Flags, SearchArgs, find_points
from hypersieve.api import Session, prepare
from hypersieve.engine import (
    RationalPoint,
    SearchStats,
    denominators,
    exact_check,
    infinity_points,
    search,
    sieve_denominator,
)
from hypersieve.poly import DenominatorClass, classify, is_squarefree, new_form
from hypersieve.sieveprep import mod16_analysis
from oracle import brute_force_points, collect, form_value


def plan_for(coeffs, H, **kw):
    return prepare(Session(), SearchArgs(list(coeffs), H, **kw))


def run(coeffs, H, **kw):
    return collect(find_points, SearchArgs(list(coeffs), H, **kw))


def random_curve(rng, max_deg=10, bound=50):
    while True:
        d = rng.randint(2, max_deg)
        c = [rng.randint(-bound, bound) for _ in range(d)] + [rng.choice([v for v in range(-bound, bound + 1) if v])]
        if is_squarefree(new_form(c)):
            return c


def test_exact_check_examples():
    F = new_form([0, -2, 0, 1])
    assert exact_check(F, -1, 1) == [RationalPoint(-1, 1, 1), RationalPoint(-1, -1, 1)]
    assert exact_check(F, 0, 1) == [RationalPoint(0, 0, 1)]
    assert exact_check(F, 2, 4) == []
    assert exact_check(F, 1, 1) == []
    assert exact_check(F, -1, 1, Flags.NO_Y) == [RationalPoint(-1, 1, 1)]
    assert exact_check(F, 1, 1, Flags.NO_CHECK) == [RationalPoint(1, 0, 1)]


def test_infinity_points_examples():
    assert infinity_points(new_form([0, -2, 0, 1])) == [RationalPoint(1, 0, 0)]
    assert infinity_points(new_form([1, 0, 1, 0, 0, 0, 1])) == [RationalPoint(1, 1, 0), RationalPoint(1, -1, 0)]
    assert infinity_points(new_form([1, 0, 0, 0, 3])) == []
    assert infinity_points(new_form([0, -2, 0, 1]), Flags.NO_INFINITY) == []
    assert infinity_points(new_form([1, 0, 4]), Flags.NO_Y) == [RationalPoint(1, 2, 0)]


def test_denominators_odd_monic():
    m16 = mod16_analysis(new_form([0, -2, 0, 1]))
    assert list(denominators(1, 10, DenominatorClass.ODD_MONIC, 1, (), m16)) == [1, 4, 9]


def test_denominators_odd_general():
    # lc = 6: b = d * e^2 with d in {1, 2, 3, 6}
    F = new_form([1, 0, 0, 6])
    got = list(denominators(1, 60, DenominatorClass.ODD_GENERAL, 6, (), None))
    expect = sorted({d * e * e for d in (1, 2, 3, 6) for e in range(1, 8) if d * e * e <= 60})
    assert got == expect
    assert classify(F) is DenominatorClass.ODD_GENERAL


def test_denominators_forbidden_and_jacobi():
    F = new_form([1, 0, 0, 0, 3])
    plan = plan_for([1, 0, 0, 0, 3], 500)
    assert 5 in plan.forbidden
    got = list(denominators(1, 500, plan.dclass, F.leading, plan.forbidden, plan.mod16))
    assert all(b % 5 for b in got)
    assert all(b % 9 for b in got)
    # Jacobi filter: the part of b coprime to 6 must have (3 / b') != -1
    no_jac = list(denominators(1, 500, plan.dclass, F.leading, plan.forbidden, plan.mod16, use_jacobi=False))
    assert set(got) <= set(no_jac)


def test_denominators_mod16_skips_rows():
    F = new_form([2, 0, 0, 0, 1])
    m16 = mod16_analysis(F)
    got = list(denominators(1, 200, DenominatorClass.EVEN_GENERAL, 1, (), m16))
    dead = {r for r in range(16) if not m16.allowed[r]}
    assert 1 in dead
    assert got == [b for b in range(1, 201) if b % 16 not in dead]


@pytest.mark.parametrize(
    "coeffs",
    [[1, 0, 0, 0, 3], [1, 0, 0, 6], [-2, 0, 1, 0, 5], [4, 0, 0, -1, 6], [1, 1, 0, 0, 7], [2, 0, 0, 0, 0, 3]],
)
def test_denominator_filters_are_conservative(coeffs):
    H = 150
    plan = plan_for(coeffs, H, flags=Flags.NO_REVERSE)
    dens = set(denominators(1, H, plan.dclass, plan.form.leading, plan.forbidden, plan.mod16))
    for x, y, z in brute_force_points(coeffs, H, with_infinity=False):
        assert z in dens, (x, y, z)


def test_sieve_without_primes_keeps_mod16_residues():
    coeffs = [3, 1, 0, 0, 0, 0, 1]
    plan = plan_for(coeffs, 50, sp1=0, sp2=0, flags=Flags.NO_REVERSE)
    for b in (1, 2, 3, 7):
        got = sieve_denominator(b, plan)
        m = plan.mod16.allowed[b % 16]
        assert got == [a for a in range(-50, 51) if m >> (a % 16) & 1]


def test_sieve_keeps_true_points_small_example():
    plan = plan_for([0, -2, 0, 1], 2)
    assert {-1, 0, 2} <= set(sieve_denominator(1, plan))


def test_sieve_with_absorbing_zero_row():
    coeffs = [-3, -3, 0, 1, 3]  # no points mod 5
    plan = plan_for(coeffs, 100)
    assert plan.obstructed
    pts, total = run(coeffs, 100)
    assert pts == [] and total == 0


@pytest.mark.parametrize("coeffs", [[3, 1, 0, 0, 0, 0, 1], [0, -2, 0, 1], [1, 0, 0, 0, 3], [-7, 0, 2, 0, 1, 0, 4]])
def test_sieve_soundness(coeffs):
    H = 80
    plan = plan_for(coeffs, H, flags=Flags.NO_REVERSE)
    by_b = {}
    for x, y, z in brute_force_points(coeffs, H, with_infinity=False):
        by_b.setdefault(z, set()).add(x)
    for b, xs in by_b.items():
        assert xs <= set(sieve_denominator(b, plan))


def test_search_negative_definite():
    plan = plan_for([-1, 0, 0, 0, -1], 10**6)
    stats = SearchStats()
    calls = []
    total = search(plan, lambda *a: calls.append(a) or 1, None, stats)
    assert total == 0 and not calls and stats.denominators == 0


def test_search_small_example():
    pts, total = run([0, -2, 0, 1], 2)
    assert total == 6
    assert pts == sorted([(1, 0, 0), (0, 0, 1), (-1, 1, 1), (-1, -1, 1), (2, 2, 1), (2, -2, 1)])


def test_callback_weights_and_context():
    seen = []

    def cb(x, z, y, ctx, quit_flag):
        seen.append(ctx)
        return 3

    assert find_points(SearchArgs([0, -2, 0, 1], 2), cb, "ctx") == 18
    assert seen == ["ctx"] * 6


def test_quit_stops_immediately():
    calls = []

    def cb(x, z, y, ctx, quit_flag):
        calls.append((x, y, z))
        quit_flag.set()
        return 5

    assert find_points(SearchArgs([0, -2, 0, 1], 100), cb) == 5
    assert len(calls) == 1


def test_quit_after_several_points():
    calls = []

    def cb(x, z, y, ctx, quit_flag):
        calls.append((x, y, z))
        if len(calls) == 4:
            quit_flag.set()
        return 1

    assert find_points(SearchArgs([1, 0, 0, 0, 0, 0, 1], 100, flags=Flags.NO_REVERSE), cb) == 4
    assert len(calls) == 4


def test_infinity_first_then_denominator_order():
    calls = []
    find_points(SearchArgs([1, 2, 3, 0, 1], 60), lambda x, z, y, c, q: calls.append((x, y, z)) or 1)
    assert calls[0][2] == 0
    zs = [z for _, _, z in calls[1:]]
    assert zs == sorted(zs)
    for i in range(len(calls) - 1):
        x, y, z = calls[i]
        if y > 0 and z:
            assert calls[i + 1] == (x, -y, z)


def test_random_curves_match_oracle():
    rng = random.Random(2024)
    for _ in range(40):
        c = random_curve(rng)
        pts, _ = run(c, 60)
        assert pts == brute_force_points(c, 60), c


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(
    st.lists(st.integers(-12, 12), min_size=3, max_size=8).filter(lambda c: c[-1] != 0),
    st.integers(1, 40),
    st.integers(1, 8),
    st.integers(0, 12),
    st.integers(1, 3000),
)
def test_parameters_do_not_change_points(coeffs, H, sp1, sp2, array_size):
    if not is_squarefree(new_form(coeffs)):
        return
    expect = brute_force_points(coeffs, H)
    pts, _ = run(coeffs, H, sp1=sp1, sp2=sp2, array_size=array_size)
    assert pts == expect
    pts, _ = run(coeffs, H, sp1=sp1, sp2=sp2, pack_parity=False, flags=Flags.NO_REVERSE | Flags.NO_JACOBI)
    assert pts == expect


def test_prime_bound_parameter():
    c = [3, 1, 0, 0, 0, 0, 1]
    expect = brute_force_points(c, 50)
    for bits in (5, 8, 10):
        assert run(c, 50, prime_bits=bits)[0] == expect


def test_no_y_and_no_check_modes():
    c = [1, 0, 0, 0, 0, 0, 1]
    H = 60
    xs = sorted({(x, z) for x, y, z in brute_force_points(c, H)})
    pts, _ = run(c, H, flags=Flags.NO_Y)
    assert sorted((x, z) for x, y, z in pts) == xs
    assert all(y >= 0 for _, y, _ in pts)
    cands, _ = run(c, H, flags=Flags.NO_CHECK)
    assert all(y == 0 for _, y, _ in cands)
    assert set(xs) <= {(x, z) for x, _, z in cands}
    assert all(math.gcd(x, z) == 1 for x, _, z in cands)


def test_no_infinity_flag():
    pts, _ = run([0, -2, 0, 1], 5, flags=Flags.NO_INFINITY)
    assert all(z for _, _, z in pts)
    # after reversal the point (0 : 0 : 1) of x^4 + x ... stays; infinity of the original is dropped
    pts, _ = run([0, 1, 0, 0, 1], 20, flags=Flags.NO_INFINITY)
    assert pts == brute_force_points([0, 1, 0, 0, 1], 20, with_infinity=False)


def test_user_domain_and_denominator_range():
    c = [1, 0, 0, 0, 0, 0, 1]
    H = 50
    every = brute_force_points(c, H)

    def in_domain(x, z):
        return -z <= 2 * x <= z or 2 * z <= x <= 3 * z

    pts, _ = run(c, H, domain=[(-0.5, 0.5), (2.0, 3.0)])
    # points at infinity do not depend on the x-domain
    assert pts == sorted(p for p in every if p[2] == 0 or in_domain(p[0], p[2]))
    pts, _ = run(c, H, b_low=3, b_high=9)
    assert pts == brute_force_points(c, H, b_range=(3, 9))


def test_large_height_planted_point():
    # F(a0, 11) is a square by construction, with a0 far beyond a machine-word sieve of small H
    a0, b0 = 45678901, 11
    base = 3 * a0**4 + a0 * b0**3
    y = math.isqrt(base) + 1
    while (y * y - base) % b0**4:
        y += 1
    coeffs = [(y * y - base) // b0**4, 1, 0, 0, 3]
    pts, _ = run(coeffs, 60_000_000, b_high=12)
    assert (a0, y, b0) in pts and (a0, -y, b0) in pts
    for x, yy, z in pts:
        assert yy * yy == form_value(coeffs, x, z)


def test_reversed_search_reports_infinity_first():
    # x^4 + x is searched as the odd monic x^3 + 1; its infinity points still come first
    calls = []
    args = SearchArgs([0, 1, 0, 0, 1], 30)
    find_points(args, lambda x, z, y, c, q: calls.append((x, y, z)) or 1)
    assert args.flags & Flags.REVERSED
    assert calls[:2] == [(1, 1, 0), (1, -1, 0)]
    assert sorted(calls) == brute_force_points([0, 1, 0, 0, 1], 30)
