import random
from fractions import Fraction

import pytest

from d2dpc.combinat import (
    Line,
    binom,
    curve_max,
    enumerate_permutations,
    lex_subsets,
    lower_convex_envelope,
    uniform_permutation,
    upper_envelope_of_lines,
)
from d2dpc.core import seeded_rng


def test_binom_basic():
    assert binom(4, 2) == 6


def test_binom_zero_convention():
    # out-of-range binomials are zero by convention, the load formulas
    # rely on this at the edges
    assert binom(2, 3) == 0
    assert binom(-1, 0) == 0
    assert binom(3, -1) == 0


def test_lex_subsets():
    assert lex_subsets([1, 2, 3], 2) == [(1, 2), (1, 3), (2, 3)]
    assert lex_subsets([2, 3, 4, 5], 1) == [(2,), (3,), (4,), (5,)]
    assert lex_subsets([1, 2, 3, 4], 0) == [()]
    assert lex_subsets([3, 1, 2], 2) == [(1, 2), (1, 3), (2, 3)]  # ground sorted


def test_lex_subsets_count_matches_binom():
    rng = random.Random(0)
    for _ in range(50):
        n = rng.randint(0, 12)
        ground = rng.sample(range(1, 40), n)
        k = rng.randint(0, n)
        assert len(lex_subsets(ground, k)) == binom(n, k)


def test_uniform_permutation_n1():
    assert uniform_permutation(1, seeded_rng(0, "x")) == [1]


def test_uniform_permutation_deterministic():
    assert uniform_permutation(6, seeded_rng(4, "p")) == uniform_permutation(
        6, seeded_rng(4, "p")
    )


def test_uniform_permutation_chi_square():
    # 6*10^4 samples of S_3: every permutation within 3 sigma of 1/6
    from collections import Counter

    stream = seeded_rng(12, "chi")
    counts = Counter(tuple(uniform_permutation(3, stream)) for _ in range(60_000))
    assert len(counts) == 6
    sigma = (60_000 * (1 / 6) * (5 / 6)) ** 0.5
    for c in counts.values():
        assert abs(c - 10_000) <= 3 * sigma


def test_enumerate_permutations():
    assert enumerate_permutations(2) == [(1, 2), (2, 1)]
    perms = enumerate_permutations(3)
    assert len(perms) == 6
    assert perms == sorted(perms)  # lexicographic


def test_enumerate_permutations_cap():
    with pytest.raises(ValueError, match="too large for exact mode"):
        enumerate_permutations(8, cap=10_000)


def test_envelope_drops_point_above_chord():
    env = lower_convex_envelope([(1, 2), (2, 0), (Fraction(3, 2), 3)])
    assert env.corners == ((1, 2), (2, 0))


def test_envelope_single_point():
    env = lower_convex_envelope([(Fraction(3, 2), Fraction(1, 2))])
    assert env(Fraction(3, 2)) == Fraction(1, 2)
    with pytest.raises(ValueError):
        env(2)


def test_envelope_memory_sharing_value():
    # two-user, three-file instance: chord between (2, 1) and (5/2, 1/3)
    # evaluates to 2/3 at M = 9/4
    from d2dpc.scheme_a import scheme_a_curve

    curve = scheme_a_curve(2, 3)
    assert curve(Fraction(9, 4)) == Fraction(2, 3)


def test_envelope_below_inputs_and_convex():
    rng = random.Random(7)
    for _ in range(30):
        pts = [
            (Fraction(rng.randint(0, 40), rng.randint(1, 8)),
             Fraction(rng.randint(0, 40), rng.randint(1, 8)))
            for _ in range(rng.randint(1, 12))
        ]
        # make the cloud non-increasing-feasible by sorting loads downward
        pts = sorted(pts)
        ms = [m for m, _ in pts]
        rs = sorted((r for _, r in pts), reverse=True)
        pts = list(zip(ms, rs))
        env = lower_convex_envelope(pts)
        for m, r in pts:
            assert env(m) <= r
        slopes = [
            (r1 - r0) / (m1 - m0)
            for (m0, r0), (m1, r1) in zip(env.corners, env.corners[1:])
        ]
        assert all(s0 <= s1 for s0, s1 in zip(slopes, slopes[1:]))


def test_envelope_merges_collinear():
    env = lower_convex_envelope([(0, 4), (1, 3), (2, 2), (4, 0)])
    assert env.corners == ((0, 4), (4, 0))


def test_upper_envelope_of_lines():
    lines = [Line(Fraction(0), Fraction(1), "flat"), Line(Fraction(-1), Fraction(3), "steep")]
    curve = upper_envelope_of_lines(lines, 0, 4)
    assert curve(0) == 3
    assert curve(2) == 1
    assert curve(4) == 1
    assert (Fraction(2), Fraction(1)) in curve.corners


def test_curve_max():
    a = lower_convex_envelope([(0, 4), (4, 0)])
    b = lower_convex_envelope([(0, 2), (4, 2)])
    m = curve_max(a, b)
    assert m(0) == 4
    assert m(2) == 2
    assert m(3) == 2
    assert m(1) == 3
    assert (Fraction(2), Fraction(2)) in m.corners
