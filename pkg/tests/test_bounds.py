import random
from fractions import Fraction

import pytest

from d2dpc import bounds
from d2dpc.bounds import (
    _eq5_rhs,
    _eq6_rhs,
    _eq7_rhs,
    converse_k_user,
    converse_k_user_curve,
    converse_two_user,
    converse_two_user_corners,
    converse_two_user_curve,
    gap,
    scheme_a_within_three_of_shared_link,
    load_c_points,
    man_points,
    scheme_c_curve,
    shared_link_nonprivate_envelope,
    t2_first_segment,
)
from d2dpc.combinat import curve_max, even_grid
from d2dpc.scheme_a import scheme_a_curve
from d2dpc.scheme_b import scheme_b_curve


def test_two_user_at_half_library():
    assert converse_two_user(8, 4) == 8


def test_two_user_at_three_quarters():
    for N in (2, 3, 5, 8, 13):
        assert converse_two_user(N, Fraction(3 * N, 4)) == Fraction(1, 2)


def test_two_user_example_point():
    assert converse_two_user(2, Fraction(6, 5)) == Fraction(7, 5)


def test_two_user_domain():
    with pytest.raises(ValueError):
        converse_two_user(4, 1)
    with pytest.raises(ValueError):
        converse_two_user(4, 5)


def test_corner_formulas():
    for N in (2, 3, 4, 8, 11):
        curve = converse_two_user_corners(N)
        assert curve.corners[0] == (Fraction(N, 2), Fraction(N))
        assert curve.corners[-1] == (Fraction(N), 0)
        assert (Fraction(3 * N, 4), Fraction(1, 2)) in curve.corners
        if N >= 3:
            assert (Fraction(N + 1, 2), Fraction(N - 1, 2)) in curve.corners
            assert (Fraction(2 * N, 3), Fraction(1)) in curve.corners


def test_two_user_paths_agree():
    # three independent constructions: direct max, line envelope, corners
    rng = random.Random(13)
    for N in range(2, 13):
        corners = converse_two_user_corners(N)
        lines = converse_two_user_curve(N)
        for _ in range(100):
            M = Fraction(N, 2) + Fraction(rng.randrange(1001), 1000) * Fraction(N, 2)
            v = converse_two_user(N, M)
            assert corners(M) == v
            assert lines(M) == v


def test_two_user_non_increasing():
    for N in (2, 5, 9):
        vals = [converse_two_user(N, m) for m in even_grid(Fraction(N, 2), N, 200)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_k_user_values():
    assert converse_k_user(4, 8, 2) == 8
    assert converse_k_user(3, 6, 2) == 3
    # y = N/2 boundary: the bound vanishes
    assert converse_k_user(4, 8, 4) == 0
    # beyond the parametrised range the bound is trivially zero
    assert converse_k_user(3, 6, 5) == 0
    with pytest.raises(ValueError):
        converse_k_user(2, 8, 4)
    with pytest.raises(ValueError):
        converse_k_user(3, 6, 7)


def test_k_user_reduces_to_two_user_at_k2():
    # with the floor/ceiling prefactors equal to one, the general-K
    # expressions specialise exactly to the two-user ones
    for N in (2, 4, 7):
        for y_num in range(0, 2 * N + 1):
            y = Fraction(y_num, 4)
            if y > Fraction(N, 2):
                continue
            assert _eq6_rhs(N, y, 2) == 2 * (1 - 3 * y / N)
            assert _eq7_rhs(N, y, 2) == 2 * (Fraction(1, 2) - y / N)
            if N >= 3:
                for h in range(N - 2):
                    two = _eq5_rhs(N, y, h, 2)
                    gen = _eq5_rhs(N, y, h, 2)
                    assert two == gen


def test_k_user_curve_matches_pointwise():
    for K, N in [(3, 6), (4, 8), (5, 25)]:
        curve = converse_k_user_curve(K, N)
        for M in even_grid(Fraction(N, K), Fraction(N), 60):
            assert curve(M) == converse_k_user(K, N, M)


def test_shared_link_points():
    assert (4, Fraction(1, 2)) in man_points(2, 8)  # t = 1
    assert man_points(3, 5)[-1] == (5, 0)  # t = K
    env = shared_link_nonprivate_envelope(2, 8, Fraction(1, 2))
    assert env(4) == Fraction(1, 4)


def test_shared_link_low_memory_anchor_when_n_small():
    env = shared_link_nonprivate_envelope(8, 4, Fraction(1))
    assert env(0) == 4  # (0, N) joins the envelope for N < K
    # corner t=1 lies above the first chord, consistent with t2 = 2
    assert t2_first_segment(8, 4) == 2
    assert env(Fraction(1, 2)) < Fraction(8 - 1, 2)


def test_t2_value():
    assert t2_first_segment(4, 2) == 2


def test_scheme_c_points():
    pts = load_c_points(2, 8)
    assert pts[0] == (4, 8)  # corrected low-memory anchor (N/K, N)
    assert (Fraction(9, 2), 1) in pts  # t = 1 for K = 2
    assert pts[-1] == (8, 0)  # t = K
    alt = load_c_points(2, 8, low_memory_anchor="k-over-n")
    assert alt[0] == (Fraction(1, 4), 8)  # the printed reading, kept available


def test_scheme_c_general_t2_point():
    for N in (3, 6, 10):
        pts = load_c_points(2, N)
        assert (Fraction(N + 1, 2), 1) in pts


def test_gap_identical_curves():
    c = scheme_b_curve(4)
    report = gap(c, c)
    assert report.max_ratio == 1
    assert report.skipped == [Fraction(4)]  # the zero-load endpoint


def test_gap_two_user_optimal_cases():
    for N in (2, 3):
        report = gap(scheme_b_curve(N), converse_two_user_curve(N))
        assert report.max_ratio == 1


def test_gap_n8_value():
    report = gap(scheme_b_curve(8), converse_two_user_curve(8))
    assert report.max_ratio <= 3
    assert report.max_ratio == Fraction(6, 5)
    assert Fraction(9, 2) < report.argmax_m < 6


def test_scheme_a_within_three_of_shared_link():
    assert scheme_a_within_three_of_shared_link(3, 2)
    assert scheme_a_within_three_of_shared_link(10, 40)
    assert scheme_a_within_three_of_shared_link(2, 5) and scheme_a_within_three_of_shared_link(2, 17)
    assert scheme_a_within_three_of_shared_link(7, 13)


def test_coded_placement_gain_unbounded():
    # at M = (N+1)/2 the uncoded converse sits at (N-1)/2 while the
    # coded-placement curve reaches 1: the ratio grows linearly in N
    for N in (4, 8, 16, 32):
        M = Fraction(N + 1, 2)
        assert converse_two_user(N, M) == Fraction(N - 1, 2)
        assert scheme_c_curve(2, N)(M) == 1


def test_named_curve_registry():
    assert bounds.named_curve("schemeA", 3, 5).min_m == Fraction(5, 3)
    assert bounds.named_curve("conv2u", 2, 4)(2) == 4
    with pytest.raises(ValueError):
        bounds.named_curve("convKu", 4, 3)  # needs N >= K
    with pytest.raises(ValueError):
        bounds.named_curve("schemeB", 3, 4)
    with pytest.raises(ValueError):
        bounds.named_curve("nope", 2, 4)


def test_k_user_tighter_than_shared_link_at_small_memory():
    # at M = N/K the colluding converse reaches the full library size
    # while the uncoded shared-link curve starts much lower
    K, N = 10, 40
    ku = converse_k_user_curve(K, N)
    sl = shared_link_nonprivate_envelope(K, N, Fraction(1))
    assert ku(Fraction(N, K)) == N
    assert ku(Fraction(N, K)) > sl(Fraction(N, K))
    assert ku(5) > sl(5)


def test_curve_max_combines_converses():
    K, N = 4, 8
    combo = curve_max(
        converse_k_user_curve(K, N),
        shared_link_nonprivate_envelope(K, N, Fraction(1, 2)),
    )
    for M in even_grid(Fraction(N, K), N, 40):
        assert combo(M) == max(
            converse_k_user(K, N, M),
            shared_link_nonprivate_envelope(K, N, Fraction(1, 2))(M),
        )
