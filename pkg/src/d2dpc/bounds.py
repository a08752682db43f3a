"""Closed-form converse and reference-achievability evaluators.

Every bound here is a maximum of finitely many expressions that are
linear in the memory M, so the piecewise curves are assembled exactly as
upper envelopes of rational lines.  Loads are clamped at zero: the
formulas go negative where a segment stops being active.

Two independent code paths exist for the two-user converse (direct
formula maximisation, and the closed-form corner list); they are checked
against each other rather than trusting either alone.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

from .combinat import (
    Line,
    TradeoffCurve,
    binom,
    curve_max,  # noqa: F401  (re-exported: combined-converse assembly)
    even_grid,
    line_through,
    lower_convex_envelope,
    upper_envelope_of_lines,
)
from .core import Rat
from .scheme_a import load_a_upper, scheme_a_curve, scheme_a_points  # noqa: F401
from .scheme_b import scheme_b_curve, scheme_b_points  # noqa: F401


@dataclass(frozen=True)
class BoundPoint:
    M: Rat
    R_lower: Rat
    provenance: str


def curve_bound_points(curve: TradeoffCurve) -> list[BoundPoint]:
    tags = curve.provenance or ("",) * len(curve.corners)
    return [BoundPoint(m, r, tag) for (m, r), tag in zip(curve.corners, tags)]


# ---------------------------------------------------------------------------
# two-user converse (uncoded placement)
# ---------------------------------------------------------------------------


def _eq5_rhs(N: int, y: Rat, h: int, K: int) -> Rat:
    """First converse family, general-K form; active for 2N/K >= 3."""
    Kh = Fraction(K, 2)
    return (
        N
        - 2 * y
        - Fraction(4 * y + (N - Kh) * h, h + 2)
        + (h * h * (N - Kh) - N * (Fraction(2 * N, K) - 3) + h * (N + Kh))
        * 2
        * y
        / ((h + 1) * (h + 2) * N)
    )


def _eq6_rhs(N: int, y: Rat, K: int) -> Rat:
    return K * (1 - Fraction(3, 1) * y / N)


def _eq7_rhs(N: int, y: Rat, K: int) -> Rat:
    return K * (Fraction(1, 2) - y / N)


def _two_user_y(N: int, M) -> Rat:
    y = Fraction(M) - Fraction(N, 2)
    if not 0 <= y <= Fraction(N, 2):
        raise ValueError(f"M={M} outside [{Fraction(N, 2)}, {N}] for N={N}")
    return y


def converse_two_user(N: int, M) -> Rat:
    """Lower bound on the two-user optimal load at memory M, exact."""
    if N < 2:
        raise ValueError("need N >= 2")
    y = _two_user_y(N, M)
    cands = [_eq6_rhs(N, y, 2), _eq7_rhs(N, y, 2)]
    if N >= 3:
        cands.extend(_eq5_rhs(N, y, h, 2) for h in range(N - 2))
    return max(Fraction(0), max(cands))


def _two_user_lines(N: int) -> list[Line]:
    lo, hi = Fraction(N, 2), Fraction(N)
    lines = [Line(Fraction(0), Fraction(0), "clamp-zero")]

    def add(f, tag):
        lines.append(
            line_through(lo, f(N, Fraction(0), 2), hi, f(N, Fraction(N, 2), 2), tag)
        )

    add(_eq6_rhs, "two-user-eq6")
    add(_eq7_rhs, "two-user-eq7")
    if N >= 3:
        for h in range(N - 2):
            lines.append(
                line_through(
                    lo,
                    _eq5_rhs(N, Fraction(0), h, 2),
                    hi,
                    _eq5_rhs(N, Fraction(N, 2), h, 2),
                    f"two-user-eq5(h={h})",
                )
            )
    return lines


def converse_two_user_curve(N: int) -> TradeoffCurve:
    """The two-user converse as a piecewise curve on [N/2, N]."""
    return upper_envelope_of_lines(_two_user_lines(N), Fraction(N, 2), Fraction(N))


def converse_two_user_corners(N: int) -> TradeoffCurve:
    """Independent corner-formula construction of the same curve."""
    corners: list[tuple[Rat, Rat]] = [(Fraction(N, 2), Fraction(N))]
    tags = ["two-user-eq5(h=0)" if N >= 3 else "two-user-eq6"]
    for hp in range(1, N - 1):
        M = Fraction(N, 2) + Fraction(N * hp, 2 * (N + 2 * hp - 2))
        R = Fraction((hp - 1) * (N + hp) + (N - 1) * N, (hp + 1) * (N + 2 * hp - 2))
        corners.append((M, R))
        tags.append(f"two-user-eq5(h={hp})")
    corners.append((Fraction(3 * N, 4), Fraction(1, 2)))
    tags.append("two-user-eq7")
    corners.append((Fraction(N), Fraction(0)))
    tags.append("two-user-eq7")
    return TradeoffCurve(corners=tuple(corners), provenance=tuple(tags))


# ---------------------------------------------------------------------------
# K-user converse (uncoded placement, colluding users)
# ---------------------------------------------------------------------------


def _k_user_prefactor(K: int) -> Rat:
    return Fraction(K // 2, (K + 1) // 2)


def _k_user_y(K: int, N: int, M) -> Rat:
    return (K * Fraction(M) - N) / 2


def converse_k_user(K: int, N: int, M) -> Rat:
    """K-user colluding converse at memory M.

    The bound's parametrisation covers M in [N/K, 2N/K] (where it reaches
    exactly zero); for larger M up to N it returns the trivial 0.
    """
    if not N >= K >= 3:
        raise ValueError("need N >= K >= 3")
    y = _k_user_y(K, N, M)
    if y < 0 or Fraction(M) > N:
        raise ValueError(f"M={M} outside [{Fraction(N, K)}, {N}]")
    if y > Fraction(N, 2):
        return Fraction(0)
    pre = _k_user_prefactor(K)
    pre2 = Fraction((2 * N) // K) / Fraction(2 * N, K)
    cands = [pre * _eq6_rhs(N, y, K), pre * _eq7_rhs(N, y, K)]
    if Fraction(N, K) >= Fraction(3, 2):
        cands.extend(
            pre * pre2 * _eq5_rhs(N, y, h, K) for h in range((2 * N) // K - 2)
        )
    return max(Fraction(0), max(cands))


def converse_k_user_curve(K: int, N: int) -> TradeoffCurve:
    """Piecewise K-user converse on [N/K, N] (flat zero past 2N/K)."""
    if not N >= K >= 3:
        raise ValueError("need N >= K >= 3")
    lo, hi = Fraction(N, K), Fraction(2 * N, K)
    pre = _k_user_prefactor(K)
    pre2 = Fraction((2 * N) // K) / Fraction(2 * N, K)
    lines = [Line(Fraction(0), Fraction(0), "clamp-zero")]

    def y_of(M):
        return _k_user_y(K, N, M)

    def add(f, scale, tag):
        lines.append(line_through(lo, scale * f(N, y_of(lo), K), hi, scale * f(N, y_of(hi), K), tag))

    add(_eq6_rhs, pre, "k-user-eq10")
    add(_eq7_rhs, pre, "k-user-eq11")
    if Fraction(N, K) >= Fraction(3, 2):
        for h in range((2 * N) // K - 2):
            add(lambda n, y, k, h=h: _eq5_rhs(n, y, h, k), pre * pre2, f"k-user-eq9(h={h})")
    curve = upper_envelope_of_lines(lines, lo, hi)
    corners = list(curve.corners)
    tags = list(curve.provenance)
    if corners[-1][1] != 0:
        raise AssertionError("K-user converse should vanish at M = 2N/K")
    if hi < N:
        corners.append((Fraction(N), Fraction(0)))
        tags.append("clamp-zero")
    return TradeoffCurve(corners=tuple(corners), provenance=tuple(tags))


# ---------------------------------------------------------------------------
# non-private shared-link reference curves
# ---------------------------------------------------------------------------


def man_points(K: int, N: int) -> list[tuple[Rat, Rat]]:
    return [(Fraction(N * t, K), Fraction(K - t, t + 1)) for t in range(K + 1)]


def shared_link_nonprivate_envelope(K: int, N: int, factor: Rat = Fraction(1)) -> TradeoffCurve:
    """Envelope of the shared-link corner points, loads scaled by ``factor``.

    factor 1 is the uncoded-placement converse; 1/2 (N >= K) and 1/4
    (N < K, where the point (0, N) joins the envelope) are the
    order-optimality scalings that make it a valid general converse.
    """
    factor = Fraction(factor)
    pts = man_points(K, N)
    tags = [f"shared-link-nonprivate(t={t})" for t in range(K + 1)]
    if N < K:
        pts.append((Fraction(0), Fraction(N)))
        tags.append("shared-link-nonprivate(M=0)")
    if factor != 1:
        pts = [(m, r * factor) for m, r in pts]
        tags = ["scaled-by-factor:" + tg for tg in tags]
    return lower_convex_envelope(pts, provenance=tags)


def t2_first_segment(K: int, N: int) -> int:
    """Largest corner index governing the first envelope segment, N < K."""
    return (2 * K - N + 1) // (N + 1)


# ---------------------------------------------------------------------------
# coded-placement reference points ("scheme C")
# ---------------------------------------------------------------------------


def load_c_points(K: int, N: int, low_memory_anchor: str = "n-over-k") -> list[tuple[Rat, Rat]]:
    """Corner points of the low-subpacketization coded-placement scheme.

    The printed low-memory anchor reads (K/N, N); dimensional consistency
    with every other curve says (N/K, N).  Both readings are available;
    the default is (N/K, N), flagged as the suspected-typo correction.
    """
    if low_memory_anchor == "n-over-k":
        anchor = (Fraction(N, K), Fraction(N))
    elif low_memory_anchor == "k-over-n":
        anchor = (Fraction(K, N), Fraction(N))
    else:
        raise ValueError("anchor must be 'n-over-k' or 'k-over-n'")
    pts = [anchor]
    for t in range(1, K + 1):
        M = Fraction(t * (N - 1), K) + 1
        R = Fraction(binom(K - 1, t) - binom(K - 1 - N, t), binom(K - 1, t - 1))
        pts.append((M, R))
    return pts


def scheme_c_curve(K: int, N: int, low_memory_anchor: str = "n-over-k") -> TradeoffCurve:
    pts = load_c_points(K, N, low_memory_anchor)
    tags = ["schemeC(anchor)"] + [f"schemeC(t={t})" for t in range(1, K + 1)]
    return lower_convex_envelope(pts, provenance=tags)


# ---------------------------------------------------------------------------
# multiplicative gap
# ---------------------------------------------------------------------------


@dataclass
class GapReport:
    max_ratio: Rat
    argmax_m: Rat
    skipped: list[Rat]
    grid_size: int


def default_gap_grid(achievable: TradeoffCurve, converse: TradeoffCurve, density: int = 64) -> list[Rat]:
    """Corner M values of both curves plus evenly spaced fill-in points.

    Ratio extrema of two piecewise-linear curves sit at corner points of
    one of them; the even grid is pure cross-checking redundancy.
    """
    lo = max(achievable.min_m, converse.min_m)
    hi = min(achievable.max_m, converse.max_m)
    if lo >= hi:
        raise ValueError("curve domains do not overlap")
    ms = {m for m in achievable.corner_ms() + converse.corner_ms() if lo <= m <= hi}
    ms.update(even_grid(lo, hi, density))
    ms.update((lo, hi))
    return sorted(ms)


def gap(achievable: TradeoffCurve, converse: TradeoffCurve, grid=None) -> GapReport:
    """Max of achievable(M)/converse(M) over the grid, exact rationals."""
    if grid is None:
        grid = default_gap_grid(achievable, converse)
    best: Rat = Fraction(0)
    argmax = None
    skipped = []
    for M in grid:
        c = converse(M)
        if c == 0:
            skipped.append(Fraction(M))
            continue
        ratio = achievable(M) / c
        if ratio > best:
            best, argmax = ratio, Fraction(M)
    if argmax is None:
        raise ValueError("converse was zero on the whole grid")
    if skipped:
        warnings.warn(f"gap grid skipped zero-converse points at M={skipped}")
    return GapReport(max_ratio=best, argmax_m=argmax, skipped=skipped, grid_size=len(grid))


CURVE_NAMES = (
    "schemeA",
    "schemeB",
    "schemeC",
    "conv2u",
    "convKu",
    "sharedlink",
    "sharedlink-uncoded",
)


def named_curve(which: str, K: int, N: int) -> TradeoffCurve:
    """Curve registry behind the command-line surface."""
    if which == "schemeA":
        return scheme_a_curve(K, N)
    if which == "schemeB":
        if K != 2:
            raise ValueError("schemeB curve is defined for K = 2")
        return scheme_b_curve(N)
    if which == "schemeC":
        return scheme_c_curve(K, N)
    if which == "conv2u":
        if K != 2:
            raise ValueError("conv2u is defined for K = 2")
        return converse_two_user_curve(N)
    if which == "convKu":
        if not N >= K >= 3:
            raise ValueError("convKu needs N >= K >= 3")
        return converse_k_user_curve(K, N)
    if which == "sharedlink":
        factor = Fraction(1, 2) if N >= K else Fraction(1, 4)
        return shared_link_nonprivate_envelope(K, N, factor)
    if which == "sharedlink-uncoded":
        return shared_link_nonprivate_envelope(K, N, Fraction(1))
    raise ValueError(f"unknown curve {which!r}; choose from {CURVE_NAMES}")


def scheme_a_within_three_of_shared_link(K: int, N: int) -> bool:
    """The envelope of the simple per-point upper bound (U-t+1)/t stays
    within 3x the shared-link corner loads at every M = N t / K,
    t in [2..K]; this is the bridge behind the constant-factor claims."""
    U = (K - 1) * N
    pts = [(Fraction(N + t1 - 1, K), load_a_upper(K, N, t1)) for t1 in range(1, U + 2)]
    env = lower_convex_envelope(pts)
    for t in range(2, K + 1):
        M = Fraction(N * t, K)
        if env(M) > 3 * Fraction(K - t, t + 1):
            return False
    return True
