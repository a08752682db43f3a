"""Exact XOR-system solving for multicast decoding.

A receiver knows its cached subfiles and sees every broadcast message as
(composition header, payload).  Each message is one linear equation over
GF(2): the XOR of its unknown components equals the payload XOR the known
components.  Peeling resolves the single-unknown equations (the directly
useful messages); Gaussian elimination mops up the combinations that only
cancel across several messages, which is exactly how the leader-filtered
messages are reconstructed.  A subfile the receiver needs but that the
system does not determine is reported, never guessed.
"""

from __future__ import annotations


def solve_xor_system(equations: list[tuple[set, int]]) -> dict:
    """Solve XOR equations; return the uniquely determined variables.

    ``equations`` holds (set of variable keys, rhs payload int) pairs.
    Raises ValueError on an inconsistent system (some payload was
    corrupted), since 0 = nonzero has no solution.
    """
    var_ids: dict = {}
    for vars_, _ in equations:
        for v in vars_:
            if v not in var_ids:
                var_ids[v] = len(var_ids)
    names = list(var_ids)

    rows: list[tuple[int, int]] = []
    for vars_, rhs in equations:
        mask = 0
        for v in vars_:
            mask |= 1 << var_ids[v]
        rows.append((mask, rhs))

    # row-reduce with pivot = highest set bit
    pivots: dict[int, tuple[int, int]] = {}
    for mask, rhs in rows:
        while mask:
            top = mask.bit_length() - 1
            if top not in pivots:
                pivots[top] = (mask, rhs)
                break
            pmask, prhs = pivots[top]
            mask ^= pmask
            rhs ^= prhs
        else:
            if rhs:
                raise ValueError("inconsistent XOR system (corrupted payload?)")

    # back-substitute bottom-up: once a lower pivot row is fully reduced,
    # XORing it into a higher row removes that pivot bit for good (reduced
    # rows only carry their own pivot plus free variables)
    tops = sorted(pivots)
    for idx, top in enumerate(tops):
        mask, rhs = pivots[top]
        for lower in tops[:idx]:
            if (mask >> lower) & 1:
                lmask, lrhs = pivots[lower]
                mask ^= lmask
                rhs ^= lrhs
        pivots[top] = (mask, rhs)

    solved = {}
    for top, (mask, rhs) in pivots.items():
        if mask == (1 << top):
            solved[names[top]] = rhs
    return solved
