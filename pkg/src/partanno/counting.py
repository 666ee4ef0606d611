"""Exact completion counting for partially annotated structures.

``count_completions`` returns the number of valid labelings that agree
with a partial annotation, dispatching to a family-specific counter:
linear-extension counting for chains, a falling-factorial closed form for
assignments, a left-to-right transition DP for BIO sequences, and direct
formulas for the unconstrained and uniform-label families.

``brute_force_count`` is an independent enumeration oracle used by the
test suite; it shares nothing with the fast counters beyond the validity
and consistency predicates.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import product

from .families import (
    Assignment,
    Bio,
    Chain,
    PartialAnnotation,
    Unconstrained,
    UniformLabel,
    bio_follows,
    chain_edges,
    consistent,
    is_valid,
)

BRUTE_FORCE_CAP = 10_000_000

# Above this item count the downset bitmask table (2^n entries) stops
# being the fast path and we fall back to memoized source-removal search.
BITMASK_LIMIT = 20


class CapacityError(ValueError):
    """Raised when a brute-force enumeration would exceed the size guard."""


def _check_partial(family, partial):
    values = partial.values if isinstance(partial, PartialAnnotation) else tuple(partial)
    if len(values) != family.size:
        raise ValueError(
            f"partial annotation has length {len(values)}, family size is {family.size}"
        )
    for v in values:
        if v is not None and not (0 <= v < family.label_count):
            raise ValueError(f"label {v} out of range [0, {family.label_count})")
    return values


def count_completions(family, partial):
    """Exact number of valid labelings consistent with ``partial``.

    Returns 0 (not an error) when the partial annotation admits no valid
    completion.  The result is an arbitrary-precision int.
    """
    values = _check_partial(family, partial)
    if isinstance(family, Chain):
        pred = [0] * family.n
        for u, v in chain_edges(family, values):
            pred[v] |= 1 << u
        return _count_extensions_pred(family.n, pred)
    if isinstance(family, Assignment):
        labeled = [v for v in values if v is not None]
        if len(set(labeled)) != len(labeled):
            return 0
        k = len(labeled)
        return math.factorial(family.d_prime - k) // math.factorial(
            family.d_prime - family.d
        )
    if isinstance(family, Bio):
        return count_bio_completions(family.d, family.t, values)
    if isinstance(family, Unconstrained):
        k = sum(v is not None for v in values)
        return family.labels ** (family.d - k)
    if isinstance(family, UniformLabel):
        labeled = set(v for v in values if v is not None)
        if not labeled:
            return family.labels
        return 1 if len(labeled) == 1 else 0
    raise TypeError(f"unknown family {family!r}")


def count_linear_extensions(n, edges):
    """Number of total orders of 0..n-1 consistent with ``edges``.

    ``edges`` is an iterable of (before, after) pairs.  A cyclic edge set
    has no extension and yields 0.
    """
    pred = [0] * n
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range for {n} items")
        pred[v] |= 1 << u
    return _count_extensions_pred(n, pred)


def _count_extensions_pred(n, pred):
    if n <= BITMASK_LIMIT:
        # Bottom-up DP over downsets: dp[mask] counts the orderings of the
        # items in mask that place every predecessor first.
        full = (1 << n) - 1
        dp = [0] * (full + 1)
        dp[0] = 1
        for mask in range(full + 1):
            c = dp[mask]
            if not c:
                continue
            free = ~mask & full
            while free:
                bit = free & -free
                i = bit.bit_length() - 1
                if pred[i] & ~mask == 0:
                    dp[mask | bit] += c
                free ^= bit
        return dp[full]
    # Source-removal backtracking with memoization on the placed set.
    full = (1 << n) - 1
    memo = {full: 1}

    def count(mask):
        try:
            return memo[mask]
        except KeyError:
            pass
        total = 0
        free = ~mask & full
        while free:
            bit = free & -free
            i = bit.bit_length() - 1
            if pred[i] & ~mask == 0:
                total += count(mask | bit)
            free ^= bit
        memo[mask] = total
        return total

    return count(0)


def count_bio_completions(d, t, partial):
    """Valid BIO completions of ``partial`` over d tokens and t chunk types.

    Left-to-right DP on the previous label; pinned positions contribute
    exactly their label.  A contradictory pinning yields 0.
    """
    values = (
        partial.values if isinstance(partial, PartialAnnotation) else tuple(partial)
    )
    if len(values) != d:
        raise ValueError(f"partial annotation has length {len(values)}, expected {d}")
    nl = 2 * t + 1
    outside = 2 * t
    for v in values:
        if v is not None and not (0 <= v < nl):
            raise ValueError(f"label {v} out of range [0, {nl})")
    state = {outside: 1}  # previous label -> count, virtual O before position 0
    for pos in range(d):
        options = range(nl) if values[pos] is None else (values[pos],)
        nxt = {}
        for prev, c in state.items():
            for cur in options:
                if bio_follows(prev, cur, t):
                    nxt[cur] = nxt.get(cur, 0) + c
        if not nxt:
            return 0
        state = nxt
    return sum(state.values())


@lru_cache(maxsize=None)
def enumerate_valid(family):
    """All valid labelings of a small family, as a cached tuple.

    Guarded by ``BRUTE_FORCE_CAP`` on the raw label-space size.
    """
    space = family.label_count ** family.size
    if space > BRUTE_FORCE_CAP:
        raise CapacityError(
            f"label space {family.label_count}^{family.size} = {space} exceeds "
            f"brute-force cap {BRUTE_FORCE_CAP}"
        )
    return tuple(
        y for y in product(range(family.label_count), repeat=family.size)
        if is_valid(family, y)
    )


def brute_force_count(family, partial):
    """Count completions by exhaustive enumeration (testing oracle)."""
    values = _check_partial(family, partial)
    return sum(1 for y in enumerate_valid(family) if consistent(values, y))
