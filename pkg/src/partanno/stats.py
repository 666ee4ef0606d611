"""Rank-sum significance testing and least-squares smoothing."""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

# Combined sample size up to which the rank-sum test enumerates the exact
# permutation distribution; above it, the normal approximation (with tie
# and continuity corrections) takes over.
EXACT_RANKSUM_LIMIT = 20


def _midranks(pooled):
    order = sorted(range(len(pooled)), key=pooled.__getitem__)
    ranks = [0.0] * len(pooled)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for idx in order[i : j + 1]:
            ranks[idx] = avg
        i = j + 1
    return ranks


def wilcoxon_rank_sum(a, b):
    """Two-sided rank-sum test p-value for samples ``a`` and ``b``.

    Ties receive midranks.  With combined size <= EXACT_RANKSUM_LIMIT the
    p-value is exact (full enumeration of rank assignments); otherwise the
    normal approximation with tie correction and a 0.5 continuity
    correction is used.
    """
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    if not a or not b:
        raise ValueError("both samples must be non-empty")
    n, m = len(a), len(b)
    total = n + m
    ranks = _midranks(a + b)
    w_obs = sum(ranks[:n])
    mu = n * (total + 1) / 2
    if total <= EXACT_RANKSUM_LIMIT:
        # midranks are multiples of 0.5, so all sums below are exact floats
        # and the >= comparison is safe
        observed = abs(w_obs - mu)
        hits = 0
        count = 0
        for subset in combinations(range(total), n):
            count += 1
            w = sum(ranks[i] for i in subset)
            if abs(w - mu) >= observed:
                hits += 1
        return hits / count
    tie_term = 0.0
    counts = {}
    for r in ranks:
        counts[r] = counts.get(r, 0) + 1
    for c in counts.values():
        tie_term += c**3 - c
    var = n * m / 12 * ((total + 1) - tie_term / (total * (total - 1)))
    if var <= 0:
        return 1.0  # everything tied
    z = max(abs(w_obs - mu) - 0.5, 0.0) / math.sqrt(var)
    p = math.erfc(z / math.sqrt(2))  # two-sided normal tail
    return min(p, 1.0)


def savitzky_golay(series, window, degree):
    """Least-squares local-polynomial smoothing.

    Each point is replaced by the value at its position of a
    degree-``degree`` polynomial fit to the surrounding ``window`` points.
    Near the edges the window is truncated to the available one-sided
    samples.  ``window`` must be odd and larger than ``degree``.
    """
    series = np.asarray(series, dtype=float)
    n = series.shape[0]
    if window % 2 == 0:
        raise ValueError(f"window must be odd, got {window}")
    if degree >= window:
        raise ValueError(f"degree {degree} must be < window {window}")
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    if window > n:
        raise ValueError(f"window {window} exceeds series length {n}")
    half = window // 2
    out = np.empty(n)
    for i in range(n):
        lo = max(0, i - half)
        hi = min(n - 1, i + half)
        x = np.arange(lo, hi + 1) - i
        y = series[lo : hi + 1]
        # Vandermonde least squares centered at i; the fitted value at i
        # is the constant coefficient.  Underdetermined edge fits fall
        # back to the minimum-norm solution, which still interpolates.
        v = np.vander(x, degree + 1, increasing=True)
        coef, *_ = np.linalg.lstsq(v, y, rcond=None)
        out[i] = coef[0]
    return out
