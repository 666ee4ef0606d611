"""Exact constrained decoders.

Each decoder maximizes the sum of per-variable label scores subject to
(a) the family's structural constraints and (b) equality pins from a
partial annotation.  Ties are broken toward the lexicographically
smallest labeling (for chains: the lexicographically smallest item
order), which makes every decode deterministic.

Scores are a (d, label_count) matrix of local label scores.
"""

from __future__ import annotations

import warnings
from itertools import product

import numpy as np
from scipy.optimize import linear_sum_assignment

from .families import PartialAnnotation, bio_follows, chain_pairs

# Assignment decoding enumerates injections lexicographically while the
# search space is small enough; beyond this it switches to the Hungarian
# method (still exact, ties then resolved by the solver, not
# lexicographically).
EXHAUSTIVE_ASSIGNMENT_LIMIT = 20_000

# Chain decoding is exact (subset DP) up to this many items.
EXACT_CHAIN_LIMIT = 12

NEG_INF = float("-inf")


class InfeasibleError(ValueError):
    """The pinned labels admit no valid structure."""


class ApproximateDecodingWarning(UserWarning):
    """Emitted when a decoder falls back to a non-optimal heuristic."""


def _pin_values(partial, d):
    values = (
        partial.values if isinstance(partial, PartialAnnotation) else tuple(partial)
    )
    if len(values) != d:
        raise ValueError(f"partial annotation has length {len(values)}, expected {d}")
    return values


def decode_bio(scores, partial, t):
    """Highest-scoring valid BIO sequence honoring the pinned positions.

    Exact Viterbi over (position, previous label); ties resolve to the
    lexicographically smallest label sequence.
    """
    scores = np.asarray(scores, dtype=float)
    d, nl = scores.shape
    if nl != 2 * t + 1:
        raise ValueError(f"scores have {nl} labels, expected {2 * t + 1}")
    pins = _pin_values(partial, d)
    outside = 2 * t
    options = [
        (pins[pos],) if pins[pos] is not None else tuple(range(nl)) for pos in range(d)
    ]
    # best[pos][prev]: best achievable score for positions pos..d-1 given
    # the label at pos-1.
    best = [[NEG_INF] * nl for _ in range(d + 1)]
    best[d] = [0.0] * nl
    for pos in range(d - 1, -1, -1):
        row = scores[pos]
        nxt = best[pos + 1]
        for prev in range(nl):
            b = NEG_INF
            for cur in options[pos]:
                if bio_follows(prev, cur, t) and nxt[cur] > NEG_INF:
                    cand = row[cur] + nxt[cur]
                    if cand > b:
                        b = cand
            best[pos][prev] = b
    if best[0][outside] == NEG_INF:
        raise InfeasibleError("pinned labels admit no valid BIO sequence")
    seq = []
    prev = outside
    for pos in range(d):
        target = best[pos][prev]
        nxt = best[pos + 1]
        for cur in options[pos]:
            if (
                bio_follows(prev, cur, t)
                and nxt[cur] > NEG_INF
                and scores[pos][cur] + nxt[cur] == target
            ):
                seq.append(cur)
                prev = cur
                break
    return tuple(seq)


def decode_assignment(scores, partial):
    """Maximum-score assignment of agents to distinct tasks, pins fixed."""
    scores = np.asarray(scores, dtype=float)
    d, d_prime = scores.shape
    if d > d_prime:
        raise ValueError(f"more agents ({d}) than tasks ({d_prime})")
    pins = _pin_values(partial, d)
    pinned_tasks = [v for v in pins if v is not None]
    if len(set(pinned_tasks)) != len(pinned_tasks):
        raise InfeasibleError("two agents pinned to the same task")
    for v in pinned_tasks:
        if not (0 <= v < d_prime):
            raise ValueError(f"pinned task {v} out of range [0, {d_prime})")
    free_agents = [a for a in range(d) if pins[a] is None]
    free_tasks = [t_ for t_ in range(d_prime) if t_ not in set(pinned_tasks)]
    out = list(pins)
    if not free_agents:
        return tuple(out)

    space = 1
    for i in range(len(free_agents)):
        space *= len(free_tasks) - i
        if space > EXHAUSTIVE_ASSIGNMENT_LIMIT:
            break
    if space <= EXHAUSTIVE_ASSIGNMENT_LIMIT:
        choice = _assignment_exhaustive(scores, free_agents, free_tasks)
    else:
        sub = scores[np.ix_(free_agents, free_tasks)]
        rows, cols = linear_sum_assignment(sub, maximize=True)
        choice = [None] * len(free_agents)
        for r, c in zip(rows, cols):
            choice[r] = free_tasks[c]
    for a, t_ in zip(free_agents, choice):
        out[a] = t_
    return tuple(out)


def _assignment_exhaustive(scores, free_agents, free_tasks):
    # Lexicographic enumeration with strict improvement keeps the
    # lexicographically smallest argmax.
    best_score = NEG_INF
    best = None
    m = len(free_agents)
    used = [False] * len(free_tasks)
    choice = [None] * m

    def recurse(i, acc):
        nonlocal best_score, best
        if i == m:
            if acc > best_score:
                best_score = acc
                best = list(choice)
            return
        agent = free_agents[i]
        for j, task in enumerate(free_tasks):
            if used[j]:
                continue
            used[j] = True
            choice[i] = task
            recurse(i + 1, acc + scores[agent][task])
            used[j] = False

    recurse(0, 0.0)
    return best


def decode_chain(scores, partial, n, seed=0):
    """Pairwise labels of the best item order under pinned comparisons.

    Exact for n <= 12 via a DP over item subsets; larger instances fall
    back to seeded greedy insertion and emit ApproximateDecodingWarning.
    Ties resolve to the lexicographically smallest item order.
    """
    scores = np.asarray(scores, dtype=float)
    d = n * (n - 1) // 2
    if scores.shape != (d, 2):
        raise ValueError(f"scores must have shape ({d}, 2) for n={n}")
    pins = _pin_values(partial, d)
    pairs = chain_pairs(n)
    index = {pair: i for i, pair in enumerate(pairs)}
    pred = [0] * n  # pred[i]: bitmask of items pinned to precede i
    for (i, j), v in zip(pairs, pins):
        if v is None:
            continue
        if v == 0:
            pred[j] |= 1 << i
        else:
            pred[i] |= 1 << j

    if n > EXACT_CHAIN_LIMIT:
        order = _chain_greedy(scores, pred, n, index, seed)
    else:
        order = _chain_exact(scores, pred, n, index)
    ranks = [0] * n
    for pos, item in enumerate(order):
        ranks[item] = pos
    return tuple(0 if ranks[i] < ranks[j] else 1 for i, j in pairs)


def _placement_gain(scores, index, placed_items, item):
    # Score contribution of putting `item` directly after every item
    # currently placed.
    gain = 0.0
    for u in placed_items:
        if u < item:
            gain += scores[index[(u, item)]][0]
        else:
            gain += scores[index[(item, u)]][1]
    return gain


def _chain_exact(scores, pred, n, index):
    full = (1 << n) - 1
    # g[mask]: best score attainable for the pairs not yet fixed, given
    # the items in mask are already placed (in some order) before the rest.
    g = [NEG_INF] * (full + 1)
    g[full] = 0.0
    masks = sorted(range(full + 1), key=int.bit_count, reverse=True)
    items_of = [[i for i in range(n) if mask >> i & 1] for mask in range(full + 1)]
    for mask in masks:
        if mask == full:
            continue
        placed = items_of[mask]
        b = NEG_INF
        for i in range(n):
            bit = 1 << i
            if mask & bit or pred[i] & ~mask:
                continue
            nxt = g[mask | bit]
            if nxt == NEG_INF:
                continue
            cand = _placement_gain(scores, index, placed, i) + nxt
            if cand > b:
                b = cand
        g[mask] = b
    if g[0] == NEG_INF:
        raise InfeasibleError("pinned comparisons contain a cycle")
    order = []
    mask = 0
    while mask != full:
        placed = items_of[mask]
        target = g[mask]
        for i in range(n):
            bit = 1 << i
            if mask & bit or pred[i] & ~mask:
                continue
            nxt = g[mask | bit]
            if nxt == NEG_INF:
                continue
            if _placement_gain(scores, index, placed, i) + nxt == target:
                order.append(i)
                mask |= bit
                break
    return order


def _chain_greedy(scores, pred, n, index, seed):
    from .seeding import make_rng

    warnings.warn(
        f"chain decoding with n={n} > {EXACT_CHAIN_LIMIT} items uses greedy "
        "insertion; the result may not be the true argmax",
        ApproximateDecodingWarning,
        stacklevel=3,
    )
    rng = make_rng(seed)
    # Insert in a random topological order of the pin DAG so every item's
    # pinned predecessors are already placed and its successors are not,
    # which keeps the insertion window non-empty.
    remaining = set(range(n))
    insertion = []
    placed_mask = 0
    while remaining:
        sources = sorted(i for i in remaining if pred[i] & ~placed_mask == 0)
        if not sources:
            raise InfeasibleError("pinned comparisons contain a cycle")
        item = sources[int(rng.choice(len(sources)))]
        insertion.append(item)
        remaining.remove(item)
        placed_mask |= 1 << item
    order = []
    for item in insertion:
        lo = 0
        for pos, placed in enumerate(order):
            if pred[item] >> placed & 1:
                lo = max(lo, pos + 1)
        best_pos, best_gain = lo, NEG_INF
        for pos in range(lo, len(order) + 1):
            gain = _placement_gain(scores, index, order[:pos], item)
            for u in order[pos:]:
                if item < u:
                    gain += scores[index[(item, u)]][0]
                else:
                    gain += scores[index[(u, item)]][1]
            if gain > best_gain:
                best_gain, best_pos = gain, pos
        order.insert(best_pos, item)
    return order


def decode_unconstrained(scores, partial):
    """Per-position argmax with pins (no structural constraints)."""
    scores = np.asarray(scores, dtype=float)
    pins = _pin_values(partial, scores.shape[0])
    out = []
    for pos, pin in enumerate(pins):
        if pin is not None:
            out.append(pin)
        else:
            out.append(int(np.argmax(scores[pos])))
    return tuple(out)


def decode_uniform_label(scores, partial):
    """Best single shared label compatible with the pins."""
    scores = np.asarray(scores, dtype=float)
    d, nl = scores.shape
    pins = set(v for v in _pin_values(partial, d) if v is not None)
    if len(pins) > 1:
        raise InfeasibleError("pins disagree; no uniform labeling exists")
    if pins:
        label = pins.pop()
    else:
        label = int(np.argmax(scores.sum(axis=0)))
    return (label,) * d
