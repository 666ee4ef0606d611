"""Structure families: label sets, validity constraints, uniform sampling.

A structure is a length-d vector of label indices restricted to a valid
set by family-specific constraints.  Five families are supported:

* ``Chain(n)``       -- pairwise order comparisons between n items; a
  labeling is valid when the comparisons are the order relations of some
  permutation of the items.
* ``Assignment(d, d_prime)`` -- d agents each pick one of d_prime tasks,
  no task twice.
* ``Bio(d, t)``      -- begin/inside/outside tagging of a length-d
  sequence with t chunk types.
* ``Unconstrained(d, label_count)`` -- every labeling is valid.
* ``UniformLabel(d, label_count)`` -- all positions must share one label.

Labelings are plain tuples of label indices.  Partial annotations mark
unlabeled positions with ``None``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .seeding import as_generator

Labeling = tuple  # tuple[int, ...], length family.size


class StructureFamily:
    """Base class; concrete families define ``size`` and ``label_count``."""

    @property
    def size(self) -> int:
        raise NotImplementedError

    @property
    def label_count(self) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class Chain(StructureFamily):
    """Pairwise comparisons among ``n`` items.

    The d = n(n-1)/2 variables are the item pairs (i, j) with i < j in
    lexicographic order.  Label 0 means item i precedes item j, label 1
    the reverse.
    """

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"item count must be >= 1, got {self.n}")

    @property
    def size(self):
        return self.n * (self.n - 1) // 2

    @property
    def label_count(self):
        return 2


@dataclass(frozen=True)
class Assignment(StructureFamily):
    """``d`` agents assigned to distinct tasks out of ``d_prime`` (d <= d_prime)."""

    d: int
    d_prime: int

    def __post_init__(self):
        if self.d < 1 or self.d_prime < 1:
            raise ValueError("agent and task counts must be >= 1")
        if self.d > self.d_prime:
            raise ValueError(f"need d <= d_prime, got {self.d} > {self.d_prime}")

    @property
    def size(self):
        return self.d

    @property
    def label_count(self):
        return self.d_prime


@dataclass(frozen=True)
class Bio(StructureFamily):
    """Begin/inside/outside tagging with ``t`` chunk types over ``d`` tokens.

    Label indices: 0..t-1 are B of type j, t..2t-1 are I of type j, and
    2t is O.  A sequence is valid when no I label starts the sequence and
    every I of type j directly follows B or I of the same type (so O is
    never immediately followed by any I).
    """

    d: int
    t: int

    def __post_init__(self):
        if self.d < 1 or self.t < 1:
            raise ValueError("token and chunk-type counts must be >= 1")

    @property
    def size(self):
        return self.d

    @property
    def label_count(self):
        return 2 * self.t + 1

    @property
    def outside(self):
        """Index of the O label."""
        return 2 * self.t


@dataclass(frozen=True)
class Unconstrained(StructureFamily):
    """No constraints; every labeling of length ``d`` is valid."""

    d: int
    labels: int

    def __post_init__(self):
        if self.d < 1 or self.labels < 1:
            raise ValueError("size and label count must be >= 1")

    @property
    def size(self):
        return self.d

    @property
    def label_count(self):
        return self.labels


@dataclass(frozen=True)
class UniformLabel(StructureFamily):
    """All ``d`` positions must carry the same label."""

    d: int
    labels: int

    def __post_init__(self):
        if self.d < 1 or self.labels < 1:
            raise ValueError("size and label count must be >= 1")

    @property
    def size(self):
        return self.d

    @property
    def label_count(self):
        return self.labels


@dataclass(frozen=True)
class PartialAnnotation:
    """A length-d annotation vector with ``None`` marking unlabeled positions."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    @property
    def k(self):
        """Number of labeled (non-null) positions."""
        return sum(v is not None for v in self.values)

    def __len__(self):
        return len(self.values)

    @classmethod
    def empty(cls, d):
        """All-null annotation of length ``d``."""
        return cls((None,) * d)

    @classmethod
    def reveal(cls, labeling, positions):
        """Annotation exposing ``labeling`` at the given positions only."""
        keep = set(int(p) for p in positions)
        return cls(tuple(v if i in keep else None for i, v in enumerate(labeling)))


# ---------------------------------------------------------------------------
# chain pair indexing

def chain_pairs(n):
    """Item pairs (i, j), i < j, in the canonical lexicographic order."""
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def chain_labels_from_ranks(ranks):
    """Pairwise labels induced by item ranks (position in the total order)."""
    n = len(ranks)
    return tuple(
        0 if ranks[i] < ranks[j] else 1 for i in range(n) for j in range(i + 1, n)
    )


def chain_edges(family, values):
    """Ordered (before, after) item pairs from the non-null chain labels."""
    edges = []
    for (i, j), v in zip(chain_pairs(family.n), values):
        if v is None:
            continue
        edges.append((i, j) if v == 0 else (j, i))
    return edges


def bio_follows(prev, cur, t):
    """Whether label ``cur`` may directly follow ``prev`` in a BIO sequence.

    ``prev`` is the O index (2t) at the virtual position before the
    sequence, so no sequence may begin with an I label.
    """
    if t <= cur < 2 * t:  # I of type (cur - t)
        return prev == cur - t or prev == cur
    return True


def bio_label_names(t, type_names=None):
    """Human-readable label names in index order (B-*, I-*, O)."""
    if type_names is None:
        type_names = [str(j) for j in range(t)]
    return (
        [f"B-{name}" for name in type_names]
        + [f"I-{name}" for name in type_names]
        + ["O"]
    )


# ---------------------------------------------------------------------------
# core operations

def _check_labeling(family, y):
    if len(y) != family.size:
        raise ValueError(f"labeling has length {len(y)}, family size is {family.size}")
    for v in y:
        if not (0 <= v < family.label_count):
            raise ValueError(f"label {v} out of range [0, {family.label_count})")


def is_valid(family, y):
    """True iff ``y`` satisfies the family's structural constraints.

    Raises ValueError on length or label-range mismatch.
    """
    _check_labeling(family, y)
    if isinstance(family, Chain):
        # A complete set of pairwise comparisons is realizable by a total
        # order iff the win counts are a permutation of 0..n-1 (transitive
        # tournament characterization).
        wins = [0] * family.n
        for u, _ in chain_edges(family, y):
            wins[u] += 1
        return sorted(wins) == list(range(family.n))
    if isinstance(family, Assignment):
        return len(set(y)) == len(y)
    if isinstance(family, Bio):
        prev = family.outside
        for cur in y:
            if not bio_follows(prev, cur, family.t):
                return False
            prev = cur
        return True
    if isinstance(family, Unconstrained):
        return True
    if isinstance(family, UniformLabel):
        return all(v == y[0] for v in y)
    raise TypeError(f"unknown family {family!r}")


def total_count(family):
    """Exact number of valid labelings, as an arbitrary-precision int."""
    if isinstance(family, Chain):
        return math.factorial(family.n)
    if isinstance(family, Assignment):
        return math.factorial(family.d_prime) // math.factorial(family.d_prime - family.d)
    if isinstance(family, Bio):
        from .counting import count_bio_completions

        return count_bio_completions(family.d, family.t, PartialAnnotation.empty(family.d))
    if isinstance(family, Unconstrained):
        return family.labels ** family.d
    if isinstance(family, UniformLabel):
        return family.labels
    raise TypeError(f"unknown family {family!r}")


def consistent(partial, y):
    """True iff ``y`` agrees with every non-null entry of ``partial``."""
    values = partial.values if isinstance(partial, PartialAnnotation) else tuple(partial)
    if len(values) != len(y):
        raise ValueError(f"length mismatch: {len(values)} vs {len(y)}")
    return all(a is None or a == b for a, b in zip(values, y))


def sample_structure(family, seed):
    """Draw one labeling uniformly from the family's valid set.

    ``seed`` may be an int or a numpy Generator.  Deterministic given the
    seed.
    """
    rng = as_generator(seed)
    if isinstance(family, Chain):
        perm = rng.permutation(family.n)
        ranks = np.empty(family.n, dtype=np.int64)
        ranks[perm] = np.arange(family.n)
        return chain_labels_from_ranks(ranks)
    if isinstance(family, Assignment):
        return tuple(int(v) for v in rng.permutation(family.d_prime)[: family.d])
    if isinstance(family, Bio):
        return _sample_bio(family, rng)
    if isinstance(family, Unconstrained):
        return tuple(int(v) for v in rng.integers(0, family.labels, size=family.d))
    if isinstance(family, UniformLabel):
        return (int(rng.integers(0, family.labels)),) * family.d
    raise TypeError(f"unknown family {family!r}")


def _sample_bio(family, rng):
    # Sequential sampling weighted by exact suffix-completion counts makes
    # every valid sequence equally likely.
    d, t = family.d, family.t
    nl = family.label_count
    suffix = [[0] * nl for _ in range(d + 1)]
    suffix[d] = [1] * nl
    for pos in range(d - 1, -1, -1):
        for prev in range(nl):
            suffix[pos][prev] = sum(
                suffix[pos + 1][cur] for cur in range(nl) if bio_follows(prev, cur, t)
            )
    seq = []
    prev = family.outside
    for pos in range(d):
        weights = np.array(
            [
                suffix[pos + 1][cur] if bio_follows(prev, cur, t) else 0
                for cur in range(nl)
            ],
            dtype=float,
        )
        cur = int(rng.choice(nl, p=weights / weights.sum()))
        seq.append(cur)
        prev = cur
    return tuple(seq)
