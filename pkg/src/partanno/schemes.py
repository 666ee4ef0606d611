"""Budgeted annotation schemes over a pool of fully labeled structures.

Both schemes spend the same budget B = floor(fraction * total instances),
so their outputs are directly comparable:

* ``scheme_complete`` annotates whole structures in a random order until
  the budget runs out, spends any remainder partially on the next
  structure, and leaves the rest untouched.
* ``scheme_partial`` spreads the budget uniformly at random over all
  instances of all structures, so every structure ends up partially
  annotated (early stopping).

The pool's true labels are carried on the structures for evaluation and
consistency checks; training code only ever sees what a scheme revealed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .families import PartialAnnotation, is_valid
from .seeding import make_rng


@dataclass(frozen=True)
class PoolStructure:
    """One structure: its family, raw observations, per-variable feature
    bags, and the hidden true labeling."""

    family: object
    obs: tuple
    features: tuple
    labels: tuple

    @property
    def size(self):
        return self.family.size


@dataclass(frozen=True)
class SourcePool:
    structures: tuple
    label_names: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "structures", tuple(self.structures))
        for s in self.structures:
            if not is_valid(s.family, s.labels):
                raise ValueError("pool contains an invalid labeling")

    @property
    def total_instances(self):
        return sum(s.size for s in self.structures)

    def __len__(self):
        return len(self.structures)


@dataclass(frozen=True)
class AnnotatedDataset:
    """Output of a scheme: complete (T), partial (P), untouched (U).

    ``partial`` pairs each structure with the annotation revealed for it;
    the structure's own labels stay hidden from training.
    """

    complete: tuple
    partial: tuple  # ((PoolStructure, PartialAnnotation), ...)
    untouched: tuple
    annotated_count: int = field(default=None)

    def __post_init__(self):
        n = sum(s.size for s in self.complete) + sum(
            a.k for _, a in self.partial
        )
        if self.annotated_count is None:
            object.__setattr__(self, "annotated_count", n)
        elif self.annotated_count != n:
            raise ValueError(
                f"annotated_count {self.annotated_count} != revealed labels {n}"
            )


def _budget(pool, budget_fraction):
    if not 0.0 < budget_fraction <= 1.0:
        raise ValueError(f"budget fraction must be in (0, 1], got {budget_fraction}")
    if not pool.structures:
        raise ValueError("pool is empty")
    # tiny epsilon so e.g. 0.3 * 330 (= 98.99999999999999 in floats) still
    # floors to the intended 99
    return int(budget_fraction * pool.total_instances + 1e-9)


def scheme_complete(pool, budget_fraction, seed, spend_leftover=True):
    """Annotate whole structures until the budget runs out.

    Structures are visited in a seeded random order and fully annotated
    while the remaining budget covers them.  The first structure that does
    not fit absorbs the exact remainder as a partial annotation (or the
    remainder is discarded when ``spend_leftover`` is false); everything
    after it is untouched.
    """
    budget = _budget(pool, budget_fraction)
    rng = make_rng(seed)
    complete, partial, untouched = [], [], []
    remaining = budget
    fits = True
    for idx in rng.permutation(len(pool.structures)):
        s = pool.structures[idx]
        if fits and remaining >= s.size:
            complete.append(s)
            remaining -= s.size
            continue
        if fits:
            fits = False
            if remaining > 0 and spend_leftover:
                positions = rng.choice(s.size, size=remaining, replace=False)
                partial.append((s, PartialAnnotation.reveal(s.labels, positions)))
                remaining = 0
                continue
        untouched.append(s)
    return AnnotatedDataset(
        complete=tuple(complete),
        partial=tuple(partial),
        untouched=tuple(untouched),
        annotated_count=budget - remaining,
    )


def scheme_partial(pool, budget_fraction, seed):
    """Spread the budget uniformly over all instances (early stopping).

    B instance slots are drawn without replacement from the union of all
    structures' instances; each structure reveals exactly its drawn slots.
    Structures with every slot drawn count as complete.
    """
    budget = _budget(pool, budget_fraction)
    rng = make_rng(seed)
    slots = []
    for i, s in enumerate(pool.structures):
        slots.extend((i, pos) for pos in range(s.size))
    drawn = rng.choice(len(slots), size=budget, replace=False)
    per_structure = {i: [] for i in range(len(pool.structures))}
    for slot in drawn:
        i, pos = slots[slot]
        per_structure[i].append(pos)
    complete, partial = [], []
    for i, s in enumerate(pool.structures):
        positions = per_structure[i]
        if len(positions) == s.size:
            complete.append(s)
        else:
            partial.append((s, PartialAnnotation.reveal(s.labels, positions)))
    return AnnotatedDataset(
        complete=tuple(complete),
        partial=tuple(partial),
        untouched=(),
        annotated_count=budget,
    )
