"""Information curves: how many bits a k-step partial annotation carries.

For a structure drawn uniformly from the valid set, the information (in
bits) revealed by annotating k uniformly chosen positions is

    info(k) = log2(total valid) - E[log2(completions left)]

which equals the mutual information between the structure and the
annotation.  ``estimate_curve`` estimates the expectation by Monte Carlo
over (structure, reveal order) draws; ``closed_form_curve`` evaluates the
families whose completion count does not depend on which positions were
revealed.  ``strength_slope`` summarizes how fast the per-step information
gain decays; a steeper (more negative) slope means a tighter structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .counting import count_completions
from .families import (
    Assignment,
    PartialAnnotation,
    Unconstrained,
    UniformLabel,
    sample_structure,
    total_count,
)
from .seeding import make_rng


def log2_ratio(a, b):
    """log2(a / b) for positive ints, exactly rounded when b divides a.

    Using the integer ratio keeps distribution-free curves bit-identical
    between the Monte Carlo and closed-form paths.
    """
    if b <= 0 or a <= 0:
        raise ValueError("counts must be positive")
    if a % b == 0:
        return math.log2(a // b)
    return math.log2(a) - math.log2(b)


def _column_mean(col):
    # The mean of identical values is that value; bypassing float
    # summation keeps distribution-free families exact.
    if np.all(col == col[0]):
        return float(col[0])
    return float(col.mean())


def _column_stderr(col):
    if col.shape[0] < 2 or np.all(col == col[0]):
        return 0.0
    return float(col.std(ddof=1) / math.sqrt(col.shape[0]))


@dataclass(frozen=True)
class InfoCurve:
    """Information curve of one structure family.

    info_bits[k] is the information carried by a k-step annotation,
    k = 0..d.  diffs[k-1] is the marginal gain of the k-th annotation.
    stderr / diff_stderr / concavity_stderr are Monte Carlo standard
    errors (all zero for closed-form curves, where trials == 0).
    concavity_stderr[k-1] is the standard error of diffs[k] - diffs[k-1],
    the statistic used when checking that gains do not increase.
    """

    family: object
    info_bits: np.ndarray
    diffs: np.ndarray
    trials: int
    stderr: np.ndarray = field(default=None)
    diff_stderr: np.ndarray = field(default=None)
    concavity_stderr: np.ndarray = field(default=None)

    def __post_init__(self):
        d = self.family.size
        for name, arr, length in (
            ("info_bits", self.info_bits, d + 1),
            ("diffs", self.diffs, d),
            ("stderr", self.stderr, d + 1),
            ("diff_stderr", self.diff_stderr, d),
            ("concavity_stderr", self.concavity_stderr, max(d - 1, 0)),
        ):
            if arr is None:
                arr = np.zeros(length)
            arr = np.asarray(arr, dtype=float)
            if arr.shape != (length,):
                raise ValueError(f"{name} must have shape ({length},)")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def estimate_curve(family, trials, seed=0):
    """Monte Carlo estimate of the information curve.

    Each trial draws one structure and one uniformly random reveal order,
    then walks k = 0..d recording the log2 completion count.  Trials use
    seed-derived sub-streams, so the curve is identical for any execution
    order.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    d = family.size
    total = total_count(family)
    info = np.empty((trials, d + 1))
    gain = np.empty((trials, d))
    for trial in range(trials):
        rng = make_rng(seed, trial)
        y = sample_structure(family, rng)
        order = rng.permutation(d)
        values = [None] * d
        prev_count = total
        info[trial, 0] = log2_ratio(total, total)
        for step, pos in enumerate(order, start=1):
            values[pos] = y[pos]
            if prev_count == 1:
                cur_count = 1  # fully determined; later reveals change nothing
            else:
                cur_count = count_completions(family, PartialAnnotation(values))
            info[trial, step] = log2_ratio(total, cur_count)
            gain[trial, step - 1] = log2_ratio(prev_count, cur_count)
            prev_count = cur_count
    second = gain[:, 1:] - gain[:, :-1]
    return InfoCurve(
        family=family,
        info_bits=np.array([_column_mean(info[:, k]) for k in range(d + 1)]),
        diffs=np.array([_column_mean(gain[:, k]) for k in range(d)]),
        trials=trials,
        stderr=np.array([_column_stderr(info[:, k]) for k in range(d + 1)]),
        diff_stderr=np.array([_column_stderr(gain[:, k]) for k in range(d)]),
        concavity_stderr=np.array(
            [_column_stderr(second[:, k]) for k in range(max(d - 1, 0))]
        ),
    )


def closed_form_curve(family):
    """Exact information curve for the distribution-free families.

    Supported: Assignment, Unconstrained, UniformLabel (their completion
    count depends only on k, not on which labels were revealed).  Chain
    and BIO structures have no closed form; use ``estimate_curve``.
    """
    if isinstance(family, Assignment):
        base = math.factorial(family.d_prime - family.d)
        counts = [
            math.factorial(family.d_prime - k) // base for k in range(family.d + 1)
        ]
    elif isinstance(family, Unconstrained):
        counts = [family.labels ** (family.d - k) for k in range(family.d + 1)]
    elif isinstance(family, UniformLabel):
        counts = [family.labels] + [1] * family.d
    else:
        raise ValueError(
            f"no closed-form curve for {type(family).__name__}; use estimate_curve"
        )
    total = counts[0]
    return InfoCurve(
        family=family,
        info_bits=np.array([log2_ratio(total, c) for c in counts]),
        diffs=np.array(
            [log2_ratio(counts[k - 1], counts[k]) for k in range(1, family.size + 1)]
        ),
        trials=0,
    )


def strength_slope(curve):
    """Decay rate of the per-step information gain.

    Least-squares slope of diffs against annotation completeness k/d for
    k = 1..d.  More negative means a stronger structure; a flat (constant)
    gain sequence has slope exactly 0.
    """
    d = curve.family.size
    if d < 2:
        raise ValueError(f"need at least 2 variables to fit a slope, got d={d}")
    diffs = curve.diffs
    if np.all(diffs == diffs[0]):
        return 0.0
    completeness = np.arange(1, d + 1) / d
    return float(np.polyfit(completeness, diffs, 1)[0])
