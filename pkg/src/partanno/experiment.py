"""The budget sweep: complete-first vs spread-partial annotation.

For every repetition and budget fraction the runner splits a pool into an
initial complete set, a budgeted pool, and a held-out test set, applies
both annotation schemes at identical budgets, trains via self-training,
and scores both models on the test set.  Everything derives from the
master seed, so a sweep is reproducible bit-for-bit regardless of thread
count.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .conll import ingest_conll_chunking
from .families import (
    Assignment,
    Bio,
    Chain,
    PartialAnnotation,
    Unconstrained,
    UniformLabel,
)
from .metrics import chunk_f1, micro_f1
from .schemes import SourcePool, scheme_complete, scheme_partial
from .seeding import derive_seed, make_rng
from .selftrain import ContractViolation, self_train
from .stats import savitzky_golay, wilcoxon_rank_sum
from .synthetic import decode_structure, make_structure_learner, make_synthetic_task

SCHEME_COMPLETE = "complete"
SCHEME_PARTIAL = "partial"
DEFAULT_FRACTIONS = tuple(round(0.1 * i, 1) for i in range(1, 11))


def parse_family(spec):
    """Build a structure family from a spec string.

    Examples: ``chain:n=10``, ``assignment:d=4,dprime=10``,
    ``bio:d=10,t=1``, ``unconstrained:d=5,labels=3``,
    ``uniform:d=5,labels=3``.
    """
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    params = {}
    if rest:
        for part in rest.split(","):
            key, _, value = part.partition("=")
            if not value:
                raise ValueError(f"bad family parameter {part!r} in {spec!r}")
            params[key.strip().lower()] = int(value)
    try:
        if kind == "chain":
            return Chain(n=params.pop("n"))
        if kind == "assignment":
            return Assignment(d=params.pop("d"), d_prime=params.pop("dprime"))
        if kind == "bio":
            return Bio(d=params.pop("d"), t=params.pop("t"))
        if kind == "unconstrained":
            return Unconstrained(d=params.pop("d"), labels=params.pop("labels"))
        if kind == "uniform":
            return UniformLabel(d=params.pop("d"), labels=params.pop("labels"))
    except KeyError as exc:
        raise ValueError(f"family spec {spec!r} is missing parameter {exc}") from None
    finally:
        if kind in ("chain", "assignment", "bio", "unconstrained", "uniform") and params:
            raise ValueError(f"unknown family parameters {sorted(params)} in {spec!r}")
    raise ValueError(
        f"unknown family kind {kind!r}; expected chain, assignment, bio, "
        "unconstrained, or uniform"
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings for one sweep; all fields are plain picklable values."""

    family: str = "bio:d=10,t=1"
    pool_size: int = 600
    corpus: str = None  # CoNLL-format path; overrides synthetic generation
    noise: float = 0.2
    t0_fraction: float = 0.15
    test_fraction: float = 0.30
    fractions: tuple = DEFAULT_FRACTIONS
    repetitions: int = 50
    seed: int = 0
    epochs: int = 3
    max_iters: int = 10
    threads: int = 1
    spend_leftover: bool = True
    out_dir: str = None

    def __post_init__(self):
        parse_family(self.family)  # validate early
        object.__setattr__(self, "fractions", tuple(float(f) for f in self.fractions))
        for f in self.fractions:
            if not 0.0 < f <= 1.0:
                raise ValueError(f"budget fraction {f} outside (0, 1]")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.epochs < 1 or self.max_iters < 1:
            raise ValueError("epochs and max_iters must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if not 0.0 <= self.noise < 1.0:
            raise ValueError(f"noise must be in [0, 1), got {self.noise}")
        if self.t0_fraction <= 0 or self.test_fraction <= 0:
            raise ValueError("t0_fraction and test_fraction must be positive")
        if self.t0_fraction + self.test_fraction >= 1.0:
            raise ValueError("t0_fraction + test_fraction must leave room for the pool")
        if self.corpus is None and self.pool_size < 4:
            raise ValueError("pool_size must be >= 4")


@dataclass(frozen=True)
class SweepReport:
    """Per-repetition F1 scores for both schemes at every budget fraction."""

    fractions: tuple
    schemes: tuple
    scores: tuple  # scores[scheme_idx][fraction_idx] = per-repetition tuple

    @property
    def repetitions(self):
        return len(self.scores[0][0])

    def per_repetition(self, scheme, fraction):
        return self.scores[self.schemes.index(scheme)][self.fractions.index(fraction)]

    def mean_f1(self, scheme, fraction):
        return float(np.mean(self.per_repetition(scheme, fraction)))

    def stderr(self, scheme, fraction):
        values = self.per_repetition(scheme, fraction)
        if len(values) < 2:
            return 0.0
        return float(np.std(values, ddof=1) / math.sqrt(len(values)))

    def p_value(self, fraction):
        """Two-sided rank-sum p-value between the schemes at one fraction."""
        return wilcoxon_rank_sum(
            self.per_repetition(SCHEME_COMPLETE, fraction),
            self.per_repetition(SCHEME_PARTIAL, fraction),
        )

    def smoothed_means(self, scheme, window=5, degree=2):
        """Display-only smoothing of the mean-F1 curve across fractions."""
        means = [self.mean_f1(scheme, f) for f in self.fractions]
        window = min(window, len(means) - (1 - len(means) % 2))
        if window < 3 or degree >= window:
            return np.asarray(means)
        return savitzky_golay(means, window, degree)


def _build_pool(config, rep):
    if config.corpus is not None:
        return ingest_conll_chunking(config.corpus)
    family = parse_family(config.family)
    pool, _ = make_synthetic_task(
        family, config.pool_size, config.noise, make_rng(config.seed, rep, 0)
    )
    return pool


def _split_pool(pool, config, rep):
    n = len(pool.structures)
    order = make_rng(config.seed, rep, 1).permutation(n)
    n_t0 = max(1, int(config.t0_fraction * n))
    n_test = max(1, int(config.test_fraction * n))
    if n_t0 + n_test >= n:
        raise ValueError(
            f"pool of {n} structures cannot fit t0={n_t0} plus test={n_test} "
            "with a non-empty budget pool"
        )
    t0 = [pool.structures[i] for i in order[:n_t0]]
    test = [pool.structures[i] for i in order[n_t0 : n_t0 + n_test]]
    budget_pool = SourcePool(
        structures=tuple(pool.structures[i] for i in order[n_t0 + n_test :]),
        label_names=pool.label_names,
    )
    return t0, test, budget_pool


def _label_count(pool):
    return max(s.family.label_count for s in pool.structures)


def _evaluate(model, test_structures):
    predicted = []
    gold = []
    for s in test_structures:
        y = decode_structure(model, s, PartialAnnotation.empty(s.size))
        predicted.append(y)
        gold.append(s.labels)
    family = test_structures[0].family
    if isinstance(family, Bio):
        return chunk_f1(predicted, gold, family.t).f1
    return micro_f1(predicted, gold).f1


def run_repetition(config, rep):
    """All (scheme, fraction) F1 scores for one repetition."""
    pool = _build_pool(config, rep)
    t0, test, budget_pool = _split_pool(pool, config, rep)
    label_count = _label_count(pool)
    complete_base = [(s, s.labels) for s in t0]
    results = {}
    for f_idx, fraction in enumerate(config.fractions):
        datasets = {
            SCHEME_COMPLETE: scheme_complete(
                budget_pool,
                fraction,
                derive_seed(config.seed, rep, 2, f_idx, 0),
                spend_leftover=config.spend_leftover,
            ),
            SCHEME_PARTIAL: scheme_partial(
                budget_pool, fraction, derive_seed(config.seed, rep, 2, f_idx, 1)
            ),
        }
        if config.spend_leftover:
            counts = {name: ds.annotated_count for name, ds in datasets.items()}
            if len(set(counts.values())) != 1:
                raise ContractViolation(f"budget parity violated: {counts}")
        for s_idx, (name, ds) in enumerate(datasets.items()):
            learn = make_structure_learner(
                label_count,
                config.epochs,
                derive_seed(config.seed, rep, 3, f_idx, s_idx),
            )
            partial = list(ds.partial) + [
                (s, PartialAnnotation.empty(s.size)) for s in ds.untouched
            ]
            model = self_train(
                complete_base + [(s, s.labels) for s in ds.complete],
                partial,
                learn,
                decode_structure,
                max_iters=config.max_iters,
            )
            results[(name, f_idx)] = _evaluate(model, test)
    return results


def run_sweep(config):
    """Run the full sweep and aggregate into a SweepReport."""
    reps = range(config.repetitions)
    if config.threads > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            all_results = list(pool.map(_worker, [(config, r) for r in reps]))
    else:
        all_results = [run_repetition(config, r) for r in reps]
    schemes = (SCHEME_COMPLETE, SCHEME_PARTIAL)
    scores = tuple(
        tuple(
            tuple(all_results[r][(name, f_idx)] for r in reps)
            for f_idx in range(len(config.fractions))
        )
        for name in schemes
    )
    return SweepReport(fractions=config.fractions, schemes=schemes, scores=scores)


def _worker(args):
    return run_repetition(*args)


# ---------------------------------------------------------------------------
# report files

def emit_reports(report, out_dir):
    """Write sweep.csv (per-repetition rows) and summary.csv (aggregates)."""
    os.makedirs(out_dir, exist_ok=True)
    sweep_path = os.path.join(out_dir, "sweep.csv")
    with open(sweep_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_NONNUMERIC, lineterminator="\n")
        writer.writerow(["scheme", "fraction", "repetition", "f1"])
        for s_idx, scheme in enumerate(report.schemes):
            for f_idx, fraction in enumerate(report.fractions):
                for rep, f1 in enumerate(report.scores[s_idx][f_idx]):
                    writer.writerow([scheme, fraction, rep, f1])
    summary_path = os.path.join(out_dir, "summary.csv")
    with open(summary_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_NONNUMERIC, lineterminator="\n")
        writer.writerow(["scheme", "fraction", "mean_f1", "stderr", "p_value"])
        for scheme in report.schemes:
            for fraction in report.fractions:
                writer.writerow(
                    [
                        scheme,
                        fraction,
                        report.mean_f1(scheme, fraction),
                        report.stderr(scheme, fraction),
                        report.p_value(fraction),
                    ]
                )
    return sweep_path, summary_path


def read_sweep_csv(path):
    """Re-load sweep.csv into a SweepReport (exact float round-trip)."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, quoting=csv.QUOTE_NONNUMERIC)
        header = next(reader)
        if header != ["scheme", "fraction", "repetition", "f1"]:
            raise ValueError(f"{path}: unexpected header {header}")
        rows.extend(reader)
    schemes = tuple(dict.fromkeys(row[0] for row in rows))
    fractions = tuple(dict.fromkeys(row[1] for row in rows))
    by_key = {}
    for scheme, fraction, rep, f1 in rows:
        by_key.setdefault((scheme, fraction), []).append((rep, f1))
    scores = tuple(
        tuple(
            tuple(f1 for _, f1 in sorted(by_key[(scheme, fraction)]))
            for fraction in fractions
        )
        for scheme in schemes
    )
    return SweepReport(fractions=fractions, schemes=schemes, scores=scores)


def write_infocurve_csv(curve, path):
    """Plot-ready CSV of one information curve: k, I_bits, stderr, diff."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_NONNUMERIC, lineterminator="\n")
        writer.writerow(["k", "I_bits", "stderr", "diff"])
        for k in range(curve.family.size + 1):
            diff = "" if k == 0 else curve.diffs[k - 1]
            writer.writerow([k, curve.info_bits[k], curve.stderr[k], diff])
    return path
