"""Synthetic structured tasks with planted, recoverable labels.

Each generator plants a true structure and emits observations correlated
with it; ``noise`` in [0, 1) controls how much the observations are
corrupted.  At noise 0 the labels are exactly recoverable from the
observations.

* BIO / unconstrained / uniform-label: one categorical observation per
  position, equal to the label with probability 1 - noise, otherwise a
  uniformly random other symbol.
* Assignment: an agent-by-task affinity matrix equal to the planted
  matching's indicator plus Gaussian noise.
* Chain: per-item latent scores observed with Gaussian noise; pair
  features describe the observed score gap.

``make_synthetic_task`` returns a (SourcePool, SyntheticTask) pair.  The
module-level ``local_examples`` / ``make_structure_learner`` /
``decode_structure`` glue works for any pool whose structures carry
feature bags, including ingested corpora.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import decoding
from .families import (
    Assignment,
    Bio,
    Chain,
    Unconstrained,
    UniformLabel,
    chain_labels_from_ranks,
    chain_pairs,
    sample_structure,
)
from .perceptron import feature_bag, perceptron_train, score_matrix
from .schemes import PoolStructure, SourcePool
from .seeding import as_generator

GAP_BUCKET_WIDTH = 0.25
GAP_BUCKET_CLIP = 12
AFFINITY_BUCKET_WIDTH = 0.25
AFFINITY_BUCKET_CLIP = 8


def local_examples(structures):
    """Flatten (structure, labeling) pairs into (feature bag, label) pairs."""
    out = []
    for s, labels in structures:
        out.extend(zip(s.features, labels))
    return out


def make_structure_learner(label_count, epochs, seed):
    """Learner closure: trains a perceptron on flattened local examples.

    The seed is fixed inside the closure, so retraining on identical data
    reproduces the identical model (required for fixed-point detection in
    self-training).
    """

    def learn(structures):
        return perceptron_train(local_examples(structures), label_count, epochs, seed)

    return learn


def decode_structure(model, structure, partial):
    """Constrained decode of one structure under its own family."""
    family = structure.family
    scores = score_matrix(model, structure.features)
    if isinstance(family, Bio):
        return decoding.decode_bio(scores, partial, family.t)
    if isinstance(family, Assignment):
        return decoding.decode_assignment(scores, partial)
    if isinstance(family, Chain):
        return decoding.decode_chain(scores, partial, family.n)
    if isinstance(family, Unconstrained):
        return decoding.decode_unconstrained(scores, partial)
    if isinstance(family, UniformLabel):
        return decoding.decode_uniform_label(scores, partial)
    raise TypeError(f"unknown family {family!r}")


@dataclass(frozen=True)
class SyntheticTask:
    """Feature extraction and inference glue for one synthetic task."""

    family: object
    label_count: int

    def featurize(self, obs):
        """Per-variable feature bags for one structure's observations."""
        if isinstance(self.family, (Bio, Unconstrained, UniformLabel)):
            return _emission_features(obs)
        if isinstance(self.family, Assignment):
            return _affinity_features(obs, self.family.d_prime)
        if isinstance(self.family, Chain):
            return _gap_features(obs, self.family.n)
        raise TypeError(f"unknown family {self.family!r}")

    def make_learner(self, epochs, seed):
        return make_structure_learner(self.label_count, epochs, seed)

    def make_decoder(self):
        return decode_structure


def make_synthetic_task(family, count, noise, seed):
    """Generate ``count`` structures with observations; see module docs."""
    if not 0.0 <= noise < 1.0:
        raise ValueError(f"noise must be in [0, 1), got {noise}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    task = SyntheticTask(family=family, label_count=family.label_count)
    rng = as_generator(seed)
    structures = []
    for _ in range(count):
        if isinstance(family, (Bio, Unconstrained, UniformLabel)):
            labels = sample_structure(family, rng)
            obs = _emit_categorical(labels, family.label_count, noise, rng)
        elif isinstance(family, Assignment):
            labels = sample_structure(family, rng)
            affinity = rng.normal(size=(family.d, family.d_prime)) * noise
            for agent, tsk in enumerate(labels):
                affinity[agent, tsk] += 1.0
            obs = tuple(tuple(float(v) for v in row) for row in affinity)
        elif isinstance(family, Chain):
            latent = rng.normal(size=family.n)
            ranks = np.argsort(np.argsort(latent))
            labels = chain_labels_from_ranks(ranks)
            observed = latent + rng.normal(size=family.n) * noise
            obs = tuple(float(v) for v in observed)
        else:
            raise TypeError(f"unknown family {family!r}")
        structures.append(
            PoolStructure(
                family=family,
                obs=obs,
                features=tuple(task.featurize(obs)),
                labels=labels,
            )
        )
    return SourcePool(structures=tuple(structures)), task


def _emit_categorical(labels, label_count, noise, rng):
    obs = []
    for v in labels:
        if label_count > 1 and rng.random() < noise:
            other = int(rng.integers(0, label_count - 1))
            obs.append(other if other < v else other + 1)
        else:
            obs.append(v)
    return tuple(obs)


def _emission_features(obs):
    d = len(obs)
    bags = []
    for j in range(d):
        prev_obs = obs[j - 1] if j > 0 else "bos"
        next_obs = obs[j + 1] if j + 1 < d else "eos"
        bags.append(
            feature_bag(
                [
                    f"cur:{obs[j]}",
                    f"prev:{prev_obs}",
                    f"next:{next_obs}",
                    f"bigram:{prev_obs}|{obs[j]}",
                    f"parity:{j % 2}",
                ]
            )
        )
    return bags


def _affinity_features(obs, d_prime):
    bags = []
    for row in obs:
        names = []
        for tsk in range(d_prime):
            bucket = int(
                np.clip(
                    math.floor(row[tsk] / AFFINITY_BUCKET_WIDTH),
                    -AFFINITY_BUCKET_CLIP,
                    AFFINITY_BUCKET_CLIP,
                )
            )
            names.append(f"aff:{tsk}:{bucket}")
        bags.append(feature_bag(names))
    return bags


def _gap_features(obs, n):
    bags = []
    for i, j in chain_pairs(n):
        gap = obs[i] - obs[j]
        bucket = int(
            np.clip(
                math.floor(gap / GAP_BUCKET_WIDTH), -GAP_BUCKET_CLIP, GAP_BUCKET_CLIP
            )
        )
        sign = "neg" if gap < 0 else "pos"
        bags.append(feature_bag([f"gap:{bucket}", f"sign:{sign}"]))
    return bags
