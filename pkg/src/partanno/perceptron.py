"""Sparse averaged perceptron over hashed feature bags.

A feature bag is a dict mapping stable 64-bit feature ids to values.
Ids come from ``feature_id`` (a keyed-less blake2b hash), so the same
feature string maps to the same id on every run and platform.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

FORMAT_NAME = "partanno-linear-model"
FORMAT_VERSION = 1


def feature_id(name):
    """Stable 64-bit id for a feature string."""
    digest = hashlib.blake2b(name.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def feature_bag(names, value=1.0):
    """Indicator-style feature bag from an iterable of feature strings."""
    return {feature_id(n): value for n in names}


@dataclass(frozen=True)
class LinearModel:
    """Averaged weights of a trained multiclass perceptron.

    ``weights[label]`` maps feature id to averaged weight.  Scoring is the
    plain dot product with a feature bag.
    """

    label_count: int
    weights: tuple  # tuple of dicts, one per label
    epochs: int
    examples: int
    updates: int

    def __eq__(self, other):
        if not isinstance(other, LinearModel):
            return NotImplemented
        return (
            self.label_count == other.label_count
            and self.epochs == other.epochs
            and self.examples == other.examples
            and self.updates == other.updates
            and list(self.weights) == list(other.weights)
        )


def perceptron_train(examples, label_count, epochs=5, seed=0):
    """Train a multiclass averaged perceptron.

    ``examples`` is a list of (feature bag, label index) pairs.  Example
    order is shuffled per epoch with a seed-derived stream, so training is
    deterministic given (examples, epochs, seed).
    """
    from .seeding import make_rng

    if not examples:
        raise ValueError("cannot train on an empty example list")
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    for _, label in examples:
        if not (0 <= label < label_count):
            raise ValueError(f"label {label} out of range [0, {label_count})")

    w = [dict() for _ in range(label_count)]
    acc = [dict() for _ in range(label_count)]  # sum of t * update, for averaging
    rng = make_rng(seed)
    t = 0
    updates = 0
    for _ in range(epochs):
        for i in rng.permutation(len(examples)):
            t += 1
            bag, gold = examples[i]
            best, best_score = 0, None
            for label in range(label_count):
                wl = w[label]
                s = 0.0
                for f, v in bag.items():
                    wf = wl.get(f)
                    if wf is not None:
                        s += wf * v
                if best_score is None or s > best_score:
                    best, best_score = label, s
            if best != gold:
                updates += 1
                wg, ag = w[gold], acc[gold]
                wp, ap = w[best], acc[best]
                for f, v in bag.items():
                    wg[f] = wg.get(f, 0.0) + v
                    ag[f] = ag.get(f, 0.0) + t * v
                    wp[f] = wp.get(f, 0.0) - v
                    ap[f] = ap.get(f, 0.0) - t * v
    averaged = []
    for label in range(label_count):
        al = acc[label]
        averaged.append(
            {f: wv - al.get(f, 0.0) / t for f, wv in w[label].items() if wv or al.get(f)}
        )
    return LinearModel(
        label_count=label_count,
        weights=tuple(averaged),
        epochs=epochs,
        examples=len(examples),
        updates=updates,
    )


def score_labels(model, bag):
    """Averaged-weight score of every label for one feature bag."""
    out = np.zeros(model.label_count)
    for label in range(model.label_count):
        wl = model.weights[label]
        s = 0.0
        for f, v in bag.items():
            wf = wl.get(f)
            if wf is not None:
                s += wf * v
        out[label] = s
    return out


def score_matrix(model, bags):
    """(d, label_count) local score matrix for a sequence of feature bags."""
    return np.array([score_labels(model, bag) for bag in bags])


# ---------------------------------------------------------------------------
# serialization: versioned JSON; floats round-trip exactly

def model_to_dict(model):
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "label_count": model.label_count,
        "epochs": model.epochs,
        "examples": model.examples,
        "updates": model.updates,
        "weights": [
            {str(f): v for f, v in sorted(wl.items())} for wl in model.weights
        ],
    }


def model_from_dict(data):
    if data.get("format") != FORMAT_NAME:
        raise ValueError(f"not a {FORMAT_NAME} payload: {data.get('format')!r}")
    if data.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model version {data.get('version')!r}")
    return LinearModel(
        label_count=data["label_count"],
        weights=tuple({int(f): v for f, v in wl.items()} for wl in data["weights"]),
        epochs=data["epochs"],
        examples=data["examples"],
        updates=data["updates"],
    )


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh)


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
