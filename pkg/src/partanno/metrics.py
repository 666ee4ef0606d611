"""F1 metrics: instance-level (micro) and phrase-level (chunk)."""

from __future__ import annotations

from dataclasses import dataclass

from .families import Bio, is_valid


@dataclass(frozen=True)
class F1Result:
    precision: float
    recall: float
    f1: float
    true_positives: int
    predicted: int
    gold: int


def _f1(tp, predicted, gold):
    precision = tp / predicted if predicted else 0.0
    recall = tp / gold if gold else 0.0
    f1 = (
        2 * precision * recall / (precision + recall) if precision + recall else 0.0
    )
    return F1Result(precision, recall, f1, tp, predicted, gold)


def micro_f1(predicted, gold, negative_label=None):
    """Micro-averaged F1 over instance labels across all structures.

    When ``negative_label`` is given, instances carrying it are excluded
    from the predicted and gold counts (precision/recall over the
    remaining labels only).
    """
    if len(predicted) != len(gold):
        raise ValueError(f"{len(predicted)} predicted vs {len(gold)} gold structures")
    tp = n_pred = n_gold = 0
    for p_seq, g_seq in zip(predicted, gold):
        if len(p_seq) != len(g_seq):
            raise ValueError("structure length mismatch")
        for p, g in zip(p_seq, g_seq):
            if p != negative_label:
                n_pred += 1
            if g != negative_label:
                n_gold += 1
            if p == g and g != negative_label:
                tp += 1
    return _f1(tp, n_pred, n_gold)


def bio_chunks(labels, t):
    """Maximal (type, start, end) spans of a BIO labeling; end inclusive."""
    chunks = []
    start = None
    kind = None
    for pos, lab in enumerate(labels):
        if lab < t:  # B
            if start is not None:
                chunks.append((kind, start, pos - 1))
            start, kind = pos, lab
        elif lab < 2 * t:  # I, same type as the open chunk by validity
            pass
        else:  # O
            if start is not None:
                chunks.append((kind, start, pos - 1))
                start = None
    if start is not None:
        chunks.append((kind, start, len(labels) - 1))
    return chunks


def chunk_f1(predicted, gold, t):
    """Phrase-level F1: exact-match (type, start, end) spans.

    Both inputs must be valid BIO labelings over ``t`` chunk types.
    """
    if len(predicted) != len(gold):
        raise ValueError(f"{len(predicted)} predicted vs {len(gold)} gold structures")
    tp = n_pred = n_gold = 0
    for p_seq, g_seq in zip(predicted, gold):
        if len(p_seq) != len(g_seq):
            raise ValueError("structure length mismatch")
        family = Bio(d=len(p_seq), t=t)
        for name, seq in (("predicted", p_seq), ("gold", g_seq)):
            if not is_valid(family, seq):
                raise ValueError(f"{name} sequence is not a valid BIO labeling")
        p_chunks = set(bio_chunks(p_seq, t))
        g_chunks = set(bio_chunks(g_seq, t))
        tp += len(p_chunks & g_chunks)
        n_pred += len(p_chunks)
        n_gold += len(g_chunks)
    return _f1(tp, n_pred, n_gold)
