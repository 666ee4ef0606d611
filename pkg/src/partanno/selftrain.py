"""Self-training over partially annotated structures.

``self_train`` initializes a model on the complete set, then repeatedly
(a) completes every partial structure by constrained decoding, where the
decoder must honor both the structural constraints and the revealed
labels, and (b) retrains on the union of the complete set and the
completions.  It stops when the completions reach a fixed point or after
``max_iters`` rounds.

``constraint_driven_train`` is the special case with fully unlabeled
structures: the equality constraints are vacuous and only the structural
constraints steer the completions.
"""

from __future__ import annotations

from .families import PartialAnnotation, consistent, is_valid


class ContractViolation(RuntimeError):
    """A decoder returned an invalid or pin-inconsistent structure."""


def self_train(complete, partial, learn, decode, max_iters=10):
    """Train on complete structures plus decoded completions of partial ones.

    Parameters
    ----------
    complete : sequence of (structure, labeling)
        Fully labeled training structures; must be non-empty.
    partial : sequence of (structure, PartialAnnotation)
        Partially labeled structures to complete and learn from.
    learn : callable(list of (structure, labeling)) -> model
        Deterministic local learner.
    decode : callable(model, structure, PartialAnnotation) -> labeling
        Constrained inference; its output must be a valid structure that
        agrees with every revealed label (checked, ContractViolation
        otherwise).
    max_iters : int
        Iteration cap; the loop usually stops earlier, at the first
        iteration whose completions match the previous one's.
    """
    complete = list(complete)
    partial = list(partial)
    if not complete:
        raise ValueError("self_train needs a non-empty complete set to initialize")
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    model = learn(complete)
    if not partial:
        return model
    previous = None
    for _ in range(max_iters):
        completions = []
        for structure, annotation in partial:
            y = decode(model, structure, annotation)
            if not is_valid(structure.family, y):
                raise ContractViolation(
                    f"decoder produced an invalid {type(structure.family).__name__} labeling"
                )
            if not consistent(annotation, y):
                raise ContractViolation(
                    "decoder ignored a pinned label from the partial annotation"
                )
            completions.append(tuple(y))
        if completions == previous:
            break
        previous = completions
        model = learn(
            complete + [(s, y) for (s, _), y in zip(partial, completions)]
        )
    return model


def constraint_driven_train(complete, unlabeled, learn, decode, max_iters=10):
    """Self-training with fully unlabeled structures (no pinned labels)."""
    partial = [
        (s, PartialAnnotation.empty(s.family.size)) for s in unlabeled
    ]
    return self_train(complete, partial, learn, decode, max_iters=max_iters)
