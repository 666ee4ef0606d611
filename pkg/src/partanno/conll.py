"""Reader for column-format chunking corpora.

Expected layout: one token per line with whitespace-separated columns
(token, part-of-speech tag, chunk tag such as B-NP / I-NP / O), blank
lines between sentences.  Chunk types are inferred from the data; each
sentence becomes one BIO structure with word/POS feature bags attached.
"""

from __future__ import annotations

import warnings

from .families import Bio
from .perceptron import feature_bag
from .schemes import PoolStructure, SourcePool


def conll_features(tokens, pos_tags):
    """Per-token feature bags from words and part-of-speech tags."""
    d = len(tokens)
    bags = []
    for j in range(d):
        prev_pos = pos_tags[j - 1] if j > 0 else "BOS"
        next_pos = pos_tags[j + 1] if j + 1 < d else "EOS"
        word = tokens[j].lower()
        bags.append(
            feature_bag(
                [
                    f"w:{word}",
                    f"pos:{pos_tags[j]}",
                    f"prevpos:{prev_pos}",
                    f"nextpos:{next_pos}",
                    f"posbigram:{prev_pos}|{pos_tags[j]}",
                    f"suffix:{word[-2:]}",
                ]
            )
        )
    return tuple(bags)


def ingest_conll_chunking(path, invalid="repair", repairs=None):
    """Read a chunking corpus into a SourcePool of BIO structures.

    ``invalid`` controls what happens to an I-X tag that follows neither
    B-X nor I-X: ``"repair"`` (default) rewrites it to B-X, ``"reject"``
    raises.  Repairs are described with their line numbers; pass a list as
    ``repairs`` to collect the messages.
    """
    if invalid not in ("repair", "reject"):
        raise ValueError(f'invalid must be "repair" or "reject", got {invalid!r}')
    sentences = []
    current = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                if current:
                    sentences.append(current)
                    current = []
                continue
            cols = line.split()
            if len(cols) < 3:
                raise ValueError(
                    f"{path}:{lineno}: expected 3 columns (token, POS, chunk tag), "
                    f"got {len(cols)}: {line!r}"
                )
            tag = cols[-1]
            if tag != "O" and (len(tag) < 3 or tag[1] != "-" or tag[0] not in "BI"):
                raise ValueError(f"{path}:{lineno}: malformed chunk tag {tag!r}")
            current.append((lineno, cols[0], cols[1], tag))
    if current:
        sentences.append(current)
    if not sentences:
        warnings.warn(f"{path}: no sentences found", stacklevel=2)
        return SourcePool(structures=(), label_names=None)

    type_names = sorted(
        {row[3][2:] for sent in sentences for row in sent if row[3] != "O"}
    )
    if not type_names:
        type_names = ["chunk"]  # all-O corpus still needs a B/I slot
    type_index = {name: i for i, name in enumerate(type_names)}
    t = len(type_names)
    structures = []
    for sent in sentences:
        labels = []
        prev = "O"
        for lineno, _, _, tag in sent:
            if tag == "O":
                labels.append(2 * t)
            elif tag[0] == "B":
                labels.append(type_index[tag[2:]])
            else:  # I-X
                kind = tag[2:]
                if prev in (f"B-{kind}", f"I-{kind}"):
                    labels.append(t + type_index[kind])
                else:
                    message = (
                        f"{path}:{lineno}: {tag} follows {prev}, not B-{kind} or "
                        f"I-{kind}"
                    )
                    if invalid == "reject":
                        raise ValueError(message)
                    if repairs is not None:
                        repairs.append(message + " (repaired to B)")
                    labels.append(type_index[kind])
            prev = tag if tag == "O" else labels_to_tag(labels[-1], t, type_names)
        tokens = [row[1] for row in sent]
        pos_tags = [row[2] for row in sent]
        structures.append(
            PoolStructure(
                family=Bio(d=len(sent), t=t),
                obs=tuple(zip(tokens, pos_tags)),
                features=conll_features(tokens, pos_tags),
                labels=tuple(labels),
            )
        )
    label_names = (
        [f"B-{n}" for n in type_names] + [f"I-{n}" for n in type_names] + ["O"]
    )
    return SourcePool(structures=tuple(structures), label_names=tuple(label_names))


def labels_to_tag(label, t, type_names):
    """Map a label index back to its B-X / I-X / O string."""
    if label == 2 * t:
        return "O"
    if label < t:
        return f"B-{type_names[label]}"
    return f"I-{type_names[label - t]}"
