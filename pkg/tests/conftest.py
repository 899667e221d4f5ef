"""Shared reference implementations and corpus builders for the tests.

The span oracles here are deliberately written in a different style from the
library kernels (per-token membership decisions instead of a running
open-span state) so that agreement between the two is meaningful.
"""

from __future__ import annotations

import random

import pytest


def bio_spans_oracle(labels: list[str]) -> list[tuple[int, int, str]]:
    """Reference span extraction via per-token start/continue decisions."""
    marks: list[tuple[int, str, bool]] = []
    for i, lab in enumerate(labels):
        if lab == "O":
            continue
        prefix, typ = lab.split("-", 1)
        prev = labels[i - 1] if i else "O"
        if prefix == "B" or prev == "O":
            opens = True
        else:
            opens = prev.split("-", 1)[1] != typ
        marks.append((i, typ, opens))
    spans: list[list] = []
    for i, typ, opens in marks:
        if opens:
            spans.append([i, i + 1, typ])
        else:
            spans[-1][1] = i + 1
    return [(s, e, t) for s, e, t in spans]


def orphan_oracle(labels: list[str]) -> int:
    """Reference orphan count: I-X not directly after B-X or I-X."""
    count = 0
    for i, lab in enumerate(labels):
        if not lab.startswith("I-"):
            continue
        typ = lab[2:]
        prev = labels[i - 1] if i else "O"
        if prev != "B-" + typ and prev != "I-" + typ:
            count += 1
    return count


def score_corpus_oracle(
    gold: list[list[str]], pred: list[list[str]]
) -> dict[str, list[int]]:
    """Reference whole-corpus counters {type: [tp, pred, gold]}, non-streaming."""
    counts: dict[str, list[int]] = {}

    def bucket(t: str) -> list[int]:
        return counts.setdefault(t, [0, 0, 0])

    for g_labels, p_labels in zip(gold, pred):
        g_spans = bio_spans_oracle(g_labels)
        p_spans = bio_spans_oracle(p_labels)
        for _, _, t in g_spans:
            bucket(t)[2] += 1
        g_set = set(g_spans)
        for span in p_spans:
            b = bucket(span[2])
            b[1] += 1
            if span in g_set:
                b[0] += 1
    return counts


def random_bio_labels(
    rng: random.Random,
    types: list[str],
    length: int,
    orphan_rate: float = 0.15,
) -> list[str]:
    """A label sequence with plenty of adjacent spans and stray I- tokens."""
    labels = []
    for _ in range(length):
        roll = rng.random()
        if roll < 0.4:
            labels.append("O")
        elif roll < 0.4 + orphan_rate:
            labels.append("I-" + rng.choice(types))
        else:
            labels.append("B-" + rng.choice(types))
    return labels


@pytest.fixture
def canonical_space():
    from piiprep.fixtures import canonical_space as _cs

    return _cs()
